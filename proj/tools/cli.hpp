// Copyright 2026 The noonsim Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Command-line front end: build, scan, fit, background and reproduce.
// Angles are given in degrees on the command line and in configuration
// files; they are converted to radians internally.

#pragma once

#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "noonsim.hpp"

namespace noonsim::cli {

enum ExitCode : int { kOk = 0, kConfigError = 2, kNumericError = 3 };

namespace detail {

struct Globals {
    std::optional<std::uint64_t> seed;
    std::string out;
    std::string config;
};

inline Json load_config(const Globals &g) { return g.config.empty() ? Json::object() : read_json_file(g.config); }

inline std::string dump(const Json &j) { return j.dump(2) + "\n"; }

inline void emit(const Globals &g, const std::string &text, std::ostream &out) {
    if (g.out.empty()) {
        out << text;
    } else {
        write_text_file(g.out, text);
    }
}

inline ReproduceOptions reproduce_options(const Json &cfg, const Globals &g) {
    ReproduceOptions opt;
    opt.seed = g.seed;
    if (cfg.contains("chain")) opt.chain = chain_config_from_json(cfg.at("chain"));
    if (cfg.contains("operating_point")) opt.operating_point = operating_point_from_json(cfg.at("operating_point"));
    opt.points = noonsim::detail::get_or<std::size_t>(cfg, "points", opt.points);
    opt.background_systematic = noonsim::detail::get_or(cfg, "background_systematic", opt.background_systematic);
    return opt;
}

inline std::vector<int> parse_pair(const std::string &text, const char *what) {
    const auto comma = text.find(',');
    try {
        if (comma == std::string::npos) throw std::invalid_argument(text);
        return {std::stoi(text.substr(0, comma)), std::stoi(text.substr(comma + 1))};
    } catch (const std::exception &) {
        throw FormatError(std::string(what) + " must be two comma-separated integers, got '" + text + "'");
    }
}

// -- build ------------------------------------------------------------------

struct BuildArgs {
    int n = 3;
    std::optional<int> n_max;
    bool chain = false;
    std::string basis = "linear";
};

inline int cmd_build(const BuildArgs &a, const Globals &g, std::ostream &out) {
    const Json cfg = load_config(g);
    NoonSpec spec;
    spec.n = a.n;
    spec.n_max = a.n_max.value_or(noonsim::detail::get_or(cfg, "n_max", kDefaultMaxPhotons));
    if (a.basis == "circular") {
        spec.basis = NoonBasis::circular;
    } else if (a.basis != "linear") {
        throw FormatError("basis must be linear or circular");
    }
    const StateVector target = build_noon_target(spec);
    Json j{{"n", a.n}, {"basis", a.basis}, {"target", to_json(target)}};
    if (a.chain || a.n == 3) {
        if (a.n != 3) {
            throw FormatError("the optical chain prepares the three-photon state only");
        }
        ChainConfig chain = cfg.contains("chain") ? chain_config_from_json(cfg.at("chain")) : ChainConfig{};
        chain.n_max = std::max(chain.n_max, spec.n_max);
        ChainResult result;
        if (cfg.contains("circuit")) {
            const Json &c = cfg.at("circuit");
            result = run_circuit(circuit_from_json(c.is_string() ? read_json_file(c.get<std::string>()) : c),
                                 dc_pair_input(chain.n_max));
        } else {
            result = run_paper_chain(0.0, chain);
        }
        Json cj = to_json(result, a.chain);
        cj["fidelity_to_target"] = fidelity_up_to_global_phase(result.state, build_noon_target({3, std::nullopt, NoonBasis::linear_hv, result.state.n_max()}));
        cj["reference_success_probability"] = reference_success_probability();
        j["chain"] = cj;
    }
    emit(g, dump(j), out);
    return kOk;
}

// -- scan -------------------------------------------------------------------

struct ScanArgs {
    std::string preset;
    bool background = false;
    std::optional<std::string> source;
    std::optional<std::string> pattern;
    std::optional<std::string> detectors;
    std::optional<double> basis_deg;
    std::optional<std::size_t> points;
    std::optional<double> start_deg;
    std::optional<double> stop_deg;
    std::optional<double> interval;
    std::optional<double> scale;
    std::string fit_json;
    std::optional<int> fit_k;
};

inline ScanConfig scan_config(const ScanArgs &a, const Globals &g) {
    const Json cfg = load_config(g);
    ScanConfig sc;
    if (!a.preset.empty()) {
        sc = preset_scan_config(a.preset, reproduce_options(cfg, g), a.background);
    } else {
        if (cfg.contains("chain")) sc.chain = chain_config_from_json(cfg.at("chain"));
        if (cfg.contains("analyzer")) sc.analyzer = analyzer_from_json(cfg.at("analyzer"));
        if (cfg.contains("pattern")) sc.pattern = pattern_from_json(cfg.at("pattern"));
        if (cfg.contains("source")) sc.source = scan_source_from_string(cfg.at("source").get<std::string>());
        sc.scale = noonsim::detail::get_or(cfg, "scale", sc.scale);
        if (cfg.contains("scan")) {
            const Json &s = cfg.at("scan");
            sc.scan.start = degrees(noonsim::detail::get_or(s, "start_deg", 0.0));
            sc.scan.stop = degrees(noonsim::detail::get_or(s, "stop_deg", 360.0));
            sc.scan.count = noonsim::detail::get_or<std::size_t>(s, "count", sc.scan.count);
            sc.scan.interval_s = noonsim::detail::get_or(s, "interval_s", sc.scan.interval_s);
        }
        if (cfg.contains("background")) {
            const Json &b = cfg.at("background");
            if (b.is_string()) {
                const auto rates = b.get<std::string>();
                sc.background = rates == "model" ? preset_scan_config("fig2c", reproduce_options(cfg, g), true).background
                                                 : source_rates_from_json(read_json_file(rates));
            } else {
                sc.background = source_rates_from_json(b);
            }
        } else if (a.background) {
            sc.background = preset_scan_config("fig2c", reproduce_options(cfg, g), true).background;
        }
        sc.scan.rng_seed = g.seed;
    }
    if (a.source) sc.source = scan_source_from_string(*a.source);
    if (a.pattern) {
        const auto p = parse_pair(*a.pattern, "--pattern");
        sc.pattern = {p[0], p[1]};
    }
    if (a.detectors) {
        const auto d = parse_pair(*a.detectors, "--detectors");
        sc.analyzer.detectors_plus = d[0];
        sc.analyzer.detectors_minus = d[1];
    }
    if (a.basis_deg) sc.analyzer.basis_angle = degrees(*a.basis_deg);
    if (a.points) sc.scan.count = *a.points;
    if (a.start_deg) sc.scan.start = degrees(*a.start_deg);
    if (a.stop_deg) sc.scan.stop = degrees(*a.stop_deg);
    if (a.interval) sc.scan.interval_s = *a.interval;
    if (a.scale) sc.scale = *a.scale;
    if (g.seed) sc.scan.rng_seed = g.seed;
    return sc;
}

inline int cmd_scan(const ScanArgs &a, const Globals &g, std::ostream &out) {
    const ScanConfig sc = scan_config(a, g);
    const FringeData data = scan(sc);
    emit(g, to_csv(data), out);
    if (!a.fit_json.empty()) {
        const int k = a.fit_k.value_or(sc.source == ScanSource::noon ? 3 : sc.source == ScanSource::dc_pair ? 2 : 1);
        write_text_file(a.fit_json, dump(to_json(fit_fringe(data, k))));
    }
    return kOk;
}

// -- fit --------------------------------------------------------------------

struct FitArgs {
    std::string input;
    int k = 3;
};

inline int cmd_fit(const FitArgs &a, const Globals &g, std::ostream &out) {
    const FringeData data = fringe_data_from_csv(read_text_file(a.input));
    emit(g, dump(to_json(fit_fringe(data, a.k))), out);
    return kOk;
}

// -- background -------------------------------------------------------------

struct BackgroundArgs {
    std::string rates;
    std::optional<double> calibrate;
    bool uncalibrated = false;
    std::size_t points = 64;
    std::string csv;
};

inline int cmd_background(const BackgroundArgs &a, const Globals &g, std::ostream &out) {
    const Json cfg = load_config(g);
    ReproduceOptions opt = reproduce_options(cfg, g);
    if (a.calibrate) opt.operating_point.accidental_constant = *a.calibrate;
    if (a.uncalibrated) opt.operating_point.accidental_constant.reset();
    Json j = Json::object();
    SourceRates rates;
    if (!a.rates.empty()) {
        rates = source_rates_from_json(read_json_file(a.rates));
    } else if (cfg.contains("background") && cfg.at("background").is_object()) {
        rates = source_rates_from_json(cfg.at("background"));
    } else {
        const SourceModel model(opt.chain);
        const AnalyzerConfig analyzer = cfg.contains("analyzer") ? analyzer_from_json(cfg.at("analyzer")) : AnalyzerConfig{};
        const auto in = calibrate_intensities(model, AnalyzerConfig{}, DetectionPattern{2, 1}, opt.operating_point);
        rates = source_rates(model, analyzer, in, noonsim::detail::get_or(cfg, "interval_s", 30.0));
        j["operating_point"] = to_json(opt.operating_point);
        j["intensities"] = to_json(in);
    }
    rates.validate();
    PhaseScan grid;
    grid.count = a.points;
    grid.validate(4);
    const auto phi = grid.grid();
    std::vector<double> total, two_dc, lo_dc, three_lo;
    for (double p : phi) {
        const auto b = accidental_breakdown(rates, p);
        total.push_back(b.total());
        two_dc.push_back(b.two_dc_pairs);
        lo_dc.push_back(b.two_lo_one_dc_pair);
        three_lo.push_back(b.three_lo);
    }
    const std::set<int> ks{1, 2, 3, 4};
    const auto h = fourier_decompose(phi, total, ks);
    j["rates"] = to_json(rates);
    j["harmonics"] = to_json(h);
    j["channels"] = {{"two_dc_pairs", to_json(fourier_decompose(phi, two_dc, ks))},
                     {"two_lo_one_dc_pair", to_json(fourier_decompose(phi, lo_dc, ks))},
                     {"three_lo", to_json(fourier_decompose(phi, three_lo, ks))}};
    const double a0 = h.amplitude(0), a1 = h.amplitude(1), a2 = h.amplitude(2), a3 = h.amplitude(3);
    j["ordering"] = {{"amp3_lt_amp1", a3 < a1}, {"amp1_lt_amp2", a1 < a2}, {"amp3_lt_amp0", a3 < a0}};
    if (!a.csv.empty()) {
        write_text_file(a.csv, to_csv(accidental_fringe(rates, phi)));
    }
    emit(g, dump(j), out);
    return kOk;
}

// -- reproduce --------------------------------------------------------------

inline Json bundle_json(const ReproductionBundle &b, const std::vector<std::string> &files) {
    Json j{{"preset", b.preset},
           {"description", b.description},
           {"interval_s", b.interval_s},
           {"points", b.data.size()},
           {"analyzer", to_json(b.analyzer)},
           {"pattern", to_json(b.pattern)},
           {"fit", to_json(b.fit)},
           {"harmonics", to_json(b.harmonics)},
           {"intensities", to_json(b.intensities)},
           {"rates", to_json(b.rates)},
           {"files", files}};
    j["seed"] = b.seed ? Json(*b.seed) : Json(nullptr);
    if (b.background_harmonics) {
        j["background_harmonics"] = to_json(*b.background_harmonics);
    }
    return j;
}

inline int cmd_reproduce(const std::string &preset, const Globals &g, std::ostream &out) {
    const Json cfg = load_config(g);
    const ReproductionBundle b = reproduce(preset, reproduce_options(cfg, g));
    const std::filesystem::path dir = g.out.empty() ? std::filesystem::path(".") : std::filesystem::path(g.out);
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) {
        throw std::runtime_error("cannot create output directory '" + dir.string() + "'");
    }
    std::vector<std::string> files{preset + ".csv"};
    write_text_file((dir / files[0]).string(), to_csv(b.data));
    if (b.background) {
        files.push_back(preset + "_background.csv");
        write_text_file((dir / files[1]).string(), to_csv(*b.background));
    }
    files.push_back(preset + ".json");
    write_text_file((dir / files.back()).string(), dump(bundle_json(b, files)));
    char line[160];
    std::snprintf(line, sizeof line, "%s: k=%d visibility=%.6f +- %.6f (%zu points, %.0f s intervals)\n",
                  preset.c_str(), b.fit.k, b.fit.visibility, b.fit.visibility_stderr, b.data.size(), b.interval_s);
    out << line;
    return kOk;
}

} // namespace detail

/// Runs one command. Returns 0 on success, 2 on configuration errors and 3
/// on numeric errors (including aliasing scan grids).
inline int run(int argc, const char *const *argv, std::ostream &out = std::cout, std::ostream &err = std::cerr) {
    CLI::App app{"noonsim: linear-optics NOON-state simulator. Angles are in degrees; phases in output "
                 "files are in radians."};
    app.require_subcommand(1);
    app.fallthrough();
    detail::Globals g;
    app.add_option("--seed", g.seed, "Seed for Poisson sampling (omit for noiseless means)");
    app.add_option("--out", g.out, "Output file (build, scan, fit, background) or directory (reproduce)");
    app.add_option("--config", g.config, "JSON run configuration")->check(CLI::ExistingFile);

    detail::BuildArgs build;
    auto *b = app.add_subcommand("build", "Build the N-photon NOON target and, for N=3, the optical chain");
    b->add_option("--n", build.n, "Photon number N")->capture_default_str();
    b->add_option("--nmax", build.n_max, "Photon-number cap (default 6)");
    b->add_flag("--chain", build.chain, "Include the full chain result with stage log and intermediates");
    b->add_option("--basis", build.basis, "linear (H,V) or circular (L,R)")->capture_default_str();

    detail::ScanArgs sa;
    auto *s = app.add_subcommand("scan", "Scan the phase and write CSV fringe data");
    s->add_option("--preset", sa.preset, "Start from a figure preset (fig2a..fig3b), ideal source only");
    s->add_flag("--background", sa.background, "Add modeled accidental triples");
    s->add_option("--source", sa.source, "noon, lo or dc");
    s->add_option("--pattern", sa.pattern, "Photons on + and - ports, e.g. 2,1");
    s->add_option("--detectors", sa.detectors, "Detectors on + and - ports, e.g. 2,1");
    s->add_option("--basis-deg", sa.basis_deg, "Analyzer + basis angle from vertical, degrees");
    s->add_option("--points", sa.points, "Number of phase points");
    s->add_option("--start-deg", sa.start_deg, "First phase, degrees");
    s->add_option("--stop-deg", sa.stop_deg, "End of the phase range (excluded), degrees");
    s->add_option("--interval", sa.interval, "Counting interval per point, seconds");
    s->add_option("--scale", sa.scale, "Counts per interval for unit coincidence probability");
    s->add_option("--fit-out", sa.fit_json, "Also write a fit of the scanned data to this JSON file");
    s->add_option("--fit-k", sa.fit_k, "Harmonic for --fit-out (default: photon number)");

    detail::FitArgs fa;
    auto *f = app.add_subcommand("fit", "Fit A + B cos(k phi - delta) to CSV fringe data");
    f->add_option("--in", fa.input, "CSV file with columns phi_rad,mean,sampled,sigma")->required()->check(CLI::ExistingFile);
    f->add_option("--k", fa.k, "Harmonic")->capture_default_str();

    detail::BackgroundArgs ba;
    auto *bg = app.add_subcommand("background", "Accidental triples and their harmonic decomposition");
    bg->add_option("--rates", ba.rates, "SourceRates JSON (default: quantum-model operating point)")->check(CLI::ExistingFile);
    bg->add_option("--calibrate", ba.calibrate, "Scale model rates so the constant component equals this (counts per 30 s)");
    bg->add_flag("--uncalibrated", ba.uncalibrated, "Use the model rates without calibration");
    bg->add_option("--points", ba.points, "Phase grid size")->capture_default_str();
    bg->add_option("--csv", ba.csv, "Also write the accidental fringe as CSV");

    std::string preset;
    auto *r = app.add_subcommand("reproduce", "Reproduce a figure preset into the --out directory");
    r->add_option("preset", preset, "fig2a, fig2b, fig2c, fig2d, fig3a or fig3b")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp &e) {
        out << app.help();
        return kOk;
    } catch (const CLI::CallForAllHelp &e) {
        out << app.help("", CLI::AppFormatMode::All);
        return kOk;
    } catch (const CLI::ParseError &e) {
        err << "error: " << e.what() << "\n";
        return kConfigError;
    }

    try {
        if (b->parsed()) return detail::cmd_build(build, g, out);
        if (s->parsed()) return detail::cmd_scan(sa, g, out);
        if (f->parsed()) return detail::cmd_fit(fa, g, out);
        if (bg->parsed()) return detail::cmd_background(ba, g, out);
        return detail::cmd_reproduce(preset, g, out);
    } catch (const NumericError &e) {
        err << "numeric error: " << e.what() << "\n";
        return kNumericError;
    } catch (const std::exception &e) {
        err << "error: " << e.what() << "\n";
        return kConfigError;
    }
}

} // namespace noonsim::cli
