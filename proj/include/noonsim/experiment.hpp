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

// Phase scans, seeded Poisson sampling, cosine fringe fits, the source-rate
// model of the DC and LO sources and the figure reproduction presets.

#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <random>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "noonsim/background.hpp"
#include "noonsim/construction.hpp"
#include "noonsim/detection.hpp"
#include "noonsim/elements.hpp"
#include "noonsim/fock.hpp"
#include "noonsim/harmonics.hpp"

namespace noonsim {

/// Uniform grid phi_i = start + i (stop - start) / count, i < count; `stop`
/// itself is excluded so that [0, 2 pi) grids cover whole periods.
struct PhaseScan {
    double start = 0.0;
    double stop = 2.0 * kPi;
    std::size_t count = 60;
    double interval_s = 30.0;
    std::optional<std::uint64_t> rng_seed;

    std::vector<double> grid() const {
        if (count < 1 || !(stop > start)) {
            throw std::invalid_argument("phase scan needs count >= 1 and stop > start");
        }
        std::vector<double> phi(count);
        const double step = (stop - start) / static_cast<double>(count);
        for (std::size_t i = 0; i < count; ++i) {
            phi[i] = start + step * static_cast<double>(i);
        }
        return phi;
    }

    void validate(int highest_harmonic) const {
        if (!(interval_s > 0.0)) {
            throw std::invalid_argument("counting interval must be positive");
        }
        if (count < static_cast<std::size_t>(2 * highest_harmonic + 1)) {
            throw NumericError("phase scan with " + std::to_string(count) + " points aliases harmonic " +
                               std::to_string(highest_harmonic));
        }
        check_uniform_grid(grid(), {highest_harmonic});
    }
};

// ---------------------------------------------------------------------------
// Sampling

/// SplitMix64 finalizer.
inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

/// Independent stream for scan point `index`; serial and parallel scans agree.
inline std::mt19937_64 point_stream(std::uint64_t seed, std::uint64_t index) {
    return std::mt19937_64(splitmix64(splitmix64(seed) ^ (index + 1)));
}

/// Uniform double in [0, 1) from the top 53 bits.
inline double uniform01(std::mt19937_64 &rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

/// Poisson variate: sequential-search inversion for mean < 30, otherwise
/// Hormann's transformed rejection with squeeze (PTRS).
inline long long sample_poisson(double mean, std::mt19937_64 &rng) {
    if (!(mean >= 0.0) || !std::isfinite(mean)) {
        throw std::invalid_argument("Poisson mean must be finite and non-negative");
    }
    if (mean == 0.0) {
        return 0;
    }
    if (mean < 30.0) {
        const double u = uniform01(rng);
        double p = std::exp(-mean);
        double cdf = p;
        long long k = 0;
        while (u > cdf && k < 1000) {
            ++k;
            p *= mean / static_cast<double>(k);
            cdf += p;
        }
        return k;
    }
    const double smu = std::sqrt(mean);
    const double b = 0.931 + 2.53 * smu;
    const double a = -0.059 + 0.02483 * b;
    const double inv_alpha = 1.1239 + 1.1328 / (b - 3.4);
    const double vr = 0.9277 - 3.6224 / (b - 2.0);
    const double log_mean = std::log(mean);
    while (true) {
        const double u = uniform01(rng) - 0.5;
        const double v = uniform01(rng);
        const double us = 0.5 - std::abs(u);
        const double k = std::floor((2.0 * a / us + b) * u + mean + 0.43);
        if (us >= 0.07 && v <= vr) {
            return static_cast<long long>(k);
        }
        if (k < 0.0 || (us < 0.013 && v > us)) {
            continue;
        }
        if (std::log(v * inv_alpha / (a / (us * us) + b)) <= -mean + k * log_mean - std::lgamma(k + 1.0)) {
            return static_cast<long long>(k);
        }
    }
}

/// Fills sampled counts and sigma = sqrt(counts) when `seed` is set, else
/// sigma = sqrt(mean).
inline void sample_counts(FringeData &data, std::optional<std::uint64_t> seed) {
    data.sigma.assign(data.size(), 0.0);
    if (!seed) {
        data.sampled.reset();
        for (std::size_t i = 0; i < data.size(); ++i) {
            data.sigma[i] = std::sqrt(std::max(0.0, data.mean[i]));
        }
        return;
    }
    std::vector<long long> counts(data.size());
    for (std::size_t i = 0; i < data.size(); ++i) {
        auto rng = point_stream(*seed, i);
        counts[i] = sample_poisson(std::max(0.0, data.mean[i]), rng);
        data.sigma[i] = std::sqrt(static_cast<double>(counts[i]));
    }
    data.sampled = std::move(counts);
}

// ---------------------------------------------------------------------------
// Fitting

/// y = A + B cos(k phi - delta); visibility = B / A.
struct FringeFit {
    int k = 1;
    double A = 0.0;
    double B = 0.0;
    double delta = 0.0;
    double visibility = 0.0;
    double residual = 0.0;
    double visibility_stderr = 0.0;
    /// Normal equations were rank deficient; only A is meaningful.
    bool singular = false;
    /// A <= 0 or visibility > 1.
    bool pathological = false;

    double evaluate(double phi) const { return A + B * std::cos(k * phi - delta); }
};

/// Linear least squares on {1, cos k phi, sin k phi}. Uses sampled counts when
/// present. The visibility standard error propagates the per-point sigma
/// (or the residual variance when sigma is all zero) by the delta method.
inline FringeFit fit_fringe(const FringeData &data, int k) {
    data.validate();
    if (data.size() == 0) {
        throw std::invalid_argument("cannot fit empty fringe data");
    }
    if (k < 1) {
        throw std::invalid_argument("fit harmonic must be at least 1");
    }
    const auto values = data.values();
    const auto n = static_cast<Eigen::Index>(data.size());
    Eigen::MatrixXd x(n, 3);
    Eigen::VectorXd y(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        const double p = data.phi[static_cast<std::size_t>(i)];
        x(i, 0) = 1.0;
        x(i, 1) = std::cos(k * p);
        x(i, 2) = std::sin(k * p);
        y(i) = values[static_cast<std::size_t>(i)];
    }

    FringeFit fit;
    fit.k = k;
    const Eigen::Matrix3d normal = x.transpose() * x;
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(x);
    qr.setThreshold(1e-10);
    if (qr.rank() < 3) {
        fit.singular = true;
        fit.A = y.mean();
        fit.residual = (y.array() - fit.A).matrix().norm();
        fit.pathological = !(fit.A > 0.0);
        return fit;
    }
    const Eigen::Vector3d beta = qr.solve(y);
    const double c = beta(1);
    const double s = beta(2);
    fit.A = beta(0);
    fit.B = std::hypot(c, s);
    fit.delta = std::atan2(s, c);
    fit.residual = (y - x * beta).norm();
    fit.visibility = fit.B / fit.A;
    fit.pathological = !(fit.A > 0.0) || fit.visibility > 1.0;

    const Eigen::Matrix3d inv = normal.inverse();
    Eigen::Matrix3d cov;
    const double sigma_sq = Eigen::Map<const Eigen::VectorXd>(data.sigma.data(), n).squaredNorm();
    if (sigma_sq > 0.0) {
        Eigen::MatrixXd weighted = x;
        for (Eigen::Index i = 0; i < n; ++i) {
            weighted.row(i) *= data.sigma[static_cast<std::size_t>(i)];
        }
        cov = inv * (weighted.transpose() * weighted) * inv;
    } else {
        const double dof = std::max<double>(1.0, static_cast<double>(n) - 3.0);
        cov = inv * (fit.residual * fit.residual / dof);
    }
    const double cd = fit.B > 0.0 ? c / fit.B : 1.0;
    const double sd = fit.B > 0.0 ? s / fit.B : 0.0;
    const Eigen::Vector3d grad(-fit.B / (fit.A * fit.A), cd / fit.A, sd / fit.A);
    fit.visibility_stderr = std::sqrt(std::max(0.0, grad.dot(cov * grad)));
    return fit;
}

// ---------------------------------------------------------------------------
// Source states at the analyzer

/// Quantum states reaching the analyzer as functions of the scanned phase.
/// All share the chain's phase origin, so phi = 0 is the NOON operating point.
class SourceModel {
public:
    explicit SourceModel(const ChainConfig &cfg = {}) : cfg_(cfg) {
        ChainResult chain = run_paper_chain(0.0, cfg);
        origin_ = chain.phase_origin.value_or(cfg.phase_origin.value_or(0.0));
        success_ = chain.success_probability;
        const StateVector *qwp_out = chain.intermediate("qwp");
        const StateVector *pair = chain.intermediate("dc_pair_after_partial_polarizer");
        if (!qwp_out || !pair) {
            throw NumericError("chain did not record the expected intermediates");
        }
        noon_ = *qwp_out;
        dc_ = apply_mode_transform(pair->normalized(), qwp(cfg.qwp_theta));
        StateVector lo = make_vacuum(polarization_modes(), cfg.n_max);
        lo_ = apply_mode_transform(create_linear(lo, cfg.lo_polarization), qwp(cfg.qwp_theta));
    }

    StateVector noon(double phi) const { return shifted(noon_, phi); }
    StateVector dc_pair(double phi) const { return shifted(dc_, phi); }
    StateVector lo_photon(double phi) const { return shifted(lo_, phi); }

    double phase_origin() const { return origin_; }
    double success_probability() const { return success_; }
    const ChainConfig &config() const { return cfg_; }

private:
    StateVector shifted(const StateVector &s, double phi) const {
        return apply_mode_transform(s, phase_shift(phi + origin_));
    }

    ChainConfig cfg_;
    double origin_ = 0.0;
    double success_ = 0.0;
    StateVector noon_ = make_vacuum(polarization_modes());
    StateVector dc_ = make_vacuum(polarization_modes());
    StateVector lo_ = make_vacuum(polarization_modes());
};

enum class ScanSource { noon, lo_photon, dc_pair };

inline std::string to_string(ScanSource s) {
    switch (s) {
    case ScanSource::noon: return "noon";
    case ScanSource::lo_photon: return "lo";
    case ScanSource::dc_pair: return "dc";
    }
    return "noon";
}

inline ScanSource scan_source_from_string(const std::string &name) {
    if (name == "noon") return ScanSource::noon;
    if (name == "lo") return ScanSource::lo_photon;
    if (name == "dc") return ScanSource::dc_pair;
    throw std::invalid_argument("unknown scan source '" + name + "' (expected noon, lo or dc)");
}

struct ScanConfig {
    ChainConfig chain;
    AnalyzerConfig analyzer;
    DetectionPattern pattern{2, 1};
    ScanSource source = ScanSource::noon;
    PhaseScan scan;
    /// Counts per interval for unit coincidence probability.
    double scale = 1.0;
    std::optional<SourceRates> background;
};

/// mean(phi) = coincidence_rate(phi) * scale (+ accidental triples), sampled
/// per point when the scan carries a seed.
inline FringeData scan(const ScanConfig &cfg) {
    cfg.analyzer.validate();
    if (!(cfg.scale >= 0.0)) {
        throw std::invalid_argument("scan scale must be non-negative");
    }
    const int photons = cfg.source == ScanSource::noon ? 3 : cfg.source == ScanSource::dc_pair ? 2 : 1;
    if (cfg.pattern.total() != photons) {
        throw std::invalid_argument("pattern must account for all " + std::to_string(photons) + " photons");
    }
    int highest = photons;
    if (cfg.background) {
        cfg.background->validate();
        highest = std::max(highest, 4);
    }
    cfg.scan.validate(highest);
    SourceModel model(cfg.chain);
    FringeData data;
    data.phi = cfg.scan.grid();
    for (double p : data.phi) {
        const StateVector s = cfg.source == ScanSource::noon      ? model.noon(p)
                              : cfg.source == ScanSource::dc_pair ? model.dc_pair(p)
                                                                  : model.lo_photon(p);
        double m = coincidence_rate(s, cfg.analyzer, cfg.pattern) * cfg.scale;
        if (cfg.background) {
            SourceRates rates = *cfg.background;
            rates.interval_s = cfg.scan.interval_s;
            m += accidental_triples(rates, p);
        }
        data.mean.push_back(m);
    }
    sample_counts(data, cfg.scan.rng_seed);
    return data;
}

// ---------------------------------------------------------------------------
// Source rates from the quantum model

/// Detected-rate ratios at the operating point.
struct OperatingPoint {
    double singles_lo_to_dc = 10.0;
    double doubles_dc_to_lo = 5.0;
    double signal_to_accidental = 2.0;
    /// Mean accidental triples per 30 s interval; uncalibrated when unset.
    std::optional<double> accidental_constant = 22.0;
    double pulse_period_s = 12.5e-9;
};

/// Absolute intensities, in events per second: LO photons and DC pairs
/// reaching the analyzer, a uniform calibration factor on every measured
/// rate, and the triple-signal rate for unit coincidence probability.
struct SourceIntensities {
    double lo_rate = 0.0;
    double dc_rate = 0.0;
    double calibration = 1.0;
    double signal_rate = 0.0;
    double pulse_period_s = 12.5e-9;
};

namespace detail {

constexpr std::array<std::array<std::uint32_t, 2>, 3> kDetectorPairs{{{0, 1}, {0, 2}, {1, 2}}};

inline std::size_t source_grid_size() { return 64; }

} // namespace detail

/// Per-detector singles and per-pair doubles of the LO and DC sources alone,
/// with fringe shapes from the ideal quantum model. LO doubles follow Poisson
/// statistics of the coherent state (S_i S_j tau). Needs three detectors.
inline SourceRates source_rates(const SourceModel &model, const AnalyzerConfig &analyzer,
                                const SourceIntensities &intensities, double interval_s) {
    analyzer.validate();
    if (analyzer.total_detectors() != 3) {
        throw std::invalid_argument("source rates are defined for three detectors");
    }
    const std::vector<double> phi = full_period_grid(detail::source_grid_size());
    const std::set<int> harmonics{1, 2, 3, 4};
    const double tau = intensities.pulse_period_s;
    std::array<std::vector<double>, 3> lo_s, dc_s, lo_d, dc_d;
    for (double p : phi) {
        const auto lo = click_distribution(model.lo_photon(p), analyzer);
        const auto dc = click_distribution(model.dc_pair(p), analyzer);
        std::array<double, 3> lo_single{};
        for (std::size_t k = 0; k < 3; ++k) {
            lo_single[k] = intensities.lo_rate * click_probability(lo, 1u << k);
            lo_s[k].push_back(lo_single[k]);
            dc_s[k].push_back(intensities.dc_rate * click_probability(dc, 1u << k));
        }
        for (std::size_t j = 0; j < 3; ++j) {
            const auto [a, b] = detail::kDetectorPairs[j];
            lo_d[j].push_back(lo_single[a] * lo_single[b] * tau);
            dc_d[j].push_back(intensities.dc_rate * click_probability(dc, (1u << a) | (1u << b)));
        }
    }
    auto fringe = [&](const std::vector<double> &y) {
        return Fringe::from_harmonics(fourier_decompose(phi, y, harmonics)).scaled(intensities.calibration);
    };
    SourceRates rates;
    rates.pulse_period_s = tau;
    rates.interval_s = interval_s;
    for (std::size_t k = 0; k < 3; ++k) {
        rates.lo.singles[k] = fringe(lo_s[k]);
        rates.dc.singles[k] = fringe(dc_s[k]);
        rates.lo.doubles[k] = fringe(lo_d[k]);
        rates.dc.doubles[k] = fringe(dc_d[k]);
    }
    return rates;
}

namespace detail {

inline double mean_total(const std::array<Fringe, 3> &fringes) {
    double s = 0.0;
    for (const auto &f : fringes) {
        s += f.offset;
    }
    return s;
}

inline AccidentalBreakdown mean_breakdown(const SourceRates &rates) {
    const auto phi = full_period_grid(detail::source_grid_size());
    AccidentalBreakdown m;
    for (double p : phi) {
        const auto b = accidental_breakdown(rates, p);
        m.two_dc_pairs += b.two_dc_pairs;
        m.two_lo_one_dc_pair += b.two_lo_one_dc_pair;
        m.three_lo += b.three_lo;
    }
    const double n = static_cast<double>(phi.size());
    m.two_dc_pairs /= n;
    m.two_lo_one_dc_pair /= n;
    m.three_lo /= n;
    return m;
}

inline double mean_accidental(const SourceRates &rates) { return mean_breakdown(rates).total(); }

} // namespace detail

/// Solves the LO and DC intensities from the singles and doubles ratios
/// (summed over detectors, averaged over phase), scales every measured rate
/// so the mean accidental triples per 30 s hit the requested constant, and
/// sets the signal so that mean signal / mean accidental has the requested
/// ratio for `pattern` on `analyzer`.
inline SourceIntensities calibrate_intensities(const SourceModel &model, const AnalyzerConfig &analyzer,
                                               const DetectionPattern &pattern, const OperatingPoint &op = {}) {
    if (!(op.singles_lo_to_dc > 0.0) || !(op.doubles_dc_to_lo > 0.0) || !(op.signal_to_accidental >= 0.0) ||
        !(op.pulse_period_s > 0.0)) {
        throw std::invalid_argument("operating-point ratios and pulse period must be positive");
    }
    SourceIntensities unit;
    unit.lo_rate = 1.0;
    unit.dc_rate = 1.0;
    unit.pulse_period_s = op.pulse_period_s;
    const SourceRates shapes = source_rates(model, analyzer, unit, 30.0);
    const double a1 = detail::mean_total(shapes.lo.singles);
    const double b1 = detail::mean_total(shapes.dc.singles);
    const double a2 = detail::mean_total(shapes.lo.doubles);
    const double b2 = detail::mean_total(shapes.dc.doubles);
    if (a1 <= 0.0 || b1 <= 0.0 || a2 <= 0.0 || b2 <= 0.0) {
        throw NumericError("analyzer sees no singles or doubles from one of the sources");
    }
    // lo a1 = r1 dc b1 and dc b2 = r2 lo^2 a2.
    SourceIntensities out = unit;
    out.dc_rate = b2 * a1 * a1 / (op.doubles_dc_to_lo * op.singles_lo_to_dc * op.singles_lo_to_dc * b1 * b1 * a2);
    out.lo_rate = op.singles_lo_to_dc * out.dc_rate * b1 / a1;
    if (op.accidental_constant) {
        if (!(*op.accidental_constant > 0.0)) {
            throw std::invalid_argument("accidental constant must be positive");
        }
        // Double x single channels scale as c^2, the three-LO channel as c^3.
        const auto mean = detail::mean_breakdown(source_rates(model, analyzer, out, 30.0));
        const double quadratic = mean.two_dc_pairs + mean.two_lo_one_dc_pair;
        const double cubic = mean.three_lo;
        auto f = [&](double c) { return quadratic * c * c + cubic * c * c * c - *op.accidental_constant; };
        double lo = 0.0;
        double hi = 1.0;
        while (f(hi) < 0.0) {
            hi *= 2.0;
        }
        for (int i = 0; i < 200 && hi - lo > 1e-15 * hi; ++i) {
            const double mid = 0.5 * (lo + hi);
            (f(mid) < 0.0 ? lo : hi) = mid;
        }
        out.calibration = 0.5 * (lo + hi);
    }
    const SourceRates rates = source_rates(model, analyzer, out, 30.0);
    const double accidental = detail::mean_accidental(rates) / 30.0;
    double signal = 0.0;
    const auto phi = full_period_grid(detail::source_grid_size());
    for (double p : phi) {
        signal += coincidence_rate(model.noon(p), analyzer, pattern);
    }
    signal /= static_cast<double>(phi.size());
    if (signal <= 0.0) {
        throw NumericError("pattern has zero signal on this analyzer");
    }
    out.signal_rate = op.signal_to_accidental * accidental / signal;
    return out;
}

// ---------------------------------------------------------------------------
// Figure reproduction

struct ReproductionBundle {
    std::string preset;
    std::string description;
    double interval_s = 30.0;
    AnalyzerConfig analyzer;
    DetectionPattern pattern;
    std::optional<std::uint64_t> seed;
    FringeData data;
    FringeFit fit;
    HarmonicDecomposition harmonics;
    std::optional<FringeData> background;
    std::optional<HarmonicDecomposition> background_harmonics;
    SourceRates rates;
    SourceIntensities intensities;
};

inline const std::vector<std::string> &preset_names() {
    static const std::vector<std::string> names{"fig2a", "fig2b", "fig2c", "fig2d", "fig3a", "fig3b"};
    return names;
}

struct ReproduceOptions {
    std::optional<std::uint64_t> seed;
    ChainConfig chain;
    OperatingPoint operating_point;
    std::size_t points = 60;
    /// Fractional systematic uncertainty of the background model.
    double background_systematic = 1.0 / 22.0;
};

namespace detail {

inline FringeData fringe_from(const std::vector<double> &phi, const std::function<double(double)> &rate) {
    FringeData d;
    d.phi = phi;
    for (double p : phi) {
        d.mean.push_back(rate(p));
    }
    return d;
}

inline HarmonicDecomposition decompose_means(const FringeData &d) {
    return fourier_decompose(d.phi, d.mean, {1, 2, 3, 4});
}

inline void check_preset(const std::string &preset) {
    const auto &names = preset_names();
    if (std::find(names.begin(), names.end(), preset) == names.end()) {
        std::string list;
        for (const auto &n : names) {
            list += (list.empty() ? "" : ", ") + n;
        }
        throw std::invalid_argument("unknown preset '" + preset + "'; valid presets: " + list);
    }
}

} // namespace detail

/// Scan configuration for the ideal source behind a figure preset: the LO
/// photon for singles, the DC pair for doubles and the NOON state for
/// triples, scaled by the calibrated intensity over the preset's interval.
/// With `with_background` the three-photon presets add the accidental model.
inline ScanConfig preset_scan_config(const std::string &preset, const ReproduceOptions &opt = {},
                                     bool with_background = false) {
    detail::check_preset(preset);
    const bool fig3 = preset.rfind("fig3", 0) == 0;
    const SourceModel model(opt.chain);
    const AnalyzerConfig fig2_analyzer{degrees(45.0), 2, 1, 1.0};
    const SourceIntensities in = calibrate_intensities(model, fig2_analyzer, DetectionPattern{2, 1}, opt.operating_point);

    ScanConfig cfg;
    cfg.chain = opt.chain;
    cfg.analyzer = fig3 ? AnalyzerConfig{degrees(45.0), 3, 0, 1.0} : fig2_analyzer;
    cfg.scan.count = opt.points;
    cfg.scan.interval_s = fig3 ? 300.0 : 30.0;
    cfg.scan.rng_seed = opt.seed;
    const double t = cfg.scan.interval_s;
    if (preset == "fig2a" || preset == "fig3a") {
        cfg.source = ScanSource::lo_photon;
        cfg.pattern = fig3 ? DetectionPattern{1, 0} : DetectionPattern{0, 1};
        cfg.scale = in.lo_rate * in.calibration * t;
    } else if (preset == "fig2b") {
        cfg.source = ScanSource::dc_pair;
        cfg.pattern = DetectionPattern{1, 1};
        cfg.scale = in.dc_rate * in.calibration * t;
    } else {
        cfg.source = ScanSource::noon;
        cfg.pattern = fig3 ? DetectionPattern{3, 0} : DetectionPattern{2, 1};
        cfg.scale = in.signal_rate * t;
    }
    if (with_background) {
        if (cfg.source != ScanSource::noon) {
            throw std::invalid_argument("accidental background applies to the three-photon presets only");
        }
        cfg.background = source_rates(model, cfg.analyzer, in, t);
    }
    return cfg;
}

/// Figure presets. Figure 2 uses detectors (2 on +45, 1 on -45) and 30 s
/// intervals; figure 3 uses three detectors on +45 and 300 s intervals. Both
/// share source intensities calibrated on the figure 2 configuration.
inline ReproductionBundle reproduce(const std::string &preset, const ReproduceOptions &opt = {}) {
    detail::check_preset(preset);
    const bool fig3 = preset.rfind("fig3", 0) == 0;
    const SourceModel model(opt.chain);
    const AnalyzerConfig fig2_analyzer{degrees(45.0), 2, 1, 1.0};
    const SourceIntensities intensities =
        calibrate_intensities(model, fig2_analyzer, DetectionPattern{2, 1}, opt.operating_point);

    ReproductionBundle b;
    b.preset = preset;
    b.seed = opt.seed;
    b.intensities = intensities;
    b.interval_s = fig3 ? 300.0 : 30.0;
    b.analyzer = fig3 ? AnalyzerConfig{degrees(45.0), 3, 0, 1.0} : fig2_analyzer;
    b.pattern = fig3 ? DetectionPattern{3, 0} : DetectionPattern{2, 1};
    b.rates = source_rates(model, b.analyzer, intensities, b.interval_s);
    const SourceRates &rates = b.rates;
    const double t = b.interval_s;

    PhaseScan grid;
    grid.count = opt.points;
    grid.interval_s = t;
    grid.validate(4);
    const auto phi = grid.grid();

    auto triples = [&](double p) {
        return intensities.signal_rate * t * coincidence_rate(model.noon(p), b.analyzer, b.pattern) +
               accidental_triples(rates, p);
    };

    if (preset == "fig2a" || preset == "fig3a") {
        const std::size_t det = fig3 ? 0 : 2;
        b.description = fig3 ? "singles on one +45 detector" : "singles on the -45 detector";
        b.data = detail::fringe_from(phi, [&](double p) { return t * (rates.lo.singles[det](p) + rates.dc.singles[det](p)); });
        sample_counts(b.data, opt.seed);
        b.fit = fit_fringe(b.data, 1);
    } else if (preset == "fig2b") {
        b.description = "two-fold coincidences between a +45 and the -45 detector";
        b.pattern = DetectionPattern{1, 1};
        b.data = detail::fringe_from(phi, [&](double p) { return t * (rates.dc.doubles[1](p) + rates.lo.doubles[1](p)); });
        sample_counts(b.data, opt.seed);
        b.fit = fit_fringe(b.data, 2);
    } else {
        const bool subtracted = preset == "fig2d" || preset == "fig3b";
        b.description = fig3 ? "three-fold coincidences of |3,0> after background subtraction"
                        : subtracted ? "three-fold coincidences of |2,1> after background subtraction"
                                     : "three-fold coincidences of |2,1>";
        FringeData total = detail::fringe_from(phi, triples);
        sample_counts(total, opt.seed);
        FringeData bg = accidental_fringe(rates, phi, opt.background_systematic);
        b.background_harmonics = detail::decompose_means(bg);
        b.data = subtracted ? subtract_background(total, bg) : total;
        b.background = std::move(bg);
        b.fit = fit_fringe(b.data, 3);
    }
    b.harmonics = detail::decompose_means(b.data);
    return b;
}

} // namespace noonsim
