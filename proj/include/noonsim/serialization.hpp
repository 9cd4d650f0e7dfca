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

// JSON and CSV formats for states, circuits, chain results, analyzer and
// source-rate configurations, fits and fringe data.

#pragma once

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

#include "noonsim/background.hpp"
#include "noonsim/circuit.hpp"
#include "noonsim/construction.hpp"
#include "noonsim/detection.hpp"
#include "noonsim/experiment.hpp"
#include "noonsim/fock.hpp"
#include "noonsim/harmonics.hpp"

namespace noonsim {

using Json = nlohmann::json;

/// Malformed or inconsistent input file.
class FormatError : public std::invalid_argument {
  public:
    using std::invalid_argument::invalid_argument;
};

namespace detail {

inline const Json &require(const Json &j, const char *key) {
    if (!j.is_object() || !j.contains(key)) {
        throw FormatError(std::string("missing field '") + key + "'");
    }
    return j.at(key);
}

template <class T>
T get(const Json &j, const char *key) {
    try {
        return require(j, key).get<T>();
    } catch (const Json::exception &e) {
        throw FormatError(std::string("field '") + key + "': " + e.what());
    }
}

template <class T>
T get_or(const Json &j, const char *key, T fallback) {
    return j.is_object() && j.contains(key) ? get<T>(j, key) : fallback;
}

} // namespace detail

// ---------------------------------------------------------------------------
// States

inline Json to_json(const StateVector &s) {
    Json amps = Json::array();
    for (const auto &[occ, a] : s.amplitudes()) {
        amps.push_back({{"occ", occ.counts()}, {"re", a.real()}, {"im", a.imag()}});
    }
    return {{"modes", s.modes().names()}, {"n_max", s.n_max()}, {"amplitudes", amps}};
}

inline StateVector state_from_json(const Json &j) {
    const auto names = detail::get<std::vector<std::string>>(j, "modes");
    const ModeSet modes(names);
    StateVector::Amplitudes amps;
    for (const auto &a : detail::require(j, "amplitudes")) {
        Occupation occ(detail::get<std::vector<int>>(a, "occ"));
        if (amps.count(occ)) {
            throw FormatError("duplicate occupation in amplitudes");
        }
        amps[occ] = Complex(detail::get<double>(a, "re"), detail::get<double>(a, "im"));
    }
    return StateVector(modes, detail::get<int>(j, "n_max"), std::move(amps));
}

// ---------------------------------------------------------------------------
// Circuits

inline Json to_json(const CircuitElement &e) {
    Json j{{"kind", to_string(e.kind)}};
    for (const auto &[name, value] : e.params) {
        if (is_angle_parameter(name)) {
            j[name + "_deg"] = to_degrees(value);
        } else {
            j[name] = value;
        }
    }
    if (e.scanned) {
        j[*e.scanned] = "scan";
    }
    if (e.auto_origin) {
        j["origin"] = "auto";
    }
    return j;
}

inline Json to_json(const Circuit &c) {
    Json arr = Json::array();
    for (const auto &e : c.elements()) {
        arr.push_back(to_json(e));
    }
    return arr;
}

inline CircuitElement element_from_json(const Json &j) {
    CircuitElement e;
    e.kind = element_kind_from_string(detail::get<std::string>(j, "kind"));
    const auto required = required_parameters(e.kind);
    for (const auto &[key, value] : j.items()) {
        if (key == "kind") {
            continue;
        }
        if (key == "origin") {
            if (value != "auto") {
                throw FormatError("origin must be \"auto\"");
            }
            e.auto_origin = true;
            continue;
        }
        const bool deg = key.size() > 4 && key.ends_with("_deg");
        const std::string name = deg ? key.substr(0, key.size() - 4) : key;
        if (std::find(required.begin(), required.end(), name) == required.end()) {
            throw FormatError("unexpected field '" + key + "' for " + to_string(e.kind));
        }
        if (value.is_string()) {
            if (value != "scan" || deg) {
                throw FormatError("field '" + key + "' must be a number or \"scan\"");
            }
            e.scanned = name;
            continue;
        }
        if (!value.is_number()) {
            throw FormatError("field '" + key + "' must be a number");
        }
        if (is_angle_parameter(name) != deg) {
            throw FormatError(deg ? "'" + name + "' is not an angle" : "angle '" + name + "' must be given as " + name + "_deg");
        }
        e.params[name] = deg ? degrees(value.get<double>()) : value.get<double>();
    }
    return e;
}

inline Circuit circuit_from_json(const Json &j) {
    if (!j.is_array()) {
        throw FormatError("circuit must be a JSON array of element records");
    }
    std::vector<CircuitElement> elements;
    for (const auto &e : j) {
        elements.push_back(element_from_json(e));
    }
    try {
        return Circuit(std::move(elements));
    } catch (const std::invalid_argument &e) {
        throw FormatError(e.what());
    }
}

// ---------------------------------------------------------------------------
// Chain

inline Json to_json(const ChainConfig &c) {
    Json j{{"hwp_deg", to_degrees(c.hwp_theta)}, {"pp_tH", c.pp_t_h},
           {"pp_tV", c.pp_t_v},                  {"interfaces", c.interfaces},
           {"lo_deg", to_degrees(c.lo_polarization)}, {"qwp_deg", to_degrees(c.qwp_theta)},
           {"n_max", c.n_max}};
    j["phase_origin_deg"] = c.phase_origin ? Json(to_degrees(*c.phase_origin)) : Json("auto");
    return j;
}

inline ChainConfig chain_config_from_json(const Json &j) {
    ChainConfig c;
    c.hwp_theta = degrees(detail::get_or(j, "hwp_deg", to_degrees(c.hwp_theta)));
    c.pp_t_h = detail::get_or(j, "pp_tH", c.pp_t_h);
    c.pp_t_v = detail::get_or(j, "pp_tV", c.pp_t_v);
    c.interfaces = detail::get_or(j, "interfaces", c.interfaces);
    c.lo_polarization = degrees(detail::get_or(j, "lo_deg", to_degrees(c.lo_polarization)));
    c.qwp_theta = degrees(detail::get_or(j, "qwp_deg", to_degrees(c.qwp_theta)));
    c.n_max = detail::get_or(j, "n_max", c.n_max);
    if (j.is_object() && j.contains("phase_origin_deg") && j.at("phase_origin_deg") != "auto") {
        c.phase_origin = degrees(detail::get<double>(j, "phase_origin_deg"));
    }
    return c;
}

inline Json to_json(const ChainResult &r, bool with_intermediates = true) {
    Json log = Json::array();
    for (const auto &s : r.stage_log) {
        log.push_back({{"stage", s.label}, {"success_probability", s.success_probability}});
    }
    Json j{{"state", to_json(r.state)},
           {"success_probability", r.success_probability},
           {"stage_log", log},
           {"scan_value_rad", r.scan_value}};
    if (r.phase_origin) {
        j["phase_origin_rad"] = *r.phase_origin;
    }
    if (with_intermediates) {
        Json inter = Json::array();
        for (const auto &[label, s] : r.intermediates) {
            inter.push_back({{"label", label}, {"state", to_json(s)}});
        }
        j["intermediates"] = inter;
    }
    return j;
}

inline ChainResult chain_result_from_json(const Json &j) {
    ChainResult r;
    r.state = state_from_json(detail::require(j, "state"));
    r.success_probability = detail::get<double>(j, "success_probability");
    for (const auto &s : detail::require(j, "stage_log")) {
        r.stage_log.push_back({detail::get<std::string>(s, "stage"), detail::get<double>(s, "success_probability")});
    }
    r.scan_value = detail::get_or(j, "scan_value_rad", 0.0);
    if (j.contains("phase_origin_rad")) {
        r.phase_origin = detail::get<double>(j, "phase_origin_rad");
    }
    if (j.contains("intermediates")) {
        for (const auto &i : j.at("intermediates")) {
            r.intermediates.emplace_back(detail::get<std::string>(i, "label"), state_from_json(detail::require(i, "state")));
        }
    }
    return r;
}

// ---------------------------------------------------------------------------
// Analyzer, fringes and source rates

inline Json to_json(const AnalyzerConfig &a) {
    return {{"basis_deg", to_degrees(a.basis_angle)},
            {"detectors", {a.detectors_plus, a.detectors_minus}},
            {"efficiency", a.detector_efficiency}};
}

inline AnalyzerConfig analyzer_from_json(const Json &j) {
    AnalyzerConfig a;
    a.basis_angle = degrees(detail::get_or(j, "basis_deg", 45.0));
    if (j.is_object() && j.contains("detectors")) {
        const auto d = detail::get<std::vector<int>>(j, "detectors");
        if (d.size() != 2) {
            throw FormatError("detectors must be [k_plus, k_minus]");
        }
        a.detectors_plus = d[0];
        a.detectors_minus = d[1];
    }
    a.detector_efficiency = detail::get_or(j, "efficiency", 1.0);
    try {
        a.validate();
    } catch (const std::invalid_argument &e) {
        throw FormatError(e.what());
    }
    return a;
}

inline Json to_json(const DetectionPattern &p) { return Json::array({p.n_plus, p.n_minus}); }

inline DetectionPattern pattern_from_json(const Json &j) {
    std::vector<int> v;
    try {
        v = j.get<std::vector<int>>();
    } catch (const Json::exception &) {
        throw FormatError("pattern must be [n_plus, n_minus]");
    }
    if (v.size() != 2 || v[0] < 0 || v[1] < 0) {
        throw FormatError("pattern must be [n_plus, n_minus] with non-negative counts");
    }
    return {v[0], v[1]};
}

inline Json to_json(const Fringe &f) {
    Json terms = Json::array();
    for (const auto &t : f.terms) {
        terms.push_back({{"harmonic", t.harmonic}, {"amplitude", t.amplitude}, {"phase_rad", t.phase}});
    }
    return {{"offset", f.offset}, {"terms", terms}};
}

namespace detail {

inline double phase_field(const Json &j) {
    if (j.contains("phase_rad")) {
        return get<double>(j, "phase_rad");
    }
    return degrees(get_or(j, "phase_deg", 0.0));
}

} // namespace detail

/// Accepts {offset, terms: [...]} or the single-term shorthand
/// {offset, amplitude, harmonic, phase_deg}.
inline Fringe fringe_from_json(const Json &j) {
    Fringe f;
    f.offset = detail::get<double>(j, "offset");
    if (j.contains("terms")) {
        for (const auto &t : j.at("terms")) {
            f.terms.push_back({detail::get<int>(t, "harmonic"), detail::get<double>(t, "amplitude"), detail::phase_field(t)});
        }
    } else if (j.contains("amplitude")) {
        f.terms.push_back({detail::get_or(j, "harmonic", 1), detail::get<double>(j, "amplitude"), detail::phase_field(j)});
    }
    return f;
}

inline Json to_json(const SourceProfile &p) {
    Json s = Json::array();
    Json d = Json::array();
    for (const auto &f : p.singles) s.push_back(to_json(f));
    for (const auto &f : p.doubles) d.push_back(to_json(f));
    return {{"singles", s}, {"doubles", d}};
}

inline SourceProfile source_profile_from_json(const Json &j) {
    SourceProfile p;
    const auto &s = detail::require(j, "singles");
    const auto &d = detail::require(j, "doubles");
    if (!s.is_array() || s.size() != 3 || !d.is_array() || d.size() != 3) {
        throw FormatError("sources need three singles fringes and three doubles fringes (pairs 01, 02, 12)");
    }
    for (std::size_t k = 0; k < 3; ++k) {
        p.singles[k] = fringe_from_json(s[k]);
        p.doubles[k] = fringe_from_json(d[k]);
    }
    return p;
}

inline Json to_json(const SourceRates &r) {
    return {{"pulse_period_ns", r.pulse_period_s * 1e9},
            {"interval_s", r.interval_s},
            {"sources", {{"LO", to_json(r.lo)}, {"DC", to_json(r.dc)}}}};
}

inline SourceRates source_rates_from_json(const Json &j) {
    SourceRates r;
    r.pulse_period_s = detail::get_or(j, "pulse_period_ns", 12.5) * 1e-9;
    r.interval_s = detail::get_or(j, "interval_s", 30.0);
    const auto &s = detail::require(j, "sources");
    r.lo = source_profile_from_json(detail::require(s, "LO"));
    r.dc = source_profile_from_json(detail::require(s, "DC"));
    try {
        r.validate();
    } catch (const std::invalid_argument &e) {
        throw FormatError(e.what());
    }
    return r;
}

inline Json to_json(const SourceIntensities &i) {
    return {{"lo_rate_per_s", i.lo_rate},
            {"dc_rate_per_s", i.dc_rate},
            {"calibration", i.calibration},
            {"signal_rate_per_s", i.signal_rate},
            {"pulse_period_ns", i.pulse_period_s * 1e9}};
}

inline Json to_json(const OperatingPoint &op) {
    Json j{{"singles_lo_to_dc", op.singles_lo_to_dc},
           {"doubles_dc_to_lo", op.doubles_dc_to_lo},
           {"signal_to_accidental", op.signal_to_accidental},
           {"pulse_period_ns", op.pulse_period_s * 1e9}};
    j["accidental_constant"] = op.accidental_constant ? Json(*op.accidental_constant) : Json(nullptr);
    return j;
}

inline OperatingPoint operating_point_from_json(const Json &j) {
    OperatingPoint op;
    op.singles_lo_to_dc = detail::get_or(j, "singles_lo_to_dc", op.singles_lo_to_dc);
    op.doubles_dc_to_lo = detail::get_or(j, "doubles_dc_to_lo", op.doubles_dc_to_lo);
    op.signal_to_accidental = detail::get_or(j, "signal_to_accidental", op.signal_to_accidental);
    op.pulse_period_s = detail::get_or(j, "pulse_period_ns", 12.5) * 1e-9;
    if (j.is_object() && j.contains("accidental_constant")) {
        const auto &c = j.at("accidental_constant");
        op.accidental_constant = c.is_null() ? std::nullopt : std::optional<double>(detail::get<double>(j, "accidental_constant"));
    }
    return op;
}

// ---------------------------------------------------------------------------
// Results

inline Json to_json(const HarmonicDecomposition &h) {
    Json arr = Json::array();
    for (const auto &[k, c] : h.components) {
        arr.push_back({{"harmonic", k}, {"amplitude", c.amplitude}, {"phase_rad", c.phase}});
    }
    return arr;
}

inline HarmonicDecomposition harmonics_from_json(const Json &j) {
    HarmonicDecomposition h;
    for (const auto &c : j) {
        h.components[detail::get<int>(c, "harmonic")] = {detail::get<double>(c, "amplitude"), detail::get<double>(c, "phase_rad")};
    }
    return h;
}

inline Json to_json(const FringeFit &f) {
    return {{"k", f.k},
            {"A", f.A},
            {"B", f.B},
            {"delta", f.delta},
            {"visibility", f.visibility},
            {"visibility_stderr", f.visibility_stderr},
            {"residual", f.residual},
            {"singular", f.singular},
            {"pathological", f.pathological}};
}

inline FringeFit fit_from_json(const Json &j) {
    FringeFit f;
    f.k = detail::get<int>(j, "k");
    f.A = detail::get<double>(j, "A");
    f.B = detail::get<double>(j, "B");
    f.delta = detail::get<double>(j, "delta");
    f.visibility = detail::get<double>(j, "visibility");
    f.residual = detail::get<double>(j, "residual");
    f.visibility_stderr = detail::get_or(j, "visibility_stderr", 0.0);
    f.singular = detail::get_or(j, "singular", false);
    f.pathological = detail::get_or(j, "pathological", false);
    return f;
}

/// Shortest decimal form that parses back to the same double.
inline std::string format_double(double x) {
    char buf[32];
    for (int precision = 15; precision <= 17; ++precision) {
        std::snprintf(buf, sizeof buf, "%.*g", precision, x);
        if (std::strtod(buf, nullptr) == x) {
            break;
        }
    }
    return buf;
}

/// CSV with header phi_rad,mean,sampled,sigma; `sampled` is empty when the
/// data were not sampled.
inline std::string to_csv(const FringeData &d) {
    d.validate();
    std::string out = "phi_rad,mean,sampled,sigma\n";
    for (std::size_t i = 0; i < d.size(); ++i) {
        out += format_double(d.phi[i]) + "," + format_double(d.mean[i]) + ",";
        if (d.sampled) {
            out += std::to_string((*d.sampled)[i]);
        }
        out += "," + format_double(d.sigma[i]) + "\n";
    }
    return out;
}

inline FringeData fringe_data_from_csv(const std::string &text) {
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line) || line != "phi_rad,mean,sampled,sigma") {
        throw FormatError("CSV header must be phi_rad,mean,sampled,sigma");
    }
    FringeData d;
    std::vector<long long> sampled;
    bool any_sampled = false;
    bool any_missing = false;
    std::size_t row = 1;
    while (std::getline(in, line)) {
        ++row;
        if (line.empty()) {
            continue;
        }
        std::vector<std::string> cells;
        std::istringstream ls(line);
        std::string cell;
        while (std::getline(ls, cell, ',')) {
            cells.push_back(cell);
        }
        if (line.back() == ',') {
            cells.emplace_back();
        }
        if (cells.size() != 4) {
            throw FormatError("CSV row " + std::to_string(row) + " needs 4 columns");
        }
        try {
            d.phi.push_back(std::stod(cells[0]));
            d.mean.push_back(std::stod(cells[1]));
            if (cells[2].empty()) {
                any_missing = true;
            } else {
                any_sampled = true;
                sampled.push_back(std::stoll(cells[2]));
            }
            d.sigma.push_back(std::stod(cells[3]));
        } catch (const std::exception &) {
            throw FormatError("CSV row " + std::to_string(row) + " has a malformed number");
        }
    }
    if (any_sampled && any_missing) {
        throw FormatError("sampled column must be filled on every row or on none");
    }
    if (any_sampled) {
        d.sampled = std::move(sampled);
    }
    return d;
}

// ---------------------------------------------------------------------------
// Files

inline std::string read_text_file(const std::string &path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw FormatError("cannot open '" + path + "'");
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline Json read_json_file(const std::string &path) {
    try {
        return Json::parse(read_text_file(path));
    } catch (const Json::parse_error &e) {
        throw FormatError("'" + path + "' is not valid JSON: " + e.what());
    }
}

inline void write_text_file(const std::string &path, const std::string &text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out || !(out << text) || !out.flush()) {
        throw std::runtime_error("cannot write '" + path + "'");
    }
}

} // namespace noonsim
