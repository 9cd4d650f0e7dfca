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

// NOON target states and the post-selected optical chain that prepares the
// three-photon polarization NOON state from a down-converted pair plus one
// local-oscillator photon.

#pragma once

#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "noonsim/circuit.hpp"
#include "noonsim/elements.hpp"
#include "noonsim/fock.hpp"

namespace noonsim {

enum class NoonBasis { linear_hv, circular };

struct NoonSpec {
    int n = 3;
    /// Phase step between successive creation factors; 2 pi / n when unset.
    std::optional<double> chi;
    NoonBasis basis = NoonBasis::linear_hv;
    int n_max = kDefaultMaxPhotons;
};

/// prod_{k<n} (a^dagger + exp(i k chi) b^dagger) |0>, normalized. The modes
/// are (H, V) for the linear basis and (L, R) for the circular basis.
inline StateVector build_noon_target(const NoonSpec &spec) {
    if (spec.n < 1) {
        throw std::invalid_argument("NOON photon number must be at least 1");
    }
    if (spec.n > spec.n_max) {
        throw std::invalid_argument("NOON photon number " + std::to_string(spec.n) + " exceeds n_max " +
                                    std::to_string(spec.n_max));
    }
    const double chi = spec.chi.value_or(2.0 * kPi / spec.n);
    const ModeSet &modes = spec.basis == NoonBasis::linear_hv ? polarization_modes() : circular_modes();
    StateVector state = make_vacuum(modes, spec.n_max);
    for (int k = 0; k < spec.n; ++k) {
        std::vector<Complex> c{1.0, std::polar(1.0, k * chi)};
        state = apply_creation(state, c);
    }
    return state.pruned(1e-12).normalized();
}

/// (|n,0> + exp(i relative_phase) |0,n>) / sqrt(2) over (H, V).
inline StateVector noon_state(int n, double relative_phase = 0.0, int n_max = kDefaultMaxPhotons) {
    if (n < 1 || n > n_max) {
        throw std::invalid_argument("NOON photon number out of range");
    }
    const double r = 1.0 / std::sqrt(2.0);
    return StateVector(polarization_modes(), n_max,
                       {{Occupation{n, 0}, Complex{r, 0.0}}, {Occupation{0, n}, std::polar(r, relative_phase)}});
}

/// Largest |amplitude| on |2,1> or |1,2> in the circular basis. Zero for
/// states with six-fold rotational symmetry about the propagation axis.
inline double check_sixfold_symmetry(const StateVector &state) {
    if (state.photon_number() != 3) {
        throw std::invalid_argument("six-fold symmetry check expects a three-photon state");
    }
    StateVector circ = state.modes() == circular_modes() ? state : to_circular_basis(state);
    circ = circ.normalized();
    return std::max(std::abs(circ.amplitude(Occupation{2, 1})), std::abs(circ.amplitude(Occupation{1, 2})));
}

/// Phase origin that makes the |n,0> and |0,n> amplitudes equal in phase
/// after a V-phase shift by that amount, reduced into [0, 2 pi / n).
inline double calibrate_phase_origin(const StateVector &state, int n) {
    Complex a = state.amplitude(Occupation{n, 0});
    Complex b = state.amplitude(Occupation{0, n});
    if (std::abs(a) < kTolerance || std::abs(b) < kTolerance) {
        throw NumericError("phase origin is undefined without both NOON components");
    }
    const double period = 2.0 * kPi / n;
    double origin = std::arg(a / b) / n;
    origin = std::fmod(origin, period);
    if (origin < 0.0) {
        origin += period;
    }
    return origin;
}

/// Weight of |n,0> and |0,n> in H/V after qwp(theta).
inline double linear_noon_weight(const StateVector &state, double qwp_theta) {
    const int n = state.photon_number().value_or(0);
    StateVector out = apply_mode_transform(state, qwp(qwp_theta)).normalized();
    return std::norm(out.amplitude(Occupation{n, 0})) + std::norm(out.amplitude(Occupation{0, n}));
}

/// Quarter-wave-plate angle in [0, pi) that best converts `state` into an
/// H/V NOON state: 1 degree grid, then golden-section refinement. Ties go to
/// the smallest angle.
inline double solve_qwp_angle(const StateVector &state) {
    if (state.modes() != polarization_modes() || !state.photon_number()) {
        throw std::invalid_argument("qwp solve expects a definite-photon-number (H, V) state");
    }
    double best_theta = 0.0;
    double best = -1.0;
    for (int d = 0; d < 180; ++d) {
        double w = linear_noon_weight(state, degrees(d));
        if (w > best + 1e-12) {
            best = w;
            best_theta = degrees(d);
        }
    }
    const double golden = (std::sqrt(5.0) - 1.0) / 2.0;
    double lo = best_theta - degrees(1.0);
    double hi = best_theta + degrees(1.0);
    double x1 = hi - golden * (hi - lo);
    double x2 = lo + golden * (hi - lo);
    double f1 = linear_noon_weight(state, x1);
    double f2 = linear_noon_weight(state, x2);
    for (int it = 0; it < 200 && hi - lo > 1e-15; ++it) {
        if (f1 < f2) {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + golden * (hi - lo);
            f2 = linear_noon_weight(state, x2);
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - golden * (hi - lo);
            f1 = linear_noon_weight(state, x1);
        }
    }
    double theta = 0.5 * (lo + hi);
    theta = std::fmod(theta, kPi);
    return theta < 0.0 ? theta + kPi : theta;
}

/// Closed-form ideal probability that both post-selections succeed.
inline double reference_success_probability() { return std::pow(std::cos(kPi / 12.0), 4) / std::pow(3.0, 1.0 / 6.0); }

struct StageRecord {
    std::string label;
    double success_probability = 1.0;
};

struct ChainResult {
    StateVector state = make_vacuum(polarization_modes());
    double success_probability = 1.0;
    std::vector<StageRecord> stage_log;
    /// State after each stage, keyed by stage label.
    std::vector<std::pair<std::string, StateVector>> intermediates;
    /// Phase origin applied by an auto-origin phase shifter (radians).
    std::optional<double> phase_origin;
    double scan_value = 0.0;

    const StateVector *intermediate(const std::string &label) const {
        for (const auto &[l, s] : intermediates) {
            if (l == label) {
                return &s;
            }
        }
        return nullptr;
    }
};

namespace detail {

inline void record(ChainResult &result, const std::string &label, const PostSelectionOutcome &outcome) {
    if (!outcome.succeeded()) {
        throw NumericError("post-selection at stage '" + label + "' has zero success probability");
    }
    result.state = *outcome.state;
    result.success_probability *= outcome.success_probability;
    result.stage_log.push_back({label, outcome.success_probability});
    result.intermediates.emplace_back(label, result.state);
}

inline std::string unique_label(const ChainResult &result, const std::string &base) {
    int count = 0;
    for (const auto &s : result.stage_log) {
        if (s.label == base || s.label.rfind(base + "#", 0) == 0) {
            ++count;
        }
    }
    return count == 0 ? base : base + "#" + std::to_string(count + 1);
}

} // namespace detail

/// Evaluates `circuit` on `input`; the scanned parameter (if any) is offset
/// by `scan_value` (radians).
inline ChainResult run_circuit(const Circuit &circuit, const StateVector &input, double scan_value = 0.0) {
    ChainResult result;
    result.state = input;
    result.scan_value = scan_value;
    for (const auto &e : circuit.elements()) {
        auto value = [&](const std::string &name) {
            double v = e.param(name);
            if (e.scanned && *e.scanned == name) {
                v += scan_value;
            }
            return v;
        };
        const std::string label = detail::unique_label(result, to_string(e.kind));
        const StateVector &s = result.state;
        switch (e.kind) {
        case ElementKind::pbs_combine: detail::record(result, label, pbs_combine(s)); break;
        case ElementKind::hwp: detail::record(result, label, apply_postselected(s, hwp(value("theta")))); break;
        case ElementKind::qwp: detail::record(result, label, apply_postselected(s, qwp(value("theta")))); break;
        case ElementKind::partial_polarizer:
            detail::record(result, label, apply_postselected(s, partial_polarizer(value("tH"), value("tV"))));
            break;
        case ElementKind::inject_lo:
            detail::record(result, label,
                           inject_lo(s, value("lo"), brewster_interface(value("tH"), value("tV"))));
            break;
        case ElementKind::phase_shift: {
            double phi = value("phi");
            if (e.auto_origin) {
                auto n = s.photon_number();
                if (!n) {
                    throw NumericError("automatic phase origin needs a definite photon number");
                }
                result.phase_origin = calibrate_phase_origin(s, *n);
                phi += *result.phase_origin;
            }
            detail::record(result, label, apply_postselected(s, phase_shift(phi)));
            break;
        }
        }
    }
    return result;
}

/// Parameters of the three-photon construction. Angles in radians.
struct ChainConfig {
    double hwp_theta = degrees(22.5);
    /// Whole partial polarizer: amplitude transmissions over all interfaces.
    double pp_t_h = 1.0;
    double pp_t_v = 1.0 / std::sqrt(3.0);
    /// Number of equal Brewster interfaces; the LO enters at the last one.
    int interfaces = 6;
    double lo_polarization = 0.0;
    double qwp_theta = degrees(45.0);
    /// Fixed phase origin; calibrated from the state when unset.
    std::optional<double> phase_origin;
    int n_max = kDefaultMaxPhotons;

    double interface_t_h() const { return std::pow(pp_t_h, 1.0 / interfaces); }
    double interface_t_v() const { return std::pow(pp_t_v, 1.0 / interfaces); }
};

/// The chain as element records: PBS, HWP, the interfaces before the LO
/// injection point, the injecting interface, QWP and the scanned phase shifter.
inline Circuit paper_circuit(const ChainConfig &cfg) {
    if (cfg.interfaces < 1) {
        throw std::invalid_argument("partial polarizer needs at least one interface");
    }
    const double th = cfg.interface_t_h();
    const double tv = cfg.interface_t_v();
    const int before = cfg.interfaces - 1;
    std::vector<CircuitElement> e;
    e.push_back({ElementKind::pbs_combine, {}, std::nullopt, false});
    e.push_back({ElementKind::hwp, {{"theta", cfg.hwp_theta}}, std::nullopt, false});
    e.push_back({ElementKind::partial_polarizer,
                 {{"tH", std::pow(th, before)}, {"tV", std::pow(tv, before)}},
                 std::nullopt,
                 false});
    e.push_back({ElementKind::inject_lo, {{"lo", cfg.lo_polarization}, {"tH", th}, {"tV", tv}}, std::nullopt, false});
    e.push_back({ElementKind::qwp, {{"theta", cfg.qwp_theta}}, std::nullopt, false});
    CircuitElement shifter{ElementKind::phase_shift, {{"phi", cfg.phase_origin.value_or(0.0)}}, "phi",
                           !cfg.phase_origin.has_value()};
    e.push_back(shifter);
    return Circuit(std::move(e));
}

/// One horizontally polarized photon in arm 1 and one vertically polarized
/// photon in arm 2.
inline StateVector dc_pair_input(int n_max = kDefaultMaxPhotons) {
    StateVector s = make_vacuum(two_arm_modes(), n_max);
    s = apply_creation(s, "in1H");
    return apply_creation(s, "in2V");
}

/// Runs the construction at phase `phi`. Besides the per-stage intermediates,
/// records "dc_pair_after_partial_polarizer": the pair after all interfaces of
/// the partial polarizer, i.e. the injecting interface's signal transmission
/// applied to the state entering it.
inline ChainResult run_paper_chain(double phi, const ChainConfig &cfg = {}) {
    ChainResult result = run_circuit(paper_circuit(cfg), dc_pair_input(cfg.n_max), phi);
    const StateVector *before = result.intermediate("partial_polarizer");
    if (before) {
        auto full = apply_postselected(*before, partial_polarizer(cfg.interface_t_h(), cfg.interface_t_v()));
        if (full.succeeded()) {
            result.intermediates.emplace_back("dc_pair_after_partial_polarizer", *full.state);
        }
    }
    return result;
}

} // namespace noonsim
