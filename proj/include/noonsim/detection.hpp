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

// Polarization-resolved photon counting: pattern probabilities in a linear
// analyzer basis, detector fan-out, coincidence rates, and the classical model
// of three distinguishable photons.

#pragma once

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <map>
#include <span>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

#include "noonsim/construction.hpp"
#include "noonsim/elements.hpp"
#include "noonsim/fock.hpp"
#include "noonsim/harmonics.hpp"

namespace noonsim {

/// Linear analyzer: the + port passes `basis_angle` (from vertical), the - port
/// the orthogonal polarization. Each port fans out to that many detectors.
struct AnalyzerConfig {
    double basis_angle = degrees(45.0);
    int detectors_plus = 2;
    int detectors_minus = 1;
    double detector_efficiency = 1.0;

    void validate() const {
        if (detectors_plus < 0 || detectors_minus < 0 || detectors_plus + detectors_minus < 1) {
            throw std::invalid_argument("analyzer needs non-negative detector counts and at least one detector");
        }
        if (!(detector_efficiency >= 0.0 && detector_efficiency <= 1.0)) {
            throw std::invalid_argument("detector efficiency must lie in [0, 1]");
        }
    }

    int total_detectors() const { return detectors_plus + detectors_minus; }
};

struct DetectionPattern {
    int n_plus = 0;
    int n_minus = 0;

    int total() const { return n_plus + n_minus; }
    bool operator==(const DetectionPattern &) const = default;
};

inline const ModeSet &analyzer_modes() {
    static const ModeSet modes{"plus", "minus"};
    return modes;
}

/// Re-expresses an (H, V) state over the analyzer's (+, -) modes.
inline StateVector to_analyzer_basis(const StateVector &state, const AnalyzerConfig &analyzer) {
    if (state.modes() != polarization_modes()) {
        throw std::invalid_argument("analysis expects an (H, V) state");
    }
    return relabel(apply_mode_transform(state, analyzer_rotation(analyzer.basis_angle)), analyzer_modes());
}

inline double pattern_probability(const StateVector &state, const AnalyzerConfig &analyzer,
                                  const DetectionPattern &pattern) {
    if (pattern.n_plus < 0 || pattern.n_minus < 0) {
        throw std::invalid_argument("pattern counts must be non-negative");
    }
    auto n = state.photon_number();
    if (!n || *n != pattern.total()) {
        throw std::invalid_argument("pattern photon number does not match the state");
    }
    if (!state.is_normalized()) {
        throw std::invalid_argument("pattern probability requires a normalized state");
    }
    StateVector rotated = to_analyzer_basis(state, analyzer);
    return std::norm(rotated.amplitude(Occupation{pattern.n_plus, pattern.n_minus}));
}

/// Probability that n photons, each routed uniformly at random to one of k
/// detectors, all land on different detectors: k (k-1) ... (k-n+1) / k^n.
inline double fanout_distinct_probability(int n, int k) {
    if (n < 0 || k < 1) {
        throw std::invalid_argument("fan-out needs n >= 0 photons and k >= 1 detectors");
    }
    if (n > k) {
        return 0.0;
    }
    double p = 1.0;
    for (int i = 0; i < n; ++i) {
        p *= static_cast<double>(k - i) / k;
    }
    return p;
}

namespace detail {

inline double port_fanout(int photons, int detectors) {
    if (photons == 0) {
        return 1.0;
    }
    if (detectors == 0) {
        return 0.0;
    }
    return fanout_distinct_probability(photons, detectors);
}

} // namespace detail

/// Probability of an n-fold coincidence with the photons of `pattern` on
/// distinct detectors of their ports.
inline double coincidence_rate(const StateVector &state, const AnalyzerConfig &analyzer,
                               const DetectionPattern &pattern) {
    analyzer.validate();
    const double fan = detail::port_fanout(pattern.n_plus, analyzer.detectors_plus) *
                       detail::port_fanout(pattern.n_minus, analyzer.detectors_minus);
    if (fan == 0.0) {
        return 0.0;
    }
    return pattern_probability(state, analyzer, pattern) * fan * std::pow(analyzer.detector_efficiency, pattern.total());
}

/// coincidence_rate after a V-phase shift by `phi`.
inline double coincidence_rate(const StateVector &state, const AnalyzerConfig &analyzer,
                               const DetectionPattern &pattern, double phi) {
    return coincidence_rate(apply_mode_transform(state, phase_shift(phi)), analyzer, pattern);
}

/// Distribution of click sets (bitmask over detectors; + port detectors first)
/// for non-number-resolving detectors with uniform fan-out.
inline std::map<std::uint32_t, double> click_distribution(const StateVector &state, const AnalyzerConfig &analyzer) {
    analyzer.validate();
    auto n = state.photon_number();
    if (!n) {
        throw std::invalid_argument("click distribution needs a definite photon number");
    }
    StateVector rotated = to_analyzer_basis(state.normalized(), analyzer);
    const int kp = analyzer.detectors_plus;
    const int km = analyzer.detectors_minus;

    // Click-set distribution of `photons` photons over `k` detectors at `offset`.
    auto port = [](int photons, int k, int offset) {
        std::map<std::uint32_t, double> dist;
        if (photons == 0) {
            dist[0] = 1.0;
            return dist;
        }
        if (k == 0) {
            return dist;
        }
        std::vector<int> route(static_cast<std::size_t>(photons), 0);
        const double weight = std::pow(1.0 / k, photons);
        while (true) {
            std::uint32_t mask = 0;
            for (int d : route) {
                mask |= 1u << (offset + d);
            }
            dist[mask] += weight;
            std::size_t i = 0;
            while (i < route.size() && ++route[i] == k) {
                route[i++] = 0;
            }
            if (i == route.size()) {
                break;
            }
        }
        return dist;
    };

    std::map<std::uint32_t, double> out;
    for (const auto &[occ, amp] : rotated.amplitudes()) {
        const double p = std::norm(amp);
        for (const auto &[mp, pp] : port(occ[0], kp, 0)) {
            for (const auto &[mm, pm] : port(occ[1], km, kp)) {
                out[mp | mm] += p * pp * pm;
            }
        }
    }
    return out;
}

/// Probability that every detector in `mask` clicks (others unconstrained).
inline double click_probability(const std::map<std::uint32_t, double> &dist, std::uint32_t mask) {
    double p = 0.0;
    for (const auto &[m, q] : dist) {
        if ((m & mask) == mask) {
            p += q;
        }
    }
    return p;
}

// ---------------------------------------------------------------------------
// Distinguishable photons

struct ClassicalPhotonSet {
    std::vector<Eigen::Vector2cd> photons;

    explicit ClassicalPhotonSet(std::vector<Eigen::Vector2cd> jones) : photons(std::move(jones)) {
        for (const auto &j : photons) {
            if (std::abs(j.squaredNorm() - 1.0) > kNormTolerance) {
                throw std::invalid_argument("photon Jones vectors must be normalized");
            }
        }
    }
};

/// Linear polarizations (from vertical), each passed through `optics`.
inline ClassicalPhotonSet photon_set_from_linear(std::span<const double> angles,
                                                 const ModeTransform &optics = qwp(degrees(45.0))) {
    if (optics.dimension() != 2 || !optics.is_unitary()) {
        throw std::invalid_argument("photon preparation optics must be a unitary 2x2 transform");
    }
    std::vector<Eigen::Vector2cd> jones;
    for (double a : angles) {
        jones.emplace_back(optics.matrix() * linear_polarization(a));
    }
    return ClassicalPhotonSet(std::move(jones));
}

/// Probability that one photon exits the + port after a V-phase shift `phi`.
inline double single_photon_plus_probability(const Eigen::Vector2cd &jones, double phi, double basis_angle) {
    const Complex amp = std::sin(basis_angle) * jones(0) + std::cos(basis_angle) * std::polar(1.0, phi) * jones(1);
    return std::norm(amp);
}

/// Coincidence probability for independent photons: product of single-photon
/// port probabilities summed over port assignments matching `pattern`,
/// times the distinct-detector fan-out factor of each port.
inline double distinguishable_triple_rate(const ClassicalPhotonSet &set, double phi, const AnalyzerConfig &analyzer,
                                          const DetectionPattern &pattern) {
    analyzer.validate();
    const int n = static_cast<int>(set.photons.size());
    if (pattern.total() != n) {
        throw std::invalid_argument("pattern photon number does not match the photon set");
    }
    std::vector<double> plus(set.photons.size());
    for (std::size_t i = 0; i < plus.size(); ++i) {
        plus[i] = single_photon_plus_probability(set.photons[i], phi, analyzer.basis_angle);
    }
    double total = 0.0;
    for (std::uint32_t mask = 0; mask < (1u << n); ++mask) {
        if (std::popcount(mask) != pattern.n_plus) {
            continue;
        }
        double p = 1.0;
        for (int i = 0; i < n; ++i) {
            p *= (mask >> i) & 1u ? plus[static_cast<std::size_t>(i)] : 1.0 - plus[static_cast<std::size_t>(i)];
        }
        total += p;
    }
    const double fan = detail::port_fanout(pattern.n_plus, analyzer.detectors_plus) *
                       detail::port_fanout(pattern.n_minus, analyzer.detectors_minus);
    return total * fan * std::pow(analyzer.detector_efficiency, n);
}

/// Harmonic content of the distinguishable-photon coincidence fringe.
inline HarmonicDecomposition distinguishable_fringe_harmonics(const ClassicalPhotonSet &set,
                                                              const AnalyzerConfig &analyzer,
                                                              const DetectionPattern &pattern,
                                                              std::size_t samples = 36) {
    auto phi = full_period_grid(samples);
    std::vector<double> y(phi.size());
    for (std::size_t i = 0; i < phi.size(); ++i) {
        y[i] = distinguishable_triple_rate(set, phi[i], analyzer, pattern);
    }
    return fourier_decompose(phi, y, {1, 2, 3});
}

struct VisibilitySearch {
    AnalyzerConfig analyzer{};
    DetectionPattern pattern{2, 1};
    /// Optics between the linear photon polarizations and the phase shifter.
    ModeTransform optics = qwp(degrees(45.0));
    double grid_step_deg = 1.0;
    /// Largest (1 phi + 2 phi amplitude) / mean for a fringe to count as a
    /// 3 phi oscillation.
    double leakage_tolerance = 1e-9;
    std::size_t phase_samples = 36;
};

struct VisibilityBound {
    /// Best 3 phi visibility among fringes free of 1 phi and 2 phi content.
    double visibility = 0.0;
    std::vector<double> angles;
    double leakage = 0.0;
    /// Best 3 phi amplitude / mean over the whole search space, ignoring the
    /// lower harmonics.
    double unconstrained_visibility = 0.0;
    std::vector<double> unconstrained_angles;
    bool found = false;
};

/// Maximal 3 phi visibility of three distinguishable photons whose
/// coincidence fringe oscillates at 3 phi only. The first photon's angle is
/// fixed at 0 (the visibility is invariant under a common rotation); the
/// other two are searched on a grid and then refined by a shrinking pattern
/// search that stays within the leakage tolerance.
inline VisibilityBound measure_visibility_bound_distinguishable(const VisibilitySearch &search = {}) {
    if (search.pattern.total() != 3) {
        throw std::invalid_argument("the distinguishable bound is defined for three-photon patterns");
    }
    struct Eval {
        double visibility;
        double leakage;
    };
    auto evaluate = [&](double a2, double a3) {
        const std::vector<double> angles{0.0, a2, a3};
        auto h = distinguishable_fringe_harmonics(photon_set_from_linear(angles, search.optics), search.analyzer,
                                                  search.pattern, search.phase_samples);
        const double mean = h.amplitude(0);
        if (mean <= 0.0) {
            return Eval{0.0, 0.0};
        }
        return Eval{h.amplitude(3) / mean, (h.amplitude(1) + h.amplitude(2)) / mean};
    };

    VisibilityBound bound;
    const int steps = static_cast<int>(std::lround(180.0 / search.grid_step_deg));
    double best2 = 0.0, best3 = 0.0;
    for (int i = 0; i < steps; ++i) {
        for (int j = 0; j < steps; ++j) {
            const double a2 = degrees(i * search.grid_step_deg);
            const double a3 = degrees(j * search.grid_step_deg);
            Eval e = evaluate(a2, a3);
            if (e.visibility > bound.unconstrained_visibility) {
                bound.unconstrained_visibility = e.visibility;
                bound.unconstrained_angles = {0.0, a2, a3};
            }
            if (e.leakage <= search.leakage_tolerance && (!bound.found || e.visibility > bound.visibility)) {
                bound.found = true;
                bound.visibility = e.visibility;
                bound.leakage = e.leakage;
                best2 = a2;
                best3 = a3;
            }
        }
    }
    if (!bound.found) {
        return bound;
    }

    double step = degrees(search.grid_step_deg) / 2.0;
    while (step > degrees(1e-7)) {
        bool improved = false;
        for (auto [d2, d3] : {std::pair{1, 0}, std::pair{-1, 0}, std::pair{0, 1}, std::pair{0, -1}, std::pair{1, 1},
                              std::pair{-1, -1}, std::pair{1, -1}, std::pair{-1, 1}}) {
            const double a2 = best2 + d2 * step;
            const double a3 = best3 + d3 * step;
            Eval e = evaluate(a2, a3);
            if (e.leakage <= search.leakage_tolerance && e.visibility > bound.visibility + 1e-15) {
                bound.visibility = e.visibility;
                bound.leakage = e.leakage;
                best2 = a2;
                best3 = a3;
                improved = true;
            }
        }
        if (!improved) {
            step /= 2.0;
        }
    }
    bound.angles = {0.0, best2, best3};
    return bound;
}

// ---------------------------------------------------------------------------
// Phase sensitivity

/// d<A_N>/dphi under a V-phase shift, from the phase generator n_V.
inline double expectation_A_N_derivative(const StateVector &state, int n) {
    Complex a = state.amplitude(Occupation{n, 0});
    Complex b = state.amplitude(Occupation{0, n});
    return -2.0 * n * (std::conj(a) * b).imag();
}

/// Delta A_N / |d<A_N>/dphi| for the given state.
inline double phase_sensitivity(const StateVector &state, int n) {
    const double mean = expectation_A_N(state, n);
    const double second = std::norm(state.amplitude(Occupation{n, 0})) + std::norm(state.amplitude(Occupation{0, n}));
    const double slope = expectation_A_N_derivative(state, n);
    if (std::abs(slope) < 1e-12) {
        throw NumericError("phase sensitivity is undefined at a stationary point of <A_N>");
    }
    return std::sqrt(std::max(0.0, second - mean * mean)) / std::abs(slope);
}

/// Error-propagation phase uncertainty of the NOON state (|N,0> + e^{iN phi}|0,N>)/sqrt2.
inline double phase_sensitivity(int n, double phi) {
    if (n < 1) {
        throw std::invalid_argument("phase sensitivity needs N >= 1");
    }
    const StateVector noon = noon_state(n, 0.0, std::max(n, kDefaultMaxPhotons));
    return phase_sensitivity(apply_mode_transform(noon, phase_shift(phi)), n);
}

} // namespace noonsim
