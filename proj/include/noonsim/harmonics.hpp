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

// Discrete Fourier projection of fringe samples onto low harmonics.

#pragma once

#include <cmath>
#include <map>
#include <set>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "noonsim/fock.hpp"

namespace noonsim {

/// amplitude * cos(k phi - phase); harmonic 0 carries the mean and no phase.
struct HarmonicComponent {
    double amplitude = 0.0;
    double phase = 0.0;
};

struct HarmonicDecomposition {
    std::map<int, HarmonicComponent> components;

    double amplitude(int k) const {
        auto it = components.find(k);
        return it == components.end() ? 0.0 : it->second.amplitude;
    }

    double evaluate(double phi) const {
        double y = 0.0;
        for (const auto &[k, c] : components) {
            y += k == 0 ? c.amplitude : c.amplitude * std::cos(k * phi - c.phase);
        }
        return y;
    }

    HarmonicDecomposition operator+(const HarmonicDecomposition &other) const {
        // Components combine as phasors.
        HarmonicDecomposition out;
        std::set<int> keys;
        for (const auto &[k, c] : components) keys.insert(k);
        for (const auto &[k, c] : other.components) keys.insert(k);
        for (int k : keys) {
            auto pa = phasor(k);
            auto pb = other.phasor(k);
            auto sum = pa + pb;
            if (k == 0) {
                out.components[0] = {sum.real(), 0.0};
            } else {
                out.components[k] = {std::abs(sum), std::abs(sum) > 0.0 ? std::arg(sum) : 0.0};
            }
        }
        return out;
    }

    Complex phasor(int k) const {
        auto it = components.find(k);
        if (it == components.end()) {
            return {};
        }
        return k == 0 ? Complex{it->second.amplitude, 0.0} : std::polar(it->second.amplitude, it->second.phase);
    }
};

/// Checks that `phi` is a uniform grid spanning whole periods of every
/// requested harmonic with enough points to resolve the highest one.
inline void check_uniform_grid(std::span<const double> phi, const std::set<int> &harmonics) {
    const std::size_t n = phi.size();
    if (n < 2) {
        throw NumericError("harmonic analysis needs at least two samples");
    }
    const double step = phi[1] - phi[0];
    if (!(step > 0.0)) {
        throw NumericError("phase grid must be strictly increasing");
    }
    for (std::size_t i = 1; i < n; ++i) {
        if (std::abs((phi[i] - phi[i - 1]) - step) > 1e-9 * std::max(1.0, std::abs(step))) {
            throw NumericError("phase grid is not uniform");
        }
    }
    const double span = step * static_cast<double>(n);
    for (int k : harmonics) {
        if (k < 0) {
            throw std::invalid_argument("harmonic index must be non-negative");
        }
        if (k == 0) {
            continue;
        }
        if (static_cast<std::size_t>(2 * k + 1) > n) {
            throw NumericError("grid of " + std::to_string(n) + " points aliases harmonic " + std::to_string(k));
        }
        double periods = span * k / (2.0 * kPi);
        if (periods < 1.0 - 1e-9 || std::abs(periods - std::round(periods)) > 1e-9) {
            throw NumericError("grid does not cover whole periods of harmonic " + std::to_string(k));
        }
    }
}

/// Projects samples onto {1, cos k phi, sin k phi} for each requested k.
inline HarmonicDecomposition fourier_decompose(std::span<const double> phi, std::span<const double> samples,
                                               const std::set<int> &harmonics) {
    if (phi.size() != samples.size()) {
        throw std::invalid_argument("phase and sample counts differ");
    }
    check_uniform_grid(phi, harmonics);
    const double n = static_cast<double>(samples.size());
    HarmonicDecomposition out;
    double mean = 0.0;
    for (double y : samples) {
        mean += y;
    }
    out.components[0] = {mean / n, 0.0};
    for (int k : harmonics) {
        if (k == 0) {
            continue;
        }
        double c = 0.0, s = 0.0;
        for (std::size_t i = 0; i < samples.size(); ++i) {
            c += samples[i] * std::cos(k * phi[i]);
            s += samples[i] * std::sin(k * phi[i]);
        }
        c *= 2.0 / n;
        s *= 2.0 / n;
        out.components[k] = {std::hypot(c, s), std::atan2(s, c)};
    }
    return out;
}

/// `count` points starting at `start`, spaced 2 pi / count apart.
inline std::vector<double> full_period_grid(std::size_t count, double start = 0.0) {
    std::vector<double> phi(count);
    for (std::size_t i = 0; i < count; ++i) {
        phi[i] = start + 2.0 * kPi * static_cast<double>(i) / static_cast<double>(count);
    }
    return phi;
}

} // namespace noonsim
