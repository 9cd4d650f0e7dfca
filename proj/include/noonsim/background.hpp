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

// Accidental triple coincidences from uncorrelated sources, fringe data
// containers and background subtraction.

#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "noonsim/fock.hpp"
#include "noonsim/harmonics.hpp"

namespace noonsim {

/// offset + sum_k amplitude_k cos(harmonic_k phi - phase_k), in counts per second.
struct Fringe {
    struct Term {
        int harmonic = 1;
        double amplitude = 0.0;
        double phase = 0.0;
    };

    double offset = 0.0;
    std::vector<Term> terms;

    static Fringe constant(double rate) { return {rate, {}}; }
    static Fringe single(double offset, double amplitude, int harmonic, double phase) {
        return {offset, {{harmonic, amplitude, phase}}};
    }

    double operator()(double phi) const {
        double y = offset;
        for (const auto &t : terms) {
            y += t.amplitude * std::cos(t.harmonic * phi - t.phase);
        }
        return y;
    }

    int highest_harmonic() const {
        int k = 0;
        for (const auto &t : terms) {
            k = std::max(k, t.harmonic);
        }
        return k;
    }

    /// Amplitudes are non-negative and the rate is non-negative at every
    /// phase (checked on a grid fine enough for the highest harmonic).
    void validate() const {
        double scale = std::abs(offset);
        for (const auto &t : terms) {
            if (!(t.amplitude >= 0.0) || t.harmonic < 1 || !std::isfinite(t.phase)) {
                throw std::invalid_argument("fringe terms need non-negative amplitude and harmonic >= 1");
            }
            scale += t.amplitude;
        }
        if (!(offset >= 0.0) || !std::isfinite(offset)) {
            throw std::invalid_argument("fringe offset must be non-negative");
        }
        const int points = 64 * std::max(1, highest_harmonic());
        for (int i = 0; i < points; ++i) {
            if ((*this)(2.0 * kPi * i / points) < -1e-9 * scale) {
                throw std::invalid_argument("fringe rate is negative at some phase");
            }
        }
    }

    Fringe scaled(double factor) const {
        Fringe f = *this;
        f.offset *= factor;
        for (auto &t : f.terms) {
            t.amplitude *= factor;
        }
        return f;
    }

    static Fringe from_harmonics(const HarmonicDecomposition &h, double floor = 1e-15) {
        Fringe f;
        f.offset = h.amplitude(0);
        for (const auto &[k, c] : h.components) {
            if (k > 0 && c.amplitude > floor * std::max(1.0, std::abs(f.offset))) {
                f.terms.push_back({k, c.amplitude, c.phase});
            }
        }
        return f;
    }
};

/// Measured rates of one source alone on the three detectors of a triple
/// coincidence. Doubles are indexed by detector pair (0,1), (0,2), (1,2).
struct SourceProfile {
    std::array<Fringe, 3> singles{};
    std::array<Fringe, 3> doubles{};

    /// Doubles on the two detectors other than `k`.
    const Fringe &doubles_without(std::size_t k) const { return doubles.at(2 - k); }
};

struct SourceRates {
    double pulse_period_s = 12.5e-9;
    double interval_s = 30.0;
    SourceProfile dc;
    SourceProfile lo;

    double pulses_per_interval() const { return interval_s / pulse_period_s; }

    void validate() const {
        if (!(pulse_period_s > 0.0) || !(interval_s > 0.0)) {
            throw std::invalid_argument("pulse period and counting interval must be positive");
        }
        for (const auto *p : {&dc, &lo}) {
            for (const auto &f : p->singles) f.validate();
            for (const auto &f : p->doubles) f.validate();
        }
    }
};

/// Accidental triples per counting interval, by channel.
struct AccidentalBreakdown {
    double two_dc_pairs = 0.0;
    double two_lo_one_dc_pair = 0.0;
    double three_lo = 0.0;

    double total() const { return two_dc_pairs + two_lo_one_dc_pair + three_lo; }
};

/// Uncorrelated-source statistics with the pulse period as coincidence
/// window. Per-pulse event probabilities are rate * period; a triple needs a
/// double on two detectors and a single on the third, or three singles.
///  - two DC pairs:        DC doubles x DC singles
///  - two LO + one DC pair: LO doubles x DC singles
///  - three LO photons:    LO singles on all three detectors
inline AccidentalBreakdown accidental_breakdown(const SourceRates &rates, double phi) {
    const double tau = rates.pulse_period_s;
    const double pulses = rates.pulses_per_interval();
    AccidentalBreakdown b;
    double lo_triple = 1.0;
    for (std::size_t k = 0; k < 3; ++k) {
        const double dc_single = rates.dc.singles[k](phi) * tau;
        b.two_dc_pairs += rates.dc.doubles_without(k)(phi) * tau * dc_single;
        b.two_lo_one_dc_pair += rates.lo.doubles_without(k)(phi) * tau * dc_single;
        lo_triple *= rates.lo.singles[k](phi) * tau;
    }
    b.two_dc_pairs *= pulses;
    b.two_lo_one_dc_pair *= pulses;
    b.three_lo = lo_triple * pulses;
    return b;
}

inline double accidental_triples(const SourceRates &rates, double phi) { return accidental_breakdown(rates, phi).total(); }

/// Counts versus phase. `sampled` holds Poisson draws when the scan was sampled.
struct FringeData {
    std::vector<double> phi;
    std::vector<double> mean;
    std::optional<std::vector<long long>> sampled;
    std::vector<double> sigma;

    std::size_t size() const { return phi.size(); }

    /// Sampled counts when present, otherwise the means.
    std::vector<double> values() const {
        if (!sampled) {
            return mean;
        }
        return std::vector<double>(sampled->begin(), sampled->end());
    }

    void validate() const {
        if (mean.size() != phi.size() || sigma.size() != phi.size() || (sampled && sampled->size() != phi.size())) {
            throw std::invalid_argument("fringe data columns have different lengths");
        }
    }
};

/// Pointwise total - background with sigma added in quadrature.
inline FringeData subtract_background(const FringeData &total, const FringeData &background) {
    total.validate();
    background.validate();
    if (total.size() != background.size()) {
        throw std::invalid_argument("background grid has a different number of points");
    }
    for (std::size_t i = 0; i < total.size(); ++i) {
        if (std::abs(total.phi[i] - background.phi[i]) > 1e-12) {
            throw std::invalid_argument("background grid does not match the data grid");
        }
    }
    FringeData out;
    out.phi = total.phi;
    const auto t = total.values();
    const auto b = background.values();
    out.mean.resize(t.size());
    out.sigma.resize(t.size());
    for (std::size_t i = 0; i < t.size(); ++i) {
        out.mean[i] = t[i] - b[i];
        out.sigma[i] = std::hypot(total.sigma[i], background.sigma[i]);
    }
    return out;
}

/// Accidental triples on a phase grid, as noiseless fringe data whose sigma
/// is the given fractional systematic uncertainty of the model.
inline FringeData accidental_fringe(const SourceRates &rates, const std::vector<double> &phi,
                                    double systematic_fraction = 0.0) {
    FringeData d;
    d.phi = phi;
    for (double p : phi) {
        const double a = accidental_triples(rates, p);
        d.mean.push_back(a);
        d.sigma.push_back(systematic_fraction * a);
    }
    return d;
}

} // namespace noonsim
