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

#include <gtest/gtest.h>

#include <set>

#include "noonsim/background.hpp"

namespace noonsim {
namespace {

constexpr std::array<std::array<int, 2>, 3> kPairs{{{0, 1}, {0, 2}, {1, 2}}};

SourceRates unit_window_rates() {
    SourceRates r;
    r.pulse_period_s = 1.0;
    r.interval_s = 1.0;
    return r;
}

// Enumerates all on/off combinations of independent per-pulse events and sums
// the probability of those in which the modeled channels cover all three
// detectors: a DC or LO double plus a DC single elsewhere, or three LO singles.
double enumerated_triple_probability(const SourceRates &r, double phi) {
    std::array<double, 12> p{};
    for (int i = 0; i < 3; ++i) {
        p[i] = r.dc.doubles[i](phi);
        p[3 + i] = r.dc.singles[i](phi);
        p[6 + i] = r.lo.doubles[i](phi);
        p[9 + i] = r.lo.singles[i](phi);
    }
    double total = 0.0;
    for (int mask = 0; mask < (1 << 12); ++mask) {
        double prob = 1.0;
        for (int i = 0; i < 12; ++i) {
            prob *= (mask >> i) & 1 ? p[i] : 1.0 - p[i];
        }
        auto on = [&](int i) { return (mask >> i) & 1; };
        bool hit = on(9) && on(10) && on(11);
        for (int k = 0; k < 3 && !hit; ++k) {
            if (!on(3 + k)) continue;
            for (int q = 0; q < 3; ++q) {
                const bool elsewhere = kPairs[q][0] != k && kPairs[q][1] != k;
                if (elsewhere && (on(q) || on(6 + q))) hit = true;
            }
        }
        if (hit) total += prob;
    }
    return total;
}

TEST(Accidentals, ZeroRatesGiveZero) {
    SourceRates r;
    EXPECT_EQ(accidental_triples(r, 0.3), 0.0);
    r.lo.singles = {Fringe::constant(1e6), Fringe::constant(1e6), Fringe::constant(1e6)};
    const auto b = accidental_breakdown(r, 0.3);
    EXPECT_EQ(b.two_dc_pairs, 0.0);
    EXPECT_EQ(b.two_lo_one_dc_pair, 0.0);
    EXPECT_GT(b.three_lo, 0.0);
}

TEST(Accidentals, MatchBernoulliEnumerationAtLowRates) {
    SourceRates r = unit_window_rates();
    for (int i = 0; i < 3; ++i) {
        r.dc.singles[i] = Fringe::constant(1e-3 * (1 + i));
        r.dc.doubles[i] = Fringe::constant(2e-4 * (3 - i));
        r.lo.singles[i] = Fringe::constant(3e-2 * (2 + i));
        r.lo.doubles[i] = Fringe::constant(5e-4 * (1 + 2 * i));
    }
    const double model = accidental_triples(r, 0.0);
    const double oracle = enumerated_triple_probability(r, 0.0);
    EXPECT_NEAR(model / oracle, 1.0, 5e-3);
}

TEST(Accidentals, MatchEnumerationWithPhaseDependence) {
    SourceRates r = unit_window_rates();
    for (int i = 0; i < 3; ++i) {
        r.dc.singles[i] = Fringe::single(1e-3, 5e-4, 1, 0.2 * i);
        r.dc.doubles[i] = Fringe::single(2e-4, 1e-4, 2, 0.1 * i);
        r.lo.singles[i] = Fringe::single(3e-2, 1e-2, 1, 0.5 + i);
        r.lo.doubles[i] = Fringe::constant(5e-4);
    }
    for (double phi : {0.0, 1.1, 2.9, 4.4}) {
        EXPECT_NEAR(accidental_triples(r, phi) / enumerated_triple_probability(r, phi), 1.0, 5e-3) << phi;
    }
}

TEST(Accidentals, PerIntervalScaling) {
    SourceRates r;
    r.dc.singles.fill(Fringe::constant(1e5));
    r.dc.doubles.fill(Fringe::constant(2e3));
    const double tau = r.pulse_period_s;
    const double expected = 3.0 * (2e3 * tau) * (1e5 * tau) * (r.interval_s / tau);
    EXPECT_NEAR(accidental_breakdown(r, 0.0).two_dc_pairs, expected, 1e-9 * expected);
    r.interval_s *= 10.0;
    EXPECT_NEAR(accidental_breakdown(r, 0.0).two_dc_pairs, 10.0 * expected, 1e-8 * expected);
}

TEST(Accidentals, DoublesFringeCarriesIntoTriples) {
    SourceRates r;
    r.dc.singles.fill(Fringe::constant(1e5));
    r.dc.doubles.fill(Fringe::single(2e3, 1e3, 2, 0.3));
    const auto phi = full_period_grid(32);
    std::vector<double> y;
    for (double p : phi) y.push_back(accidental_triples(r, p));
    const auto h = fourier_decompose(phi, y, {1, 2, 3});
    EXPECT_LT(h.amplitude(1), 1e-12 * h.amplitude(0));
    EXPECT_LT(h.amplitude(3), 1e-12 * h.amplitude(0));
    EXPECT_NEAR(h.amplitude(2) / h.amplitude(0), 0.5, 1e-12);
    EXPECT_NEAR(h.components.at(2).phase, 0.3, 1e-12);
}

TEST(Accidentals, ChannelScalingWithDcIntensity) {
    SourceRates r;
    for (int i = 0; i < 3; ++i) {
        r.dc.singles[i] = Fringe::single(1e5, 3e4, 1, 0.1);
        r.dc.doubles[i] = Fringe::single(2e3, 1e3, 2, 0.0);
        r.lo.singles[i] = Fringe::single(1e6, 5e5, 1, 1.0);
        r.lo.doubles[i] = Fringe::constant(4e3);
    }
    const auto base = accidental_breakdown(r, 0.7);
    SourceRates s = r;
    for (int i = 0; i < 3; ++i) {
        s.dc.singles[i] = r.dc.singles[i].scaled(2.0);
        s.dc.doubles[i] = r.dc.doubles[i].scaled(2.0);
    }
    const auto doubled = accidental_breakdown(s, 0.7);
    EXPECT_NEAR(doubled.two_dc_pairs, 4.0 * base.two_dc_pairs, 1e-9 * base.two_dc_pairs);
    EXPECT_NEAR(doubled.two_lo_one_dc_pair, 2.0 * base.two_lo_one_dc_pair, 1e-9 * base.two_lo_one_dc_pair);
    EXPECT_DOUBLE_EQ(doubled.three_lo, base.three_lo);
    EXPECT_DOUBLE_EQ(base.total(), base.two_dc_pairs + base.two_lo_one_dc_pair + base.three_lo);
}

TEST(Accidentals, DoublesWithoutPicksComplementaryPair) {
    SourceProfile p;
    p.doubles = {Fringe::constant(1), Fringe::constant(2), Fringe::constant(3)};
    EXPECT_EQ(p.doubles_without(0).offset, 3.0); // (1,2)
    EXPECT_EQ(p.doubles_without(1).offset, 2.0); // (0,2)
    EXPECT_EQ(p.doubles_without(2).offset, 1.0); // (0,1)
    EXPECT_THROW(p.doubles_without(3), std::out_of_range);
}

TEST(Accidentals, NonNegativeEverywhere) {
    SourceRates r;
    for (int i = 0; i < 3; ++i) {
        r.dc.singles[i] = Fringe::single(1e5, 1e5, 1, 0.4 * i);
        r.dc.doubles[i] = Fringe::single(2e3, 2e3, 2, 0.0);
        r.lo.singles[i] = Fringe::single(1e6, 1e6, 1, 1.0);
        r.lo.doubles[i] = Fringe::single(4e3, 4e3, 2, 2.0);
    }
    for (double p : full_period_grid(200)) {
        EXPECT_GE(accidental_triples(r, p), 0.0);
    }
}

TEST(FringeType, EvaluateAndValidate) {
    Fringe f{2.0, {{1, 1.0, 0.0}, {3, 0.5, kPi / 2}}};
    EXPECT_NEAR(f(0.0), 3.0, 1e-15);
    EXPECT_NEAR(f(kPi / 6), 2.0 + std::cos(kPi / 6) + 0.5, 1e-15);
    EXPECT_EQ(f.highest_harmonic(), 3);
    EXPECT_NO_THROW(f.validate());
    EXPECT_THROW(Fringe::single(1.0, 2.0, 1, 0.0).validate(), std::invalid_argument);
    EXPECT_THROW(Fringe::single(1.0, -0.5, 1, 0.0).validate(), std::invalid_argument);
    EXPECT_THROW(Fringe::single(1.0, 0.5, 0, 0.0).validate(), std::invalid_argument);
    EXPECT_THROW(Fringe::constant(-1.0).validate(), std::invalid_argument);
    // Offset below the amplitude sum, yet positive everywhere.
    Fringe mixed{1800.0, {{1, 2339.0, 0.0}, {2, 1169.0, 0.0}}};
    for (double p : full_period_grid(360)) {
        ASSERT_GE(mixed(p), -1e-9) << p;
    }
    EXPECT_NO_THROW(mixed.validate());
}

TEST(FringeType, FromHarmonicsRoundTrip) {
    const Fringe f{5.0, {{2, 3.0, 0.4}}};
    const auto phi = full_period_grid(16);
    std::vector<double> y;
    for (double p : phi) y.push_back(f(p));
    const Fringe g = Fringe::from_harmonics(fourier_decompose(phi, y, {1, 2, 3}));
    ASSERT_EQ(g.terms.size(), 1u);
    EXPECT_NEAR(g.offset, 5.0, 1e-12);
    EXPECT_EQ(g.terms[0].harmonic, 2);
    EXPECT_NEAR(g.terms[0].amplitude, 3.0, 1e-12);
    EXPECT_NEAR(g.terms[0].phase, 0.4, 1e-12);
}

TEST(Harmonics, KnownDecomposition) {
    const auto phi = full_period_grid(12);
    std::vector<double> y;
    for (double p : phi) y.push_back(5.0 + 3.0 * std::cos(2.0 * p));
    const auto h = fourier_decompose(phi, y, {1, 2, 3});
    EXPECT_NEAR(h.amplitude(0), 5.0, 1e-12);
    EXPECT_NEAR(h.amplitude(1), 0.0, 1e-12);
    EXPECT_NEAR(h.amplitude(2), 3.0, 1e-12);
    EXPECT_NEAR(h.components.at(2).phase, 0.0, 1e-12);
    EXPECT_NEAR(h.evaluate(0.3), 5.0 + 3.0 * std::cos(0.6), 1e-12);
}

TEST(Harmonics, GridChecks) {
    const auto phi = full_period_grid(4);
    const std::vector<double> y(4, 1.0);
    EXPECT_THROW(fourier_decompose(phi, y, {2}), NumericError);
    EXPECT_NO_THROW(fourier_decompose(phi, y, {1}));
    std::vector<double> partial{0.0, 0.1, 0.2, 0.3, 0.4};
    EXPECT_THROW(check_uniform_grid(partial, {1}), NumericError);
    std::vector<double> uneven{0.0, 1.0, 3.0};
    EXPECT_THROW(check_uniform_grid(uneven, {}), NumericError);
    EXPECT_THROW(fourier_decompose(phi, std::vector<double>(3, 1.0), {1}), std::invalid_argument);
}

TEST(Harmonics, PhasorSum) {
    HarmonicDecomposition a, b;
    a.components[0] = {1.0, 0.0};
    a.components[1] = {1.0, 0.0};
    b.components[1] = {1.0, kPi};
    b.components[2] = {2.0, 0.5};
    const auto c = a + b;
    EXPECT_NEAR(c.amplitude(0), 1.0, 1e-15);
    EXPECT_NEAR(c.amplitude(1), 0.0, 1e-15);
    EXPECT_NEAR(c.amplitude(2), 2.0, 1e-15);
    for (double p : {0.0, 1.0, 2.0}) {
        EXPECT_NEAR(c.evaluate(p), a.evaluate(p) + b.evaluate(p), 1e-12);
    }
}

FringeData synthetic(const std::vector<double> &phi, const Fringe &f, double sigma) {
    FringeData d;
    d.phi = phi;
    for (double p : phi) {
        d.mean.push_back(f(p));
        d.sigma.push_back(sigma);
    }
    return d;
}

TEST(Subtraction, RecoversSignal) {
    const auto phi = full_period_grid(30);
    const Fringe signal = Fringe::single(40.0, 40.0, 3, 0.0);
    const Fringe bg{22.0, {{1, 3.0, 0.2}, {2, 5.0, 1.0}}};
    const FringeData total = synthetic(phi, Fringe{62.0, {{3, 40.0, 0.0}, {1, 3.0, 0.2}, {2, 5.0, 1.0}}}, 3.0);
    const FringeData out = subtract_background(total, synthetic(phi, bg, 4.0));
    for (std::size_t i = 0; i < phi.size(); ++i) {
        EXPECT_NEAR(out.mean[i], signal(phi[i]), 1e-12);
        EXPECT_NEAR(out.sigma[i], 5.0, 1e-12);
    }
    EXPECT_FALSE(out.sampled.has_value());
}

TEST(Subtraction, ZeroBackgroundIsIdentity) {
    const auto phi = full_period_grid(10);
    FringeData total = synthetic(phi, Fringe::single(5.0, 1.0, 1, 0.0), 1.0);
    total.sampled = std::vector<long long>{4, 5, 6, 7, 3, 5, 5, 6, 2, 8};
    const FringeData out = subtract_background(total, synthetic(phi, Fringe::constant(0.0), 0.0));
    for (std::size_t i = 0; i < phi.size(); ++i) {
        EXPECT_EQ(out.mean[i], static_cast<double>((*total.sampled)[i]));
        EXPECT_EQ(out.sigma[i], 1.0);
    }
}

TEST(Subtraction, GridMismatch) {
    const auto a = synthetic(full_period_grid(10), Fringe::constant(1.0), 0.0);
    EXPECT_THROW(subtract_background(a, synthetic(full_period_grid(11), Fringe::constant(1.0), 0.0)),
                 std::invalid_argument);
    EXPECT_THROW(subtract_background(a, synthetic(full_period_grid(10, 0.1), Fringe::constant(1.0), 0.0)),
                 std::invalid_argument);
    FringeData broken = a;
    broken.sigma.pop_back();
    EXPECT_THROW(subtract_background(broken, a), std::invalid_argument);
}

TEST(Subtraction, AccidentalFringeSystematic) {
    SourceRates r;
    r.dc.singles.fill(Fringe::constant(1e5));
    r.dc.doubles.fill(Fringe::constant(2e3));
    const auto d = accidental_fringe(r, full_period_grid(8), 0.1);
    ASSERT_EQ(d.size(), 8u);
    for (std::size_t i = 0; i < d.size(); ++i) {
        EXPECT_NEAR(d.sigma[i], 0.1 * d.mean[i], 1e-12);
    }
}

TEST(SourceRatesType, Validation) {
    SourceRates r;
    EXPECT_NO_THROW(r.validate());
    EXPECT_NEAR(r.pulses_per_interval(), 30.0 / 12.5e-9, 1e-3);
    r.pulse_period_s = 0.0;
    EXPECT_THROW(r.validate(), std::invalid_argument);
    r.pulse_period_s = 1e-8;
    r.lo.singles[1] = Fringe::constant(-5.0);
    EXPECT_THROW(r.validate(), std::invalid_argument);
}

} // namespace
} // namespace noonsim
