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

#include <random>

#include "test_util.hpp"

namespace noonsim {
namespace {

const ModeSet kHV = polarization_modes();

StateVector photon(double theta_from_vertical) { return create_linear(make_vacuum(kHV), theta_from_vertical); }

TEST(ModeTransform, Validation) {
    EXPECT_THROW(ModeTransform(Eigen::MatrixXcd(2, 3)), std::invalid_argument);
    EXPECT_THROW(ModeTransform(Eigen::MatrixXcd(0, 0)), std::invalid_argument);
    EXPECT_THROW(ModeTransform(Eigen::MatrixXcd::Identity(2, 2) * 1.01), std::invalid_argument);
    Eigen::MatrixXcd bad = Eigen::MatrixXcd::Identity(2, 2);
    bad(0, 1) = std::nan("");
    EXPECT_THROW(ModeTransform{bad}, std::invalid_argument);
    EXPECT_TRUE(hwp(0.3).is_unitary());
    EXPECT_FALSE(partial_polarizer(1.0, 0.5).is_unitary());
}

TEST(ModeTransform, EmbeddingAndComposition) {
    ModeTransform e = phase_shift(0.4).embedded(3, {2, 0});
    EXPECT_NEAR(std::abs(e.matrix()(0, 0) - std::polar(1.0, 0.4)), 0.0, 1e-15);
    EXPECT_NEAR(std::abs(e.matrix()(1, 1) - 1.0), 0.0, 1e-15);
    EXPECT_THROW(hwp(0.1).embedded(3, {0}), std::invalid_argument);
    EXPECT_THROW(hwp(0.1).then(ModeTransform::identity(3)), std::invalid_argument);

    std::mt19937_64 rng(11);
    const StateVector s = testing::random_state(kHV, 3, rng);
    const ModeTransform a = qwp(0.3);
    const ModeTransform b = hwp(-0.7);
    const StateVector sequential = apply_mode_transform(apply_mode_transform(s, a), b);
    EXPECT_LT(testing::max_amplitude_difference(sequential, apply_mode_transform(s, a.then(b))), 1e-13);
}

// Lifting must agree with the permanent formula for every transition.
TEST(Lifting, MatchesPermanentOracle) {
    std::mt19937_64 rng(2024);
    double worst = 0.0;
    for (int trial = 0; trial < 12; ++trial) {
        for (std::size_t modes = 1; modes <= 4; ++modes) {
            const Eigen::MatrixXcd m = trial % 2 ? testing::random_contraction(modes, rng) : testing::random_unitary(modes, rng);
            const ModeTransform t(m);
            const ModeSet ms = testing::numbered_modes(modes);
            for (int n = 0; n <= 4; ++n) {
                for (const auto &in : occupations_with_total(modes, n)) {
                    const StateVector out = apply_mode_transform(basis_state(ms, in), t);
                    for (const auto &o : occupations_with_total(modes, n)) {
                        worst = std::max(worst, std::abs(out.amplitude(o) - fock_amplitude_oracle(t, in, o)));
                    }
                }
            }
        }
    }
    EXPECT_LT(worst, 1e-10);
}

TEST(Lifting, UnitaryPreservesNormAndContractionLosesIt) {
    std::mt19937_64 rng(5);
    for (int trial = 0; trial < 10; ++trial) {
        const ModeSet ms = testing::numbered_modes(3);
        const StateVector s = testing::random_state(ms, 3, rng);
        EXPECT_NEAR(apply_mode_transform(s, ModeTransform(testing::random_unitary(3, rng))).squared_norm(), 1.0, 1e-12);
        const double kept = apply_mode_transform(s, ModeTransform(testing::random_contraction(3, rng))).squared_norm();
        EXPECT_LE(kept, 1.0 + 1e-12);
        EXPECT_GE(kept, 0.0);
    }
}

TEST(Lifting, Linear) {
    std::mt19937_64 rng(8);
    const StateVector a = testing::random_state(kHV, 2, rng);
    const StateVector b = testing::random_state(kHV, 2, rng);
    const ModeTransform t(testing::random_contraction(2, rng));
    const Complex w(0.4, 0.9);
    const StateVector lhs = apply_mode_transform(add(a, b, w), t);
    const StateVector rhs = add(apply_mode_transform(a, t), apply_mode_transform(b, t), w);
    EXPECT_LT(testing::max_amplitude_difference(lhs, rhs), 1e-13);
}

TEST(Lifting, DimensionMismatchThrows) {
    EXPECT_THROW(apply_mode_transform(make_vacuum(kHV), ModeTransform::identity(3)), std::invalid_argument);
}

TEST(WavePlates, HalfWaveRotatesHToDiagonal) {
    const StateVector out = apply_mode_transform(photon(degrees(90.0)), hwp(degrees(22.5)));
    const double r = 1.0 / std::sqrt(2.0);
    EXPECT_NEAR(std::abs(out.amplitude(Occupation{1, 0})), r, 1e-15);
    EXPECT_NEAR(std::abs(out.amplitude(Occupation{0, 1})), r, 1e-15);
    EXPECT_NEAR(fidelity_up_to_global_phase(out, photon(degrees(45.0))) +
                    fidelity_up_to_global_phase(out, photon(degrees(-45.0))),
                1.0, 1e-14);
}

TEST(WavePlates, TwoQuarterWavesMakeAHalfWave) {
    const Eigen::Matrix2cd q = qwp(0.37).matrix();
    const Eigen::Matrix2cd h = hwp(0.37).matrix();
    const Eigen::Matrix2cd qq = q * q;
    // Equal up to a global phase.
    const Complex ratio = qq(0, 0) / h(0, 0);
    EXPECT_NEAR(std::abs(ratio), 1.0, 1e-14);
    EXPECT_NEAR((qq - ratio * h).cwiseAbs().maxCoeff(), 0.0, 1e-14);
    EXPECT_NEAR((hwp(0.2).matrix() * hwp(0.2).matrix() - Eigen::Matrix2cd::Identity()).cwiseAbs().maxCoeff(), 0.0, 1e-15);
}

TEST(WavePlates, QuarterWaveAt45MakesHCircular) {
    const StateVector out = to_circular_basis(apply_mode_transform(photon(degrees(90.0)), qwp(degrees(45.0))));
    EXPECT_NEAR(std::norm(out.amplitude(Occupation{1, 0})) + std::norm(out.amplitude(Occupation{0, 1})), 1.0, 1e-14);
    EXPECT_NEAR(std::min(std::norm(out.amplitude(Occupation{1, 0})), std::norm(out.amplitude(Occupation{0, 1}))), 0.0,
                1e-14);
}

TEST(PartialPolarizer, DiagonalPhotonSuccess) {
    EXPECT_THROW(partial_polarizer(1.2, 0.5), std::invalid_argument);
    EXPECT_THROW(partial_polarizer(0.5, -0.1), std::invalid_argument);
    const auto out = apply_postselected(photon(degrees(45.0)), partial_polarizer(1.0, 1.0 / std::sqrt(3.0)));
    ASSERT_TRUE(out.succeeded());
    EXPECT_NEAR(out.success_probability, 2.0 / 3.0, 1e-15);
    // (H + V/sqrt3) is linear polarization at 60 degrees from vertical.
    EXPECT_NEAR(fidelity_up_to_global_phase(*out.state, photon(degrees(60.0))), 1.0, 1e-14);
    EXPECT_FALSE(apply_postselected(photon(0.0), partial_polarizer(1.0, 0.0)).succeeded());
}

TEST(PhaseShift, MultiplesWithPhotonNumber) {
    const StateVector s = basis_state(kHV, Occupation{1, 3});
    const StateVector out = apply_mode_transform(s, phase_shift(0.25));
    EXPECT_NEAR(std::abs(out.amplitude(Occupation{1, 3}) - std::polar(1.0, 0.75)), 0.0, 1e-14);
}

TEST(CircularBasis, RoundTripAndLeftPhoton) {
    std::mt19937_64 rng(9);
    const StateVector s = testing::random_state(kHV, 3, rng);
    EXPECT_LT(testing::max_amplitude_difference(from_circular_basis(to_circular_basis(s)), s), 1e-14);
    const Eigen::Vector2cd l = circular_left();
    const StateVector left = apply_creation(make_vacuum(kHV), std::vector<Complex>{l(0), l(1)});
    EXPECT_NEAR(std::abs(to_circular_basis(left).amplitude(Occupation{1, 0})), 1.0, 1e-15);
    EXPECT_THROW(to_circular_basis(make_vacuum(circular_modes())), std::invalid_argument);
    EXPECT_THROW(from_circular_basis(make_vacuum(kHV)), std::invalid_argument);
}

TEST(Analyzer, PassesBasisAngleOnPlusPort) {
    for (double a : {0.0, 0.3, degrees(45.0), 2.0}) {
        const StateVector out = apply_mode_transform(photon(a), analyzer_rotation(a));
        EXPECT_NEAR(std::norm(out.amplitude(Occupation{1, 0})), 1.0, 1e-14);
        const StateVector orth = apply_mode_transform(photon(a - degrees(90.0)), analyzer_rotation(a));
        EXPECT_NEAR(std::norm(orth.amplitude(Occupation{0, 1})), 1.0, 1e-14);
    }
}

TEST(Combiners, PbsPutsOrthogonalPairInOneMode) {
    StateVector in = apply_creation(apply_creation(make_vacuum(two_arm_modes()), "in1H"), "in2V");
    const auto out = pbs_combine(in);
    ASSERT_TRUE(out.succeeded());
    EXPECT_NEAR(out.success_probability, 1.0, 1e-15);
    EXPECT_EQ(out.state->modes(), kHV);
    EXPECT_NEAR(std::abs(out.state->amplitude(Occupation{1, 1})), 1.0, 1e-15);
    EXPECT_FALSE(pbs_combine(apply_creation(make_vacuum(two_arm_modes()), "in1V")).succeeded());
    EXPECT_THROW(pbs_combine(make_vacuum(kHV)), std::invalid_argument);
}

TEST(Combiners, InterfaceIsUnitaryAndInjects) {
    EXPECT_TRUE(brewster_interface(0.9, 0.6).is_unitary());
    EXPECT_THROW(brewster_interface(1.1, 0.5), std::invalid_argument);
    const double tv = 0.6;
    const auto out = inject_lo(make_vacuum(kHV), 0.0, brewster_interface(1.0, tv));
    ASSERT_TRUE(out.succeeded());
    EXPECT_NEAR(out.success_probability, 1.0 - tv * tv, 1e-15);
    EXPECT_NEAR(std::abs(out.state->amplitude(Occupation{0, 1})), 1.0, 1e-15);
    // An H photon cannot reflect off an interface with t_H = 1.
    EXPECT_FALSE(inject_lo(make_vacuum(kHV), degrees(90.0), brewster_interface(1.0, tv)).succeeded());
}

TEST(PostSelection, DropsDarkModes) {
    const ModeSet ms{"a", "b", "c"};
    StateVector s(ms, 6, {{Occupation{1, 0, 0}, 0.6}, {Occupation{0, 1, 1}, 0.8}});
    const auto out = postselect_vacuum(s, {"c"});
    ASSERT_TRUE(out.succeeded());
    EXPECT_NEAR(out.success_probability, 0.36, 1e-15);
    EXPECT_EQ(out.state->modes(), (ModeSet{"a", "b"}));
    EXPECT_THROW(postselect_vacuum(s, {"x"}), std::invalid_argument);
    EXPECT_THROW(postselect_vacuum(s, {"a", "b", "c"}), std::invalid_argument);
}

TEST(Relabel, SizeMustMatch) {
    EXPECT_THROW(relabel(make_vacuum(kHV), ModeSet{"a"}), std::invalid_argument);
    const StateVector e = extend_modes(basis_state(kHV, Occupation{1, 2}), {"x"});
    EXPECT_NEAR(std::abs(e.amplitude(Occupation{1, 2, 0})), 1.0, 0.0);
}

} // namespace
} // namespace noonsim
