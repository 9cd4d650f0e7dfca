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

// Linear optical elements as mode transforms, and vacuum post-selection.
//
// Conventions:
//  * A transform M acts on creation operators as a_i^dagger -> sum_j M(j, i) a_j^dagger,
//    so for polarization modes (H, V) the columns of M are Jones vectors.
//  * Photon polarization angles are measured from vertical:
//    a_theta^dagger = sin(theta) a_H^dagger + cos(theta) a_V^dagger.
//  * Wave-plate angles are fast-axis angles measured from H, with
//    hwp(0) = diag(1, -1) and qwp(0) = diag(1, i).
//  * Circular modes: a_L^dagger = (a_H^dagger + i a_V^dagger) / sqrt(2),
//                    a_R^dagger = (a_H^dagger - i a_V^dagger) / sqrt(2).

#pragma once

#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/SVD>

#include "noonsim/fock.hpp"

namespace noonsim {

inline const ModeSet &polarization_modes() {
    static const ModeSet modes{"H", "V"};
    return modes;
}

inline const ModeSet &circular_modes() {
    static const ModeSet modes{"L", "R"};
    return modes;
}

/// A complex matrix over a mode set with all singular values <= 1.
class ModeTransform {
  public:
    ModeTransform(Eigen::MatrixXcd matrix, std::string label = {}) : matrix_(std::move(matrix)), label_(std::move(label)) {
        if (matrix_.rows() != matrix_.cols() || matrix_.rows() == 0) {
            throw std::invalid_argument("mode transform must be a non-empty square matrix");
        }
        if (!matrix_.allFinite()) {
            throw std::invalid_argument("mode transform entries must be finite");
        }
        Eigen::JacobiSVD<Eigen::MatrixXcd> svd(matrix_);
        max_singular_value_ = svd.singularValues().maxCoeff();
        if (max_singular_value_ > 1.0 + kTolerance) {
            throw std::invalid_argument("mode transform '" + label_ + "' has singular value " +
                                        std::to_string(max_singular_value_) + " > 1");
        }
        const auto n = matrix_.rows();
        unitary_ = (matrix_.adjoint() * matrix_ - Eigen::MatrixXcd::Identity(n, n)).cwiseAbs().maxCoeff() <= kTolerance;
    }

    static ModeTransform identity(std::size_t modes, std::string label = "identity") {
        const auto n = static_cast<Eigen::Index>(modes);
        return ModeTransform(Eigen::MatrixXcd::Identity(n, n), std::move(label));
    }

    const Eigen::MatrixXcd &matrix() const { return matrix_; }
    const std::string &label() const { return label_; }
    std::size_t dimension() const { return static_cast<std::size_t>(matrix_.rows()); }
    bool is_unitary() const { return unitary_; }
    double max_singular_value() const { return max_singular_value_; }

    /// This transform followed by `next`.
    ModeTransform then(const ModeTransform &next, std::string label = {}) const {
        if (next.dimension() != dimension()) {
            throw std::invalid_argument("cannot compose transforms of different dimension");
        }
        if (label.empty()) {
            label = label_ + "+" + next.label_;
        }
        return ModeTransform(next.matrix_ * matrix_, std::move(label));
    }

    /// Embeds this transform on `targets` of a larger mode set, identity elsewhere.
    ModeTransform embedded(std::size_t modes, const std::vector<std::size_t> &targets) const {
        if (targets.size() != dimension()) {
            throw std::invalid_argument("embedding target count does not match transform dimension");
        }
        const auto n = static_cast<Eigen::Index>(modes);
        Eigen::MatrixXcd big = Eigen::MatrixXcd::Identity(n, n);
        for (std::size_t a = 0; a < targets.size(); ++a) {
            for (std::size_t b = 0; b < targets.size(); ++b) {
                big(static_cast<Eigen::Index>(targets.at(a)), static_cast<Eigen::Index>(targets.at(b))) =
                    matrix_(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b));
            }
        }
        return ModeTransform(std::move(big), label_);
    }

  private:
    Eigen::MatrixXcd matrix_;
    std::string label_;
    double max_singular_value_ = 0.0;
    bool unitary_ = false;
};

inline Complex fock_amplitude_oracle(const ModeTransform &m, const Occupation &in, const Occupation &out) {
    return fock_amplitude_oracle(m.matrix(), in, out);
}

namespace detail {

using Polynomial = std::map<Occupation, Complex>;

inline std::uint64_t multinomial(const std::vector<int> &parts) {
    // Built up as a product of binomials so every intermediate stays integral.
    std::uint64_t result = 1;
    int running = 0;
    for (int k : parts) {
        for (int i = 1; i <= k; ++i) {
            ++running;
            result = result * static_cast<std::uint64_t>(running) / static_cast<std::uint64_t>(i);
        }
    }
    return result;
}

/// (sum_j column(j) x_j)^n as monomial exponents -> coefficient.
inline Polynomial power_of_linear_form(const Eigen::VectorXcd &column, int n) {
    Polynomial out;
    const auto modes = static_cast<std::size_t>(column.size());
    for (const auto &exps : occupations_with_total(modes, n)) {
        Complex c = static_cast<double>(multinomial(exps.counts()));
        for (std::size_t j = 0; j < modes && c != Complex{}; ++j) {
            if (exps[j] > 0) {
                c *= std::pow(column(static_cast<Eigen::Index>(j)), exps[j]);
            }
        }
        if (c != Complex{}) {
            out.emplace(exps, c);
        }
    }
    return out;
}

inline Polynomial multiply(const Polynomial &a, const Polynomial &b) {
    Polynomial out;
    for (const auto &[ea, ca] : a) {
        for (const auto &[eb, cb] : b) {
            std::vector<int> e(ea.size());
            for (std::size_t i = 0; i < e.size(); ++i) {
                e[i] = ea[i] + eb[i];
            }
            out[Occupation(std::move(e))] += ca * cb;
        }
    }
    return out;
}

} // namespace detail

/// Substitutes a_i^dagger -> sum_j M(j, i) a_j^dagger in every basis element.
///
/// Amplitudes are converted to monomial coefficients (divide by sqrt(prod n!)),
/// the product of powers of the substituted linear forms is expanded with
/// integer multinomial weights, and the result is converted back (multiply by
/// sqrt(prod n!)). Sub-unitary M yields an unnormalized state whose squared
/// norm is the probability that no photon leaves through the implicit loss
/// channels.
inline StateVector apply_mode_transform(const StateVector &state, const ModeTransform &m) {
    const std::size_t modes = state.modes().size();
    if (m.dimension() != modes) {
        throw std::invalid_argument("transform '" + m.label() + "' has dimension " + std::to_string(m.dimension()) +
                                    " but the state has " + std::to_string(modes) + " modes");
    }
    std::map<std::pair<std::size_t, int>, detail::Polynomial> powers;
    auto power = [&](std::size_t mode, int n) -> const detail::Polynomial & {
        auto key = std::make_pair(mode, n);
        auto it = powers.find(key);
        if (it == powers.end()) {
            it = powers.emplace(key, detail::power_of_linear_form(m.matrix().col(static_cast<Eigen::Index>(mode)), n))
                     .first;
        }
        return it->second;
    };

    detail::Polynomial accumulated;
    for (const auto &[occ, amp] : state.amplitudes()) {
        detail::Polynomial poly{{Occupation::zeros(modes), amp / sqrt_factorial_product(occ)}};
        for (std::size_t i = 0; i < modes; ++i) {
            if (occ[i] > 0) {
                poly = detail::multiply(poly, power(i, occ[i]));
            }
        }
        for (const auto &[exps, c] : poly) {
            accumulated[exps] += c;
        }
    }

    StateVector::Amplitudes out;
    for (const auto &[exps, c] : accumulated) {
        Complex amp = c * sqrt_factorial_product(exps);
        if (std::abs(amp) >= kPruneThreshold) {
            out.emplace(exps, amp);
        }
    }
    return StateVector(state.modes(), state.n_max(), std::move(out));
}

/// Same occupations and amplitudes under a new, equally sized mode set.
inline StateVector relabel(const StateVector &state, const ModeSet &modes) {
    if (modes.size() != state.modes().size()) {
        throw std::invalid_argument("relabel requires a mode set of the same size");
    }
    return StateVector(modes, state.n_max(), state.amplitudes());
}

/// Appends vacuum modes to a state.
inline StateVector extend_modes(const StateVector &state, const std::vector<std::string> &extra) {
    std::vector<std::string> names = state.modes().names();
    names.insert(names.end(), extra.begin(), extra.end());
    StateVector::Amplitudes out;
    for (const auto &[occ, amp] : state.amplitudes()) {
        std::vector<int> c = occ.counts();
        c.resize(names.size(), 0);
        out.emplace(Occupation(std::move(c)), amp);
    }
    return StateVector(ModeSet(std::move(names)), state.n_max(), std::move(out));
}

struct PostSelectionOutcome {
    /// Renormalized conditional state; empty when the outcome has probability 0.
    std::optional<StateVector> state;
    double success_probability = 0.0;

    bool succeeded() const { return state.has_value(); }
};

/// Conditions on zero photons in `dark_modes` and drops those modes.
inline PostSelectionOutcome postselect_vacuum(const StateVector &state, const std::vector<std::string> &dark_modes) {
    std::vector<bool> dark(state.modes().size(), false);
    for (const auto &name : dark_modes) {
        dark[state.modes().label(name).index] = true;
    }
    std::vector<std::string> kept_names;
    for (std::size_t i = 0; i < dark.size(); ++i) {
        if (!dark[i]) {
            kept_names.push_back(state.modes().name(i));
        }
    }
    if (kept_names.empty()) {
        throw std::invalid_argument("post-selection must leave at least one mode");
    }

    StateVector::Amplitudes kept;
    double kept_norm = 0.0;
    for (const auto &[occ, amp] : state.amplitudes()) {
        bool vacuum = true;
        std::vector<int> rest;
        for (std::size_t i = 0; i < dark.size(); ++i) {
            if (dark[i]) {
                vacuum = vacuum && occ[i] == 0;
            } else {
                rest.push_back(occ[i]);
            }
        }
        if (vacuum) {
            kept.emplace(Occupation(std::move(rest)), amp);
            kept_norm += std::norm(amp);
        }
    }

    const double input_norm = state.squared_norm();
    PostSelectionOutcome outcome;
    if (input_norm == 0.0 || kept_norm <= kPruneThreshold * kPruneThreshold) {
        return outcome;
    }
    outcome.success_probability = kept_norm / input_norm;
    outcome.state = StateVector(ModeSet(std::move(kept_names)), state.n_max(), std::move(kept)).normalized();
    return outcome;
}

/// Applies a (possibly sub-unitary) transform and conditions on no photon
/// being lost: success is the squared-norm ratio, the state is renormalized.
inline PostSelectionOutcome apply_postselected(const StateVector &state, const ModeTransform &m) {
    StateVector out = apply_mode_transform(state, m);
    PostSelectionOutcome outcome;
    const double in = state.squared_norm();
    const double kept = out.squared_norm();
    if (in == 0.0 || kept <= kPruneThreshold * kPruneThreshold) {
        return outcome;
    }
    outcome.success_probability = kept / in;
    outcome.state = out.normalized();
    return outcome;
}

// ---------------------------------------------------------------------------
// Polarization optics

/// Jones vector (H, V) of linear polarization at `theta` from vertical.
inline Eigen::Vector2cd linear_polarization(double theta) {
    return {Complex{std::sin(theta), 0.0}, Complex{std::cos(theta), 0.0}};
}

inline Eigen::Vector2cd circular_left() { return Eigen::Vector2cd(1.0, Complex{0.0, 1.0}) / std::sqrt(2.0); }
inline Eigen::Vector2cd circular_right() { return Eigen::Vector2cd(1.0, Complex{0.0, -1.0}) / std::sqrt(2.0); }

/// State after applying a_theta^dagger (linear, from vertical) to `state`'s H/V modes.
inline StateVector create_linear(const StateVector &state, double theta, std::size_t h_index = 0,
                                 std::size_t v_index = 1) {
    std::vector<Complex> c(state.modes().size(), Complex{});
    c.at(h_index) = std::sin(theta);
    c.at(v_index) = std::cos(theta);
    return apply_creation(state, c);
}

inline Eigen::Matrix2cd rotation(double theta) {
    Eigen::Matrix2cd r;
    r << std::cos(theta), -std::sin(theta), std::sin(theta), std::cos(theta);
    return r;
}

/// Half-wave plate, fast axis at `theta` from H.
inline ModeTransform hwp(double theta) {
    Eigen::Matrix2cd m = rotation(theta) * Eigen::Vector2cd(1.0, -1.0).asDiagonal() * rotation(-theta);
    return ModeTransform(m, "hwp");
}

/// Quarter-wave plate, fast axis at `theta` from H.
inline ModeTransform qwp(double theta) {
    Eigen::Matrix2cd m =
        rotation(theta) * Eigen::Vector2cd(1.0, Complex{0.0, 1.0}).asDiagonal() * rotation(-theta);
    return ModeTransform(m, "qwp");
}

/// Polarization-dependent amplitude transmissions; intensity T = t^2.
inline ModeTransform partial_polarizer(double t_h, double t_v) {
    if (!(t_h >= 0.0 && t_h <= 1.0) || !(t_v >= 0.0 && t_v <= 1.0)) {
        throw std::invalid_argument("partial polarizer amplitudes must lie in [0, 1]");
    }
    Eigen::Matrix2cd m = Eigen::Matrix2cd::Zero();
    m(0, 0) = t_h;
    m(1, 1) = t_v;
    return ModeTransform(m, "partial_polarizer");
}

/// Phase `phi` on the V component: an n-photon V term picks up exp(i n phi).
inline ModeTransform phase_shift(double phi) {
    Eigen::Matrix2cd m = Eigen::Matrix2cd::Zero();
    m(0, 0) = 1.0;
    m(1, 1) = std::polar(1.0, phi);
    return ModeTransform(m, "phase_shift");
}

/// Columns map (H, V) to (+, -) analyzer modes for a linear analyzer whose
/// + port passes polarization `basis_angle` (from vertical) and whose - port
/// passes the orthogonal polarization at basis_angle - 90 degrees.
inline ModeTransform analyzer_rotation(double basis_angle) {
    const double s = std::sin(basis_angle);
    const double c = std::cos(basis_angle);
    Eigen::Matrix2cd m;
    m << s, c, -c, s;
    return ModeTransform(m, "analyzer");
}

/// Rewrites an (H, V) state in the (L, R) circular basis.
inline StateVector to_circular_basis(const StateVector &state) {
    if (state.modes() != polarization_modes()) {
        throw std::invalid_argument("circular conversion expects an (H, V) state");
    }
    // a_H = (a_L + a_R)/sqrt2 and a_V = -i (a_L - a_R)/sqrt2 as creation operators.
    const double r = 1.0 / std::sqrt(2.0);
    Eigen::Matrix2cd m;
    m << r, Complex{0.0, -r}, r, Complex{0.0, r};
    return relabel(apply_mode_transform(state, ModeTransform(m, "to_circular")), circular_modes());
}

/// Rewrites an (L, R) state in the (H, V) basis.
inline StateVector from_circular_basis(const StateVector &state) {
    if (state.modes() != circular_modes()) {
        throw std::invalid_argument("linear conversion expects an (L, R) state");
    }
    const double r = 1.0 / std::sqrt(2.0);
    Eigen::Matrix2cd m;
    m << r, r, Complex{0.0, r}, Complex{0.0, -r};
    return relabel(apply_mode_transform(state, ModeTransform(m, "from_circular")), polarization_modes());
}

// ---------------------------------------------------------------------------
// Spatial-mode combiners

/// Modes of two input arms before the polarizing beamsplitter.
inline const ModeSet &two_arm_modes() {
    static const ModeSet modes{"in1H", "in1V", "in2H", "in2V"};
    return modes;
}

/// Signal and dark-port polarization modes around one beamsplitting interface.
inline const ModeSet &interface_modes() {
    static const ModeSet modes{"H", "V", "darkH", "darkV"};
    return modes;
}

/// Polarizing beamsplitter: H transmits and V reflects, so arm-1 H and arm-2 V
/// share the bright output. Conditions on vacuum in the other output.
inline PostSelectionOutcome pbs_combine(const StateVector &state) {
    if (state.modes().size() != 4) {
        throw std::invalid_argument("pbs_combine expects a four-mode (in1H, in1V, in2H, in2V) state");
    }
    Eigen::Matrix4cd route = Eigen::Matrix4cd::Zero();
    route(0, 0) = 1.0; // in1H -> H
    route(3, 1) = 1.0; // in1V -> darkV
    route(2, 2) = 1.0; // in2H -> darkH
    route(1, 3) = 1.0; // in2V -> V
    StateVector routed = relabel(apply_mode_transform(state, ModeTransform(route, "pbs")), interface_modes());
    return postselect_vacuum(routed, {"darkH", "darkV"});
}

/// Lossless interface between the signal path and a side port, per
/// polarization: [[t, r], [-r, t]] over (signal, dark) with r = sqrt(1 - t^2).
inline ModeTransform brewster_interface(double t_h, double t_v) {
    if (!(t_h >= 0.0 && t_h <= 1.0) || !(t_v >= 0.0 && t_v <= 1.0)) {
        throw std::invalid_argument("interface transmissions must lie in [0, 1]");
    }
    const double r_h = std::sqrt(1.0 - t_h * t_h);
    const double r_v = std::sqrt(1.0 - t_v * t_v);
    Eigen::Matrix4cd m = Eigen::Matrix4cd::Zero();
    m(0, 0) = t_h;
    m(2, 0) = -r_h;
    m(0, 2) = r_h;
    m(2, 2) = t_h;
    m(1, 1) = t_v;
    m(3, 1) = -r_v;
    m(1, 3) = r_v;
    m(3, 3) = t_v;
    return ModeTransform(m, "interface");
}

/// Adds one photon polarized at `lo_polarization` (from vertical) on the dark
/// side of `bs`, applies `bs` over (H, V, darkH, darkV) and conditions on
/// vacuum in the dark output.
inline PostSelectionOutcome inject_lo(const StateVector &state, double lo_polarization, const ModeTransform &bs) {
    if (state.modes() != polarization_modes()) {
        throw std::invalid_argument("inject_lo expects an (H, V) signal state");
    }
    if (bs.dimension() != 4) {
        throw std::invalid_argument("inject_lo expects a 4x4 interface transform over (H, V, darkH, darkV)");
    }
    StateVector extended = relabel(extend_modes(state, {"darkH", "darkV"}), interface_modes());
    StateVector with_lo = create_linear(extended, lo_polarization, 2, 3);
    StateVector mixed = apply_mode_transform(with_lo, bs);
    PostSelectionOutcome outcome = postselect_vacuum(mixed, {"darkH", "darkV"});
    // Success is relative to the pre-injection norm, which create_linear preserves.
    return outcome;
}

} // namespace noonsim
