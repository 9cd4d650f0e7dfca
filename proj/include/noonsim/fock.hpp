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

// Few-photon bosonic states over a small set of labeled modes.
//
// A StateVector is a sparse map from occupation-number basis states to complex
// amplitudes, capped at a total photon number n_max. All operations are pure:
// they return new values and never mutate their inputs.

#pragma once

#include <algorithm>
#include <cmath>
#include <compare>
#include <complex>
#include <cstddef>
#include <map>
#include <numeric>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace noonsim {

using Complex = std::complex<double>;

inline constexpr double kTolerance = 1e-12;
inline constexpr double kPruneThreshold = 1e-14;
inline constexpr double kNormTolerance = 1e-10;
inline constexpr int kDefaultMaxPhotons = 6;
inline constexpr double kPi = 3.14159265358979323846;

/// Raised when a computation is well-posed in its inputs but numerically
/// degenerate (aliasing, singular fits, stationary points).
class NumericError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

inline double degrees(double deg) { return deg * kPi / 180.0; }
inline double to_degrees(double rad) { return rad * 180.0 / kPi; }

struct ModeLabel {
    std::string name;
    std::size_t index = 0;

    bool operator==(const ModeLabel &) const = default;
};

/// Ordered set of uniquely named modes.
class ModeSet {
  public:
    ModeSet() = default;

    explicit ModeSet(std::vector<std::string> names) : names_(std::move(names)) {
        for (std::size_t i = 0; i < names_.size(); ++i) {
            if (names_[i].empty()) {
                throw std::invalid_argument("mode name must not be empty");
            }
            for (std::size_t j = 0; j < i; ++j) {
                if (names_[i] == names_[j]) {
                    throw std::invalid_argument("duplicate mode name '" + names_[i] + "'");
                }
            }
        }
    }

    ModeSet(std::initializer_list<std::string> names) : ModeSet(std::vector<std::string>(names)) {}

    std::size_t size() const { return names_.size(); }
    bool empty() const { return names_.empty(); }
    const std::vector<std::string> &names() const { return names_; }
    const std::string &name(std::size_t i) const { return names_.at(i); }

    std::optional<std::size_t> find(const std::string &name) const {
        auto it = std::find(names_.begin(), names_.end(), name);
        if (it == names_.end()) {
            return std::nullopt;
        }
        return static_cast<std::size_t>(it - names_.begin());
    }

    ModeLabel label(const std::string &name) const {
        auto idx = find(name);
        if (!idx) {
            throw std::invalid_argument("unknown mode '" + name + "'");
        }
        return {name, *idx};
    }

    ModeLabel label(std::size_t i) const { return {names_.at(i), i}; }

    bool operator==(const ModeSet &) const = default;

  private:
    std::vector<std::string> names_;
};

/// Photon counts, one per mode. Ordered lexicographically.
class Occupation {
  public:
    Occupation() = default;
    explicit Occupation(std::vector<int> counts) : counts_(std::move(counts)) {
        for (int c : counts_) {
            if (c < 0) {
                throw std::invalid_argument("occupation counts must be non-negative");
            }
        }
    }
    Occupation(std::initializer_list<int> counts) : Occupation(std::vector<int>(counts)) {}

    static Occupation zeros(std::size_t modes) { return Occupation(std::vector<int>(modes, 0)); }

    std::size_t size() const { return counts_.size(); }
    int operator[](std::size_t i) const { return counts_[i]; }
    const std::vector<int> &counts() const { return counts_; }
    int total() const { return std::accumulate(counts_.begin(), counts_.end(), 0); }

    Occupation with(std::size_t i, int n) const {
        Occupation out = *this;
        out.counts_.at(i) = n;
        return out;
    }

    auto operator<=>(const Occupation &) const = default;
    bool operator==(const Occupation &) const = default;

  private:
    std::vector<int> counts_;
};

/// n! as a double; exact for the photon numbers this library handles.
inline double factorial(int n) {
    double f = 1.0;
    for (int k = 2; k <= n; ++k) {
        f *= k;
    }
    return f;
}

/// sqrt(prod n_i!), the conversion factor between Fock amplitudes and
/// monomial coefficients of creation-operator polynomials.
inline double sqrt_factorial_product(const Occupation &occ) {
    double p = 1.0;
    for (int n : occ.counts()) {
        p *= factorial(n);
    }
    return std::sqrt(p);
}

class StateVector {
  public:
    using Amplitudes = std::map<Occupation, Complex>;

    StateVector(ModeSet modes, int n_max, Amplitudes amplitudes = {})
        : modes_(std::move(modes)), n_max_(n_max), amplitudes_(std::move(amplitudes)) {
        if (modes_.empty()) {
            throw std::invalid_argument("state requires a non-empty mode set");
        }
        if (n_max_ < 0) {
            throw std::invalid_argument("n_max must be non-negative");
        }
        for (const auto &[occ, amp] : amplitudes_) {
            if (occ.size() != modes_.size()) {
                throw std::invalid_argument("occupation length does not match mode count");
            }
            if (occ.total() > n_max_) {
                throw std::invalid_argument("occupation exceeds photon-number cap n_max=" +
                                            std::to_string(n_max_));
            }
            if (!std::isfinite(amp.real()) || !std::isfinite(amp.imag())) {
                throw std::invalid_argument("amplitudes must be finite");
            }
        }
    }

    const ModeSet &modes() const { return modes_; }
    int n_max() const { return n_max_; }
    const Amplitudes &amplitudes() const { return amplitudes_; }
    std::size_t size() const { return amplitudes_.size(); }

    Complex amplitude(const Occupation &occ) const {
        auto it = amplitudes_.find(occ);
        return it == amplitudes_.end() ? Complex{} : it->second;
    }

    double squared_norm() const {
        double s = 0.0;
        for (const auto &[occ, amp] : amplitudes_) {
            s += std::norm(amp);
        }
        return s;
    }

    double norm() const { return std::sqrt(squared_norm()); }

    bool is_normalized(double tol = kNormTolerance) const { return std::abs(squared_norm() - 1.0) <= tol; }

    /// Total photon number if every populated basis element agrees on it.
    std::optional<int> photon_number() const {
        std::optional<int> n;
        for (const auto &[occ, amp] : amplitudes_) {
            if (std::abs(amp) < kPruneThreshold) {
                continue;
            }
            if (!n) {
                n = occ.total();
            } else if (*n != occ.total()) {
                return std::nullopt;
            }
        }
        return n;
    }

    StateVector scaled(Complex factor) const {
        Amplitudes out;
        for (const auto &[occ, amp] : amplitudes_) {
            out.emplace(occ, amp * factor);
        }
        return StateVector(modes_, n_max_, std::move(out));
    }

    StateVector normalized() const {
        double n = norm();
        if (n == 0.0) {
            throw std::invalid_argument("cannot normalize a zero-norm state");
        }
        return scaled(1.0 / n);
    }

    StateVector pruned(double threshold = kPruneThreshold) const {
        Amplitudes out;
        for (const auto &[occ, amp] : amplitudes_) {
            if (std::abs(amp) >= threshold) {
                out.emplace(occ, amp);
            }
        }
        return StateVector(modes_, n_max_, std::move(out));
    }

    StateVector with_max_photons(int n_max) const { return StateVector(modes_, n_max, amplitudes_); }

  private:
    ModeSet modes_;
    int n_max_ = kDefaultMaxPhotons;
    Amplitudes amplitudes_;
};

inline void require_same_modes(const StateVector &a, const StateVector &b) {
    if (a.modes() != b.modes()) {
        throw std::invalid_argument("states are defined over different mode sets");
    }
}

inline StateVector make_vacuum(const ModeSet &modes, int n_max = kDefaultMaxPhotons) {
    if (modes.empty()) {
        throw std::invalid_argument("vacuum requires a non-empty mode set");
    }
    return StateVector(modes, n_max, {{Occupation::zeros(modes.size()), Complex{1.0, 0.0}}});
}

inline StateVector basis_state(const ModeSet &modes, const Occupation &occ, int n_max = kDefaultMaxPhotons) {
    return StateVector(modes, n_max, {{occ, Complex{1.0, 0.0}}});
}

/// Sum of two states over the same modes; the cap is the larger of the two.
inline StateVector add(const StateVector &a, const StateVector &b, Complex b_weight = 1.0) {
    require_same_modes(a, b);
    StateVector::Amplitudes out = a.amplitudes();
    for (const auto &[occ, amp] : b.amplitudes()) {
        out[occ] += b_weight * amp;
    }
    return StateVector(a.modes(), std::max(a.n_max(), b.n_max()), std::move(out)).pruned();
}

/// Applies sum_i c_i a_i^dagger. Each amplitude on |..., n_i, ...> feeds
/// |..., n_i + 1, ...> with weight c_i sqrt(n_i + 1).
inline StateVector apply_creation(const StateVector &state, std::span<const Complex> coefficients) {
    if (coefficients.size() != state.modes().size()) {
        throw std::invalid_argument("creation coefficients do not match mode count");
    }
    StateVector::Amplitudes out;
    for (const auto &[occ, amp] : state.amplitudes()) {
        if (occ.total() + 1 > state.n_max()) {
            throw std::invalid_argument("creation would exceed photon-number cap n_max=" +
                                        std::to_string(state.n_max()));
        }
        for (std::size_t i = 0; i < coefficients.size(); ++i) {
            if (coefficients[i] == Complex{}) {
                continue;
            }
            int n = occ[i];
            out[occ.with(i, n + 1)] += amp * coefficients[i] * std::sqrt(static_cast<double>(n + 1));
        }
    }
    return StateVector(state.modes(), state.n_max(), std::move(out)).pruned();
}

inline StateVector apply_creation(const StateVector &state, const ModeLabel &mode) {
    if (mode.index >= state.modes().size() || state.modes().name(mode.index) != mode.name) {
        throw std::invalid_argument("mode '" + mode.name + "' is not part of this state's mode set");
    }
    std::vector<Complex> c(state.modes().size(), Complex{});
    c[mode.index] = 1.0;
    return apply_creation(state, c);
}

inline StateVector apply_creation(const StateVector &state, const std::string &mode_name) {
    return apply_creation(state, state.modes().label(mode_name));
}

/// <a|b>, conjugate-linear in the first argument.
inline Complex inner_product(const StateVector &a, const StateVector &b) {
    require_same_modes(a, b);
    Complex s{};
    for (const auto &[occ, amp] : a.amplitudes()) {
        auto it = b.amplitudes().find(occ);
        if (it != b.amplitudes().end()) {
            s += std::conj(amp) * it->second;
        }
    }
    return s;
}

inline double fidelity_up_to_global_phase(const StateVector &a, const StateVector &b) {
    double na = a.squared_norm();
    double nb = b.squared_norm();
    if (na == 0.0 || nb == 0.0) {
        throw std::invalid_argument("fidelity is undefined for zero-norm states");
    }
    double f = std::norm(inner_product(a, b)) / (na * nb);
    return std::clamp(f, 0.0, 1.0);
}

/// <A_N> for A_N = |0,N><N,0| + |N,0><0,N| on a normalized two-mode state.
inline double expectation_A_N(const StateVector &state, int n) {
    if (state.modes().size() != 2) {
        throw std::invalid_argument("A_N is defined on two-mode states");
    }
    if (n < 1) {
        throw std::invalid_argument("A_N requires N >= 1");
    }
    if (!state.is_normalized()) {
        throw std::invalid_argument("A_N expectation requires a normalized state");
    }
    Complex a = state.amplitude(Occupation{n, 0});
    Complex b = state.amplitude(Occupation{0, n});
    return 2.0 * (std::conj(a) * b).real();
}

/// Either the swap operator A_N or a projector onto one occupation pattern.
struct MeasurementOperator {
    enum class Kind { swap, projector };

    Kind kind = Kind::swap;
    int n = 1;
    Occupation target;

    static MeasurementOperator swap(int n) { return {Kind::swap, n, {}}; }
    static MeasurementOperator projector(Occupation target) { return {Kind::projector, 0, std::move(target)}; }
};

inline double expectation(const StateVector &state, const MeasurementOperator &op) {
    if (op.kind == MeasurementOperator::Kind::swap) {
        return expectation_A_N(state, op.n);
    }
    return std::norm(state.amplitude(op.target)) / state.squared_norm();
}

namespace detail {

inline Complex permanent_by_permutations(const Eigen::MatrixXcd &m) {
    const auto n = static_cast<std::size_t>(m.rows());
    if (n == 0) {
        return 1.0;
    }
    std::vector<int> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    Complex total{};
    do {
        Complex term = 1.0;
        for (std::size_t r = 0; r < n; ++r) {
            term *= m(static_cast<Eigen::Index>(r), perm[r]);
        }
        total += term;
    } while (std::next_permutation(perm.begin(), perm.end()));
    return total;
}

} // namespace detail

/// <out| U(M) |in> from the permanent of M with row i repeated out_i times
/// and column j repeated in_j times. Independent of the polynomial lifting
/// used by apply_mode_transform; intended as a verification oracle.
inline Complex fock_amplitude_oracle(const Eigen::MatrixXcd &m, const Occupation &in, const Occupation &out) {
    if (m.rows() != m.cols() || static_cast<std::size_t>(m.rows()) != in.size() || in.size() != out.size()) {
        throw std::invalid_argument("oracle dimensions do not match");
    }
    if (in.total() != out.total()) {
        return 0.0;
    }
    std::vector<Eigen::Index> rows, cols;
    for (std::size_t i = 0; i < out.size(); ++i) {
        rows.insert(rows.end(), static_cast<std::size_t>(out[i]), static_cast<Eigen::Index>(i));
    }
    for (std::size_t j = 0; j < in.size(); ++j) {
        cols.insert(cols.end(), static_cast<std::size_t>(in[j]), static_cast<Eigen::Index>(j));
    }
    const auto n = static_cast<Eigen::Index>(rows.size());
    Eigen::MatrixXcd sub(n, n);
    for (Eigen::Index r = 0; r < n; ++r) {
        for (Eigen::Index c = 0; c < n; ++c) {
            sub(r, c) = m(rows[static_cast<std::size_t>(r)], cols[static_cast<std::size_t>(c)]);
        }
    }
    return detail::permanent_by_permutations(sub) / (sqrt_factorial_product(in) * sqrt_factorial_product(out));
}

/// Every occupation over `modes` modes with exactly `photons` photons, in
/// lexicographic order.
inline std::vector<Occupation> occupations_with_total(std::size_t modes, int photons) {
    std::vector<Occupation> out;
    std::vector<int> counts(modes, 0);
    auto rec = [&](auto &&self, std::size_t i, int remaining) -> void {
        if (i + 1 == modes) {
            counts[i] = remaining;
            out.emplace_back(counts);
            return;
        }
        for (int k = 0; k <= remaining; ++k) {
            counts[i] = k;
            self(self, i + 1, remaining - k);
        }
    };
    if (modes == 0) {
        return out;
    }
    rec(rec, 0, photons);
    std::sort(out.begin(), out.end());
    return out;
}

} // namespace noonsim
