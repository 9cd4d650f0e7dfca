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

// Ordered element records describing an optical chain, with at most one
// parameter bound to the scanned phase.

#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "noonsim/elements.hpp"

namespace noonsim {

enum class ElementKind { pbs_combine, hwp, qwp, partial_polarizer, inject_lo, phase_shift };

inline std::string to_string(ElementKind kind) {
    switch (kind) {
    case ElementKind::pbs_combine: return "pbs_combine";
    case ElementKind::hwp: return "hwp";
    case ElementKind::qwp: return "qwp";
    case ElementKind::partial_polarizer: return "partial_polarizer";
    case ElementKind::inject_lo: return "inject_lo";
    case ElementKind::phase_shift: return "phase_shift";
    }
    return "unknown";
}

inline ElementKind element_kind_from_string(const std::string &s) {
    for (auto k : {ElementKind::pbs_combine, ElementKind::hwp, ElementKind::qwp, ElementKind::partial_polarizer,
                   ElementKind::inject_lo, ElementKind::phase_shift}) {
        if (to_string(k) == s) {
            return k;
        }
    }
    throw std::invalid_argument("unknown element kind '" + s + "'");
}

/// Parameter names each element kind requires. Angles are stored in radians.
inline std::vector<std::string> required_parameters(ElementKind kind) {
    switch (kind) {
    case ElementKind::pbs_combine: return {};
    case ElementKind::hwp:
    case ElementKind::qwp: return {"theta"};
    case ElementKind::partial_polarizer: return {"tH", "tV"};
    case ElementKind::inject_lo: return {"lo", "tH", "tV"};
    case ElementKind::phase_shift: return {"phi"};
    }
    return {};
}

inline bool is_angle_parameter(const std::string &name) { return name == "theta" || name == "phi" || name == "lo"; }

struct CircuitElement {
    ElementKind kind = ElementKind::hwp;
    std::map<std::string, double> params;
    /// Parameter taking the scan value (added to params[name] if present).
    std::optional<std::string> scanned;
    /// phase_shift only: choose the phase origin so the incoming NOON state
    /// has zero relative phase at scan value 0.
    bool auto_origin = false;

    double param(const std::string &name) const {
        auto it = params.find(name);
        return it == params.end() ? 0.0 : it->second;
    }
};

class Circuit {
  public:
    Circuit() = default;
    explicit Circuit(std::vector<CircuitElement> elements) : elements_(std::move(elements)) {
        int scans = 0;
        for (const auto &e : elements_) {
            for (const auto &p : required_parameters(e.kind)) {
                bool scanned = e.scanned && *e.scanned == p;
                if (!scanned && !e.params.count(p)) {
                    throw std::invalid_argument(to_string(e.kind) + " requires parameter '" + p + "'");
                }
            }
            if (e.scanned) {
                auto req = required_parameters(e.kind);
                if (std::find(req.begin(), req.end(), *e.scanned) == req.end() || !is_angle_parameter(*e.scanned)) {
                    throw std::invalid_argument("parameter '" + *e.scanned + "' of " + to_string(e.kind) +
                                                " cannot be scanned");
                }
                ++scans;
            }
            if (e.auto_origin && e.kind != ElementKind::phase_shift) {
                throw std::invalid_argument("automatic phase origin applies to phase_shift only");
            }
        }
        if (scans > 1) {
            throw std::invalid_argument("at most one element may carry the scan placeholder");
        }
    }

    const std::vector<CircuitElement> &elements() const { return elements_; }
    bool has_scan() const {
        return std::any_of(elements_.begin(), elements_.end(), [](const auto &e) { return e.scanned.has_value(); });
    }
    bool starts_with_pbs() const { return !elements_.empty() && elements_.front().kind == ElementKind::pbs_combine; }

  private:
    std::vector<CircuitElement> elements_;
};

} // namespace noonsim
