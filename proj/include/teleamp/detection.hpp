// Copyright 2026 The teleamp Authors
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

// Measurement models and conditional states.

#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <numeric>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "teleamp/coherent_branch.hpp"
#include "teleamp/detector.hpp"
#include "teleamp/errors.hpp"
#include "teleamp/fock.hpp"
#include "teleamp/linear_optics.hpp"

namespace teleamp {

inline constexpr double kZeroProbability = 1e-15;

/// Off/On belong to the on/off detector; the rest are ideal number projections.
enum class Outcome { Off, On, Vacuum, SinglePhoton, MultiPhoton };

inline const char *to_string(Outcome o) {
    switch (o) {
        case Outcome::Off: return "off";
        case Outcome::On: return "on";
        case Outcome::Vacuum: return "0";
        case Outcome::SinglePhoton: return "1";
        case Outcome::MultiPhoton: return ">=2";
    }
    return "?";
}

struct PortOutcome {
    std::string port;
    std::size_t mode = 0;
    Outcome outcome = Outcome::Off;
    DetectorModel detector{};

    /// <n|Pi|n>.
    double weight(std::size_t n) const {
        switch (outcome) {
            case Outcome::Off: return detector.off_weight(n);
            case Outcome::On: return detector.on_weight(n);
            case Outcome::Vacuum: return n == 0 ? 1.0 : 0.0;
            case Outcome::SinglePhoton: return n == 1 ? 1.0 : 0.0;
            case Outcome::MultiPhoton: return n >= 2 ? 1.0 : 0.0;
        }
        return 0.0;
    }

    /// <bra|Pi|ket> for coherent states.
    Complex kernel(Complex bra, Complex ket) const {
        const Complex z = std::conj(bra) * ket;
        const double e = std::exp(-0.5 * std::norm(bra) - 0.5 * std::norm(ket));
        switch (outcome) {
            case Outcome::Off: return detector.off_kernel(bra, ket);
            case Outcome::On: return detector.on_kernel(bra, ket);
            case Outcome::Vacuum: return e;
            case Outcome::SinglePhoton: return e * z;
            case Outcome::MultiPhoton: {
                // e (e^z - 1 - z) without cancellation for weak fields.
                Complex term = z * z / 2.0;
                Complex sum = 0.0;
                if (std::abs(z) > 0.5) {
                    return e * (std::exp(z) - 1.0 - z);
                }
                for (int n = 3; n < 30 && term != Complex{0.0}; ++n) {
                    sum += term;
                    term *= z / static_cast<double>(n);
                }
                return e * sum;
            }
        }
        return 0.0;
    }

    /// Rank-one outcomes leave a pure state; returns n for |n><n|.
    std::optional<std::size_t> projector_level() const {
        if (outcome == Outcome::Vacuum) {
            return 0;
        }
        if (outcome == Outcome::SinglePhoton) {
            return 1;
        }
        if ((outcome == Outcome::Off) && detector.efficiency == 1.0) {
            return 0;  // e^{-nu} |0><0|
        }
        return std::nullopt;
    }
};

/// Joint outcome over distinct ports.
class ClickPattern {
  public:
    ClickPattern() = default;

    explicit ClickPattern(std::vector<PortOutcome> entries) : entries_(std::move(entries)) {
        for (std::size_t i = 0; i < entries_.size(); ++i) {
            entries_[i].detector.validate();
            for (std::size_t j = 0; j < i; ++j) {
                if (entries_[i].port == entries_[j].port) {
                    throw ConfigError("duplicate port label " + entries_[i].port);
                }
                if (entries_[i].mode == entries_[j].mode) {
                    throw ConfigError("two ports read the same mode");
                }
            }
        }
    }

    /// On/off pattern from a bit string such as "0111" over the listed ports.
    static ClickPattern on_off(const std::vector<std::pair<std::string, std::size_t>> &ports, const std::string &bits,
                               const DetectorModel &detector = {}) {
        if (bits.size() != ports.size()) {
            throw UnsupportedPattern("pattern '" + bits + "' does not match " + std::to_string(ports.size()) +
                                     " ports");
        }
        std::vector<PortOutcome> e;
        for (std::size_t i = 0; i < bits.size(); ++i) {
            if (bits[i] != '0' && bits[i] != '1') {
                throw UnsupportedPattern("pattern characters must be 0 or 1");
            }
            e.push_back({ports[i].first, ports[i].second, bits[i] == '1' ? Outcome::On : Outcome::Off, detector});
        }
        return ClickPattern(std::move(e));
    }

    const std::vector<PortOutcome> &entries() const noexcept { return entries_; }

    const PortOutcome *for_mode(std::size_t mode) const {
        for (const PortOutcome &e : entries_) {
            if (e.mode == mode) {
                return &e;
            }
        }
        return nullptr;
    }

    bool is_projective() const {
        return std::all_of(entries_.begin(), entries_.end(),
                           [](const PortOutcome &e) { return e.projector_level().has_value(); });
    }

  private:
    std::vector<PortOutcome> entries_;
};

/// Diagonal of the on/off POVM element in the number basis.
inline std::vector<double> povm_element(const DetectorModel &d, Outcome outcome, std::size_t cutoff) {
    d.validate();
    const PortOutcome p{"", 0, outcome, d};
    std::vector<double> diag(cutoff);
    for (std::size_t n = 0; n < cutoff; ++n) {
        diag[n] = p.weight(n);
    }
    return diag;
}

/// Diagonal of |n><n|.
inline std::vector<double> ideal_projector(std::size_t n, std::size_t cutoff) {
    std::vector<double> diag(cutoff, 0.0);
    if (n < cutoff) {
        diag[n] = 1.0;
    }
    return diag;
}

/// <Pi> on a normalized single-mode state.
inline double expectation(const FockState &psi, const std::vector<double> &diag) {
    if (psi.mode_count() != 1 || psi.dimension() != diag.size()) {
        throw ShapeMismatch("diagonal operator does not match the state");
    }
    double s = 0.0;
    for (std::size_t n = 0; n < diag.size(); ++n) {
        s += diag[n] * std::norm(psi.amplitudes()[n]);
    }
    return s / psi.squared_norm();
}

template <typename State>
struct Conditional {
    State state;               // normalized conditional state on the unmeasured modes
    double probability = 0.0;  // probability of the pattern
};

namespace detail {

inline void check_probability(double p) {
    if (!(p >= kZeroProbability)) {
        throw ZeroProbability("pattern probability " + std::to_string(p) + " is below 1e-15");
    }
}

inline std::vector<std::size_t> kept_modes(std::size_t mode_count, const ClickPattern &pattern) {
    std::vector<std::size_t> keep;
    for (const PortOutcome &e : pattern.entries()) {
        if (e.mode >= mode_count) {
            throw BadModeIndex("pattern reads mode " + std::to_string(e.mode) + " of a " +
                               std::to_string(mode_count) + "-mode state");
        }
    }
    for (std::size_t m = 0; m < mode_count; ++m) {
        if (!pattern.for_mode(m)) {
            keep.push_back(m);
        }
    }
    return keep;
}

/// A pattern covering every mode leaves no state behind; only its probability is defined.
inline void require_kept(std::span<const std::size_t> keep, double p) {
    check_probability(p);
    if (keep.empty()) {
        throw BadModeIndex("pattern measures every mode; use pattern_probability()");
    }
}

}  // namespace detail

/// Fock engine: probability of `pattern`, without the unreachable-pattern check.
inline double pattern_probability(const FockEnsemble &rho, const ClickPattern &pattern) {
    detail::kept_modes(rho.mode_count(), pattern);
    std::vector<const PortOutcome *> by_mode(rho.mode_count(), nullptr);
    for (std::size_t m = 0; m < rho.mode_count(); ++m) {
        by_mode[m] = pattern.for_mode(m);
    }
    double p = 0.0;
    for (const FockBranch &b : rho.branches()) {
        const FockState &psi = b.state;
        double s = 0.0;
        for (std::size_t i = 0; i < psi.dimension(); ++i) {
            double w = std::norm(psi.amplitudes()[i]);
            for (std::size_t m = 0; m < by_mode.size() && w > 0.0; ++m) {
                if (by_mode[m]) {
                    w *= by_mode[m]->weight(psi.photon_number(i, m));
                }
            }
            s += w;
        }
        p += b.weight * s / psi.squared_norm();
    }
    return std::max(p / rho.total_weight(), 0.0);
}

inline double pattern_probability(const FockState &psi, const ClickPattern &pattern) {
    return pattern_probability(FockEnsemble::pure(psi), pattern);
}

/// Fock engine: the measured modes are unraveled over their number states.
inline Conditional<FockEnsemble> condition(const FockEnsemble &rho, const ClickPattern &pattern) {
    const std::vector<std::size_t> keep = detail::kept_modes(rho.mode_count(), pattern);
    if (keep.empty()) {
        detail::require_kept(keep, pattern_probability(rho, pattern));
    }
    std::vector<const PortOutcome *> traced;
    for (std::size_t m = 0; m < rho.mode_count(); ++m) {
        if (const PortOutcome *e = pattern.for_mode(m)) {
            traced.push_back(e);
        }
    }
    const double total = rho.total_weight();
    std::vector<FockBranch> pieces = detail::unravel(rho, keep, [&](std::span<const std::size_t> ns) {
        double w = 1.0 / total;
        for (std::size_t q = 0; q < ns.size(); ++q) {
            w *= traced[q]->weight(ns[q]);
        }
        return w;
    });
    double p = 0.0;
    for (const FockBranch &b : pieces) {
        p += b.weight * b.state.squared_norm();
    }
    detail::check_probability(p);
    FockEnsemble out = FockEnsemble(std::move(pieces)).normalized();
    return {compressed(out), std::min(p, 1.0)};
}

inline Conditional<FockEnsemble> condition(const FockState &psi, const ClickPattern &pattern) {
    return condition(FockEnsemble::pure(psi), pattern);
}

namespace detail {

/// Unnormalized post-measurement mixture on the unmeasured modes.
inline BranchMixture contract_pattern(const BranchMixture &rho, const ClickPattern &pattern) {
    kept_modes(rho.mode_count(), pattern);
    std::vector<std::size_t> order(pattern.entries().size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return pattern.entries()[a].mode > pattern.entries()[b].mode;
    });
    BranchMixture out = rho;
    for (std::size_t i : order) {
        const PortOutcome &e = pattern.entries()[i];
        out = out.contract_mode(e.mode, [&](Complex bra, Complex ket) { return e.kernel(bra, ket); });
    }
    return out;
}

}  // namespace detail

/// Probability of `pattern`, without the unreachable-pattern check.
inline double pattern_probability(const BranchMixture &rho, const ClickPattern &pattern) {
    if (!detail::kept_modes(rho.mode_count(), pattern).empty()) {
        return std::max(detail::contract_pattern(rho, pattern).trace() / rho.trace(), 0.0);
    }
    // Every mode measured: contract down to mode 0, then take the scalar.
    const std::vector<PortOutcome> &es = pattern.entries();
    const auto first = std::find_if(es.begin(), es.end(), [](const PortOutcome &e) { return e.mode == 0; });
    BranchMixture out = rho;
    std::vector<PortOutcome> rest;
    for (const PortOutcome &e : es) {
        if (e.mode != 0) {
            rest.push_back(e);
        }
    }
    if (!rest.empty()) {
        out = detail::contract_pattern(rho, ClickPattern(std::move(rest)));
    }
    const Complex t = out.expectation([&](Complex bra, Complex ket) { return first->kernel(bra, ket); });
    return std::max(t.real() / rho.trace(), 0.0);
}

inline double pattern_probability(const CoherentBranchState &psi, const ClickPattern &pattern) {
    return pattern_probability(BranchMixture::pure(psi), pattern);
}

/// Branch engine, general POVM: kernels multiply the mixture.
inline Conditional<BranchMixture> condition(const BranchMixture &rho, const ClickPattern &pattern) {
    if (detail::kept_modes(rho.mode_count(), pattern).empty()) {
        detail::require_kept({}, pattern_probability(rho, pattern));
    }
    const BranchMixture out = detail::contract_pattern(rho, pattern);
    const double p = out.trace() / rho.trace();
    detail::check_probability(p);
    return {out.normalized(), std::min(p, 1.0)};
}

inline Conditional<BranchMixture> condition(const CoherentBranchState &psi, const ClickPattern &pattern) {
    return condition(BranchMixture::pure(psi), pattern);
}

/// Branch engine, rank-one outcomes only: the conditional state stays pure.
inline Conditional<CoherentBranchState> project(const CoherentBranchState &psi, const ClickPattern &pattern) {
    if (!pattern.is_projective()) {
        throw UnsupportedPattern("project() needs rank-one outcomes; use condition()");
    }
    const std::vector<std::size_t> keep = detail::kept_modes(psi.mode_count(), pattern);
    if (keep.empty()) {
        detail::require_kept(keep, pattern_probability(psi, pattern));
    }
    std::vector<CoherentBranch> out;
    for (const CoherentBranch &b : psi.branches()) {
        Complex c = b.coefficient;
        std::vector<Complex> amps;
        for (std::size_t m = 0; m < psi.mode_count(); ++m) {
            const PortOutcome *e = pattern.for_mode(m);
            if (!e) {
                amps.push_back(b.amplitudes[m]);
                continue;
            }
            const std::size_t n = *e->projector_level();
            const Complex g = b.amplitudes[m];
            // <n|g> = e^{-|g|^2/2} g^n / sqrt(n!)
            c *= std::exp(-0.5 * std::norm(g)) * (n == 0 ? Complex{1.0} : g);
            if (e->outcome == Outcome::Off) {
                c *= std::exp(-0.5 * e->detector.dark_count);
            }
        }
        out.push_back({c, std::move(amps)});
    }
    CoherentBranchState raw(keep.size(), std::move(out), psi.branch_limit());
    const double p = raw.squared_norm() / psi.squared_norm();
    detail::check_probability(p);
    return {raw.normalized(), std::min(p, 1.0)};
}

}  // namespace teleamp
