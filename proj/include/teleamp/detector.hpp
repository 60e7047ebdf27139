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

#pragma once

#include <cmath>
#include <complex>
#include <cstddef>

#include "teleamp/coherent_branch.hpp"
#include "teleamp/errors.hpp"

namespace teleamp {

/// On/off avalanche photodiode:
///   Pi_off = e^{-nu} sum_m (1 - eta)^m |m><m|,  Pi_on = 1 - Pi_off.
struct DetectorModel {
    double dark_count = 0.0;
    double efficiency = 1.0;

    static DetectorModel ideal() { return {}; }

    void validate() const {
        if (!(dark_count >= 0.0) || !std::isfinite(dark_count)) {
            throw DomainError("dark count probability must be finite and non-negative");
        }
        if (!(efficiency >= 0.0 && efficiency <= 1.0)) {
            throw DomainError("detector efficiency must lie in [0, 1]");
        }
    }

    double off_weight(std::size_t n) const {
        return std::exp(-dark_count) * std::pow(1.0 - efficiency, static_cast<double>(n));
    }

    double on_weight(std::size_t n) const { return 1.0 - off_weight(n); }

    /// <bra|Pi_off|ket>.
    Complex off_kernel(Complex bra, Complex ket) const {
        return std::exp(-dark_count - 0.5 * std::norm(bra) - 0.5 * std::norm(ket) +
                        (1.0 - efficiency) * std::conj(bra) * ket);
    }

    /// <bra|Pi_on|ket>, factored so weak fields do not cancel.
    Complex on_kernel(Complex bra, Complex ket) const {
        const Complex z = std::conj(bra) * ket;
        return -coherent_overlap(bra, ket) * expm1(-dark_count - efficiency * z);
    }

    static Complex expm1(Complex z) {
        if (std::abs(z) > 1e-2) {
            return std::exp(z) - 1.0;
        }
        Complex term = z;
        Complex sum = z;
        for (int n = 2; n < 10; ++n) {
            term *= z / static_cast<double>(n);
            sum += term;
        }
        return sum;
    }
};

}  // namespace teleamp
