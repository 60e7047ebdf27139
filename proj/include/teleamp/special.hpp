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
#include <numbers>

namespace teleamp {

using Complex = std::complex<double>;

inline constexpr Complex kI{0.0, 1.0};

/// Weight of the residue class k (mod M) in a Poisson law of mean x, times M:
///   M e^{-x} sum_{n = k mod M} x^n / n!
/// These are the eigenvalues of the Gram matrix of the M-PSK coherent states
/// with |gamma|^2 = x. Summed directly so small-x values keep full relative
/// precision, unlike the DFT form which cancels catastrophically there.
inline double psk_lambda(int M, int k, double x) {
    if (x <= 0.0) {
        return k == 0 ? static_cast<double>(M) : 0.0;
    }
    if (x > 700.0) {
        return 1.0;  // residues equidistributed to far below double precision
    }
    const double n_max = x + 12.0 * std::sqrt(x) + 60.0;
    double term = std::exp(-x);
    double sum = 0.0;
    for (int n = 0; n <= n_max; ++n) {
        if (n > 0) {
            term *= x / n;
        }
        if (n % M == k) {
            sum += term;
        }
    }
    return M * sum;
}

/// 2 e^{-x} (sinh x - sin x), the weight of |omega_3> for M = 4.
inline double lambda3(double x) { return psk_lambda(4, 3, x); }

inline double binary_entropy(double p) {
    if (p <= 0.0 || p >= 1.0) {
        return 0.0;
    }
    return -p * std::log2(p) - (1.0 - p) * std::log2(1.0 - p);
}

}  // namespace teleamp
