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

#include <cmath>

#include "gtest/gtest.h"
#include "teleamp/fock.hpp"
#include "teleamp/protocol.hpp"
#include "teleamp/usd.hpp"

namespace teleamp {
namespace {

TEST(PskEigenvalues, BinaryClosedForm) {
    const auto l = psk_eigenvalues({2, 1.0});
    EXPECT_NEAR(l[0], 1.0 + std::exp(-2.0), 1e-14);
    EXPECT_NEAR(l[1], 1.0 - std::exp(-2.0), 1e-14);
}

TEST(PskEigenvalues, FourPskClosedForms) {
    for (double b : {0.3, 1.0, 1.7}) {
        const double x = b * b;
        const auto l = psk_eigenvalues({4, b});
        const double e = 2.0 * std::exp(-x);
        EXPECT_NEAR(l[0], e * (std::cosh(x) + std::cos(x)), 1e-13);
        EXPECT_NEAR(l[1], e * (std::sinh(x) + std::sin(x)), 1e-13);
        EXPECT_NEAR(l[2], e * (std::cosh(x) - std::cos(x)), 1e-13);
        EXPECT_NEAR(l[3], e * (std::sinh(x) - std::sin(x)), 1e-13);
    }
    EXPECT_NEAR(psk_eigenvalues({4, 1.0})[3], 0.2455450, 1e-6);
}

TEST(PskEigenvalues, VanishingAmplitude) {
    const auto l = psk_eigenvalues({4, 1e-9});
    EXPECT_NEAR(l[0], 4.0, 1e-12);
    EXPECT_NEAR(l[1] + l[2] + l[3], 0.0, 1e-12);
    EXPECT_EQ(usd_success({4, 0.0}), 0.0);
}

TEST(PskEigenvalues, DftAndDenseAgree) {
    for (int M : {2, 3, 4}) {
        for (double g : {0.4, 1.0, 2.0}) {
            const PskEnsemble ens{M, std::polar(g, 0.3)};
            const auto series = psk_eigenvalues(ens);
            const auto dft = psk_eigenvalues_dft(ens);
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(psk_gram(ens));
            std::vector<double> dense(es.eigenvalues().data(), es.eigenvalues().data() + M);
            std::vector<double> sorted = series;
            std::sort(sorted.begin(), sorted.end());
            double sum = 0.0;
            for (int k = 0; k < M; ++k) {
                EXPECT_NEAR(series[k], dft[k], 1e-10);
                EXPECT_NEAR(sorted[k], dense[k], 1e-10);
                EXPECT_GE(series[k], 0.0);
                sum += series[k];
            }
            EXPECT_NEAR(sum, M, 1e-12);
        }
    }
}

TEST(UsdSuccess, IvanovicDieksPeres) {
    // Two states: 1 - |<g|-g>|.
    for (double g : {0.2, 1.0, 1.5}) {
        EXPECT_NEAR(usd_success({2, g}), 1.0 - std::exp(-2.0 * g * g), 1e-13);
    }
}

TEST(UsdSuccess, MonotoneAndBounded) {
    double last = 0.0;
    for (double g = 0.05; g < 3.0; g += 0.05) {
        const double p = usd_success({4, g});
        EXPECT_GE(p, last);
        EXPECT_LE(p, 1.0);
        last = p;
    }
}

TEST(UsdPovm, UnambiguousAndComplete) {
    for (int M : {2, 3, 4}) {
        const PskEnsemble ens{M, 0.9};
        const UsdPovm povm = usd_povm(ens);
        Eigen::MatrixXcd sum = povm.failure;
        for (int m = 0; m < M; ++m) {
            sum += povm.elements[m];
            for (int j = 0; j < M; ++j) {
                const Eigen::VectorXcd v = psk_state(ens, j);
                const double p = (v.adjoint() * povm.elements[m] * v)(0, 0).real();
                if (j == m) {
                    EXPECT_NEAR(p, povm.success, 1e-12);
                } else {
                    EXPECT_NEAR(p, 0.0, 1e-12);
                }
            }
        }
        EXPECT_NEAR((sum - Eigen::MatrixXcd::Identity(M, M)).norm(), 0.0, 1e-12);
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(povm.failure);
        EXPECT_GE(es.eigenvalues().minCoeff(), -1e-10);
    }
}

TEST(UsdPovm, StatesReproduceGram) {
    const PskEnsemble ens{4, Complex(0.7, 0.2)};
    const Eigen::MatrixXcd G = psk_gram(ens);
    for (int m = 0; m < 4; ++m) {
        for (int n = 0; n < 4; ++n) {
            const Complex ip = psk_state(ens, m).dot(psk_state(ens, n));
            EXPECT_NEAR(std::abs(ip - G(m, n)), 0.0, 1e-12);
        }
    }
}

TEST(UsdPovm, BinaryMatchesTextbookElements) {
    // Pi_0 = |e><e| / (1 + s) with e the part of |g> orthogonal to |-g>, s = <g|-g>.
    const double g = 0.6;
    const PskEnsemble ens{2, g};
    const double s = std::exp(-2.0 * g * g);
    const Eigen::VectorXcd a = psk_state(ens, 0);
    const Eigen::VectorXcd b = psk_state(ens, 1);
    const Eigen::VectorXcd e = (a - s * b) / std::sqrt(1.0 - s * s);
    const Eigen::MatrixXcd textbook = e * e.adjoint() / (1.0 + s);
    EXPECT_NEAR((usd_povm(ens).elements[0] - textbook).norm(), 0.0, 1e-12);
}

TEST(UsdPovm, SingularEnsembleThrows) {
    EXPECT_THROW(usd_povm({4, 0.0}), SingularEnsemble);
}

TEST(UsdVsRelay, RelayBeatsMeasureResendAtHighLoss) {
    // R_E = 0.8, BPSK relay with R_A = 1/2 at gains 1, 2, 3.
    for (double g : {1.0, 2.0, 3.0}) {
        ProtocolConfig c;
        c.R_A = 0.5;
        c.R_E = 0.8;
        c.R_B = solve_rb_for_gain(g, 0.5, 0.8);
        for (double a = 0.05; a <= 1.0 + 1e-9; a += 0.05) {
            c.alpha = a;
            EXPECT_GT(success_prob_binary_closed(c), usd_success(2, a, 0.8)) << "g " << g << " alpha " << a;
        }
    }
}

TEST(UsdVsRelay, FourPskRatioExceedsTenSomewhere) {
    ProtocolConfig c;
    c.M = 4;
    c.R_A = 0.5;
    c.R_E = 0.8;
    c.R_B = solve_rb_for_gain(3.0, 0.5, 0.8);
    double best = 0.0;
    for (double a = 0.05; a <= 1.5 + 1e-9; a += 0.05) {
        c.alpha = a;
        best = std::max(best, success_prob_4psk_closed(c) / usd_success(4, a, 0.8));
    }
    EXPECT_GT(best, 10.0);
}

}  // namespace
}  // namespace teleamp
