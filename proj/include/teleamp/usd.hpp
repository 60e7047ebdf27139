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

// Measure-resend baseline: unambiguous discrimination of M-PSK coherent states.
//
// Everything lives in the M-dimensional omega basis, where the PSK states are
// |gamma_m> = sum_k u^{mk} sqrt(lambda_k / M) |omega_k>.

#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

#include "teleamp/errors.hpp"
#include "teleamp/special.hpp"

namespace teleamp {

struct PskEnsemble {
    int M = 4;
    Complex gamma = 1.0;  // amplitude reaching the receiver

    void validate() const {
        if (M < 2) {
            throw DomainError("PSK ensemble needs M >= 2");
        }
        if (!std::isfinite(gamma.real()) || !std::isfinite(gamma.imag())) {
            throw DomainError("gamma must be finite");
        }
    }

    Complex root() const { return std::polar(1.0, 2.0 * std::numbers::pi / M); }
    Complex state_amplitude(int m) const { return gamma * std::pow(root(), m); }

    /// gamma = sqrt(1 - R_E) alpha.
    static PskEnsemble after_loss(int M, Complex alpha, double R_E) {
        if (!(R_E >= 0.0 && R_E <= 1.0)) {
            throw DomainError("loss outside [0, 1]");
        }
        return {M, std::sqrt(1.0 - R_E) * alpha};
    }
};

/// Gram-matrix eigenvalues, from the residue-class series.
inline std::vector<double> psk_eigenvalues(const PskEnsemble &ens) {
    ens.validate();
    std::vector<double> lambda(ens.M);
    for (int k = 0; k < ens.M; ++k) {
        lambda[k] = psk_lambda(ens.M, k, std::norm(ens.gamma));
    }
    return lambda;
}

/// lambda_m = sum_k u^{-km} <gamma_0|gamma_k>. Loses relative precision for small |gamma|.
inline std::vector<double> psk_eigenvalues_dft(const PskEnsemble &ens) {
    ens.validate();
    const double x = std::norm(ens.gamma);
    std::vector<double> lambda(ens.M);
    for (int m = 0; m < ens.M; ++m) {
        Complex s = 0.0;
        for (int k = 0; k < ens.M; ++k) {
            const Complex uk = std::pow(ens.root(), k);
            s += std::pow(ens.root(), -k * m) * std::exp(x * (uk - 1.0));
        }
        lambda[m] = s.real();
    }
    return lambda;
}

/// Dense Gram matrix G_{mn} = <gamma_m|gamma_n>.
inline Eigen::MatrixXcd psk_gram(const PskEnsemble &ens) {
    ens.validate();
    Eigen::MatrixXcd G(ens.M, ens.M);
    for (int m = 0; m < ens.M; ++m) {
        for (int n = 0; n < ens.M; ++n) {
            const Complex a = ens.state_amplitude(m);
            const Complex b = ens.state_amplitude(n);
            G(m, n) = std::exp(-0.5 * std::norm(a) - 0.5 * std::norm(b) + std::conj(a) * b);
        }
    }
    return G;
}

inline double usd_success(const PskEnsemble &ens) {
    const std::vector<double> l = psk_eigenvalues(ens);
    return std::clamp(*std::min_element(l.begin(), l.end()), 0.0, 1.0);
}

/// P_USD for M-PSK states of amplitude alpha after a channel of loss R_E.
inline double usd_success(int M, double alpha, double R_E) {
    return usd_success(PskEnsemble::after_loss(M, alpha, R_E));
}

/// |gamma_m> in the omega basis.
inline Eigen::VectorXcd psk_state(const PskEnsemble &ens, int m) {
    const std::vector<double> l = psk_eigenvalues(ens);
    Eigen::VectorXcd v(ens.M);
    for (int k = 0; k < ens.M; ++k) {
        v(k) = std::pow(ens.root(), m * k) * std::sqrt(l[k] / ens.M);
    }
    return v;
}

struct UsdPovm {
    std::vector<double> lambda;
    double success = 0.0;
    std::vector<Eigen::MatrixXcd> elements;  // Pi_0 .. Pi_{M-1}
    Eigen::MatrixXcd failure;                // Pi_F
};

/// Pi_m = (Lambda / M) P_USD |gamma_m^perp><gamma_m^perp| with
/// |gamma_m^perp> = Lambda^{-1/2} sum_k u^{mk} lambda_k^{-1/2} |omega_k> and
/// Lambda = sum_k 1 / lambda_k.
inline UsdPovm usd_povm(const PskEnsemble &ens) {
    UsdPovm povm;
    povm.lambda = psk_eigenvalues(ens);
    const int M = ens.M;
    double Lambda = 0.0;
    for (double l : povm.lambda) {
        if (!(l > 0.0)) {
            throw SingularEnsemble("PSK states are linearly dependent; USD undefined");
        }
        Lambda += 1.0 / l;
    }
    povm.success = *std::min_element(povm.lambda.begin(), povm.lambda.end());
    Eigen::MatrixXcd sum = Eigen::MatrixXcd::Zero(M, M);
    for (int m = 0; m < M; ++m) {
        Eigen::VectorXcd perp(M);
        for (int k = 0; k < M; ++k) {
            perp(k) = std::pow(ens.root(), m * k) / std::sqrt(povm.lambda[k] * Lambda);
        }
        povm.elements.push_back(Lambda / M * povm.success * perp * perp.adjoint());
        sum += povm.elements.back();
    }
    povm.failure = Eigen::MatrixXcd::Identity(M, M) - sum;
    return povm;
}

}  // namespace teleamp
