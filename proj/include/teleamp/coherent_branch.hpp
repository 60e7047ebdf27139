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

// Exact superpositions of multimode coherent products, and mixtures of them.

#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "teleamp/errors.hpp"
#include "teleamp/fock.hpp"

namespace teleamp {

/// <a|b> for single-mode coherent states.
inline Complex coherent_overlap(Complex a, Complex b) {
    return std::exp(-0.5 * std::norm(a) - 0.5 * std::norm(b) + std::conj(a) * b);
}

/// <a|b> for coherent products; the exponents are summed before exponentiating.
inline Complex product_overlap(std::span<const Complex> a, std::span<const Complex> b) {
    Complex e = 0.0;
    for (std::size_t m = 0; m < a.size(); ++m) {
        e += -0.5 * std::norm(a[m]) - 0.5 * std::norm(b[m]) + std::conj(a[m]) * b[m];
    }
    return std::exp(e);
}

struct CoherentBranch {
    Complex coefficient;
    std::vector<Complex> amplitudes;
};

namespace detail {

inline bool same_amplitudes(std::span<const Complex> a, std::span<const Complex> b) {
    for (std::size_t m = 0; m < a.size(); ++m) {
        if (std::abs(a[m] - b[m]) > 1e-13 * (1.0 + std::abs(a[m]))) {
            return false;
        }
    }
    return true;
}

}  // namespace detail

/// sum_j c_j (x)_m |gamma_{j,m}>.
class CoherentBranchState {
  public:
    static constexpr std::size_t kDefaultBranchLimit = 64;

    CoherentBranchState() = default;

    CoherentBranchState(std::size_t mode_count, std::vector<CoherentBranch> branches,
                        std::size_t branch_limit = kDefaultBranchLimit)
        : mode_count_(mode_count), branch_limit_(branch_limit) {
        if (mode_count_ == 0) {
            throw ShapeMismatch("CoherentBranchState needs at least one mode");
        }
        for (CoherentBranch &b : branches) {
            if (b.amplitudes.size() != mode_count_) {
                throw ShapeMismatch("branch amplitude vector has wrong length");
            }
            if (b.coefficient == Complex{0.0}) {
                continue;
            }
            auto it = std::find_if(branches_.begin(), branches_.end(), [&](const CoherentBranch &x) {
                return detail::same_amplitudes(x.amplitudes, b.amplitudes);
            });
            if (it != branches_.end()) {
                it->coefficient += b.coefficient;
            } else {
                branches_.push_back(std::move(b));
            }
        }
        std::erase_if(branches_, [](const CoherentBranch &b) { return b.coefficient == Complex{0.0}; });
        if (branches_.size() > branch_limit_) {
            throw BranchLimitExceeded(std::to_string(branches_.size()) + " branches exceed the limit of " +
                                      std::to_string(branch_limit_));
        }
    }

    static CoherentBranchState product(std::vector<Complex> amplitudes) {
        const std::size_t n = amplitudes.size();
        return CoherentBranchState(n, {{1.0, std::move(amplitudes)}});
    }

    std::size_t mode_count() const noexcept { return mode_count_; }
    std::size_t branch_limit() const noexcept { return branch_limit_; }
    const std::vector<CoherentBranch> &branches() const noexcept { return branches_; }

    /// <this|other>.
    Complex inner(const CoherentBranchState &other) const {
        if (other.mode_count_ != mode_count_) {
            throw ShapeMismatch("branch states have different mode counts");
        }
        Complex s = 0.0;
        for (const CoherentBranch &a : branches_) {
            for (const CoherentBranch &b : other.branches_) {
                s += std::conj(a.coefficient) * b.coefficient * product_overlap(a.amplitudes, b.amplitudes);
            }
        }
        return s;
    }

    double squared_norm() const { return std::max(inner(*this).real(), 0.0); }

    CoherentBranchState normalized() const {
        const double n = squared_norm();
        if (!(n > 0.0)) {
            throw ZeroProbability("cannot normalize a zero branch state");
        }
        return scaled(1.0 / std::sqrt(n));
    }

    CoherentBranchState scaled(Complex factor) const {
        std::vector<CoherentBranch> b = branches_;
        for (CoherentBranch &x : b) {
            x.coefficient *= factor;
        }
        return CoherentBranchState(mode_count_, std::move(b), branch_limit_);
    }

    CoherentBranchState tensor(const CoherentBranchState &other) const {
        std::vector<CoherentBranch> out;
        for (const CoherentBranch &a : branches_) {
            for (const CoherentBranch &b : other.branches_) {
                std::vector<Complex> amps = a.amplitudes;
                amps.insert(amps.end(), b.amplitudes.begin(), b.amplitudes.end());
                out.push_back({a.coefficient * b.coefficient, std::move(amps)});
            }
        }
        return CoherentBranchState(mode_count_ + other.mode_count_, std::move(out),
                                   std::max(branch_limit_, other.branch_limit_));
    }

    /// Same coefficients with every amplitude vector passed through `f`.
    template <typename F>
    CoherentBranchState map_amplitudes(F &&f, std::size_t new_mode_count = 0) const {
        std::vector<CoherentBranch> out;
        out.reserve(branches_.size());
        for (const CoherentBranch &b : branches_) {
            out.push_back({b.coefficient, f(b.amplitudes)});
        }
        return CoherentBranchState(new_mode_count ? new_mode_count : mode_count_, std::move(out), branch_limit_);
    }

  private:
    std::size_t mode_count_ = 0;
    std::size_t branch_limit_ = kDefaultBranchLimit;
    std::vector<CoherentBranch> branches_;
};

/// Two-branch form of N_pm(|beta> pm |-beta>).
inline CoherentBranchState cat_branches(Complex beta, Parity parity) {
    const double b2 = std::norm(beta);
    if (parity == Parity::Odd && b2 == 0.0) {
        throw DegenerateCat("odd cat is undefined at zero amplitude");
    }
    const double norm2 = parity == Parity::Even ? 2.0 * (1.0 + std::exp(-2.0 * b2)) : -2.0 * std::expm1(-2.0 * b2);
    const double n = 1.0 / std::sqrt(norm2);
    const double sign = parity == Parity::Even ? 1.0 : -1.0;
    return CoherentBranchState(1, {{n, {beta}}, {sign * n, {-beta}}});
}

/// rho = sum_ij K_ij |v_i><v_j| over coherent products v_i. Arises when a mode of a
/// branch state is traced out or measured with a non-projective POVM.
class BranchMixture {
  public:
    BranchMixture() = default;

    BranchMixture(std::size_t mode_count, std::vector<std::vector<Complex>> vectors, Eigen::MatrixXcd kernel)
        : mode_count_(mode_count), vectors_(std::move(vectors)), kernel_(std::move(kernel)) {
        if (kernel_.rows() != static_cast<Eigen::Index>(vectors_.size()) || kernel_.cols() != kernel_.rows()) {
            throw ShapeMismatch("mixture kernel does not match its branch count");
        }
        for (const auto &v : vectors_) {
            if (v.size() != mode_count_) {
                throw ShapeMismatch("mixture branch vector has wrong length");
            }
        }
        merge();
    }

    static BranchMixture pure(const CoherentBranchState &psi) {
        const std::size_t n = psi.branches().size();
        std::vector<std::vector<Complex>> vectors;
        Eigen::VectorXcd c(n);
        for (std::size_t i = 0; i < n; ++i) {
            vectors.push_back(psi.branches()[i].amplitudes);
            c(i) = psi.branches()[i].coefficient;
        }
        return BranchMixture(psi.mode_count(), std::move(vectors), c * c.adjoint());
    }

    std::size_t mode_count() const noexcept { return mode_count_; }
    const std::vector<std::vector<Complex>> &vectors() const noexcept { return vectors_; }
    const Eigen::MatrixXcd &kernel() const noexcept { return kernel_; }

    /// G_ij = <v_i|v_j>.
    Eigen::MatrixXcd gram() const {
        const Eigen::Index n = kernel_.rows();
        Eigen::MatrixXcd g(n, n);
        for (Eigen::Index i = 0; i < n; ++i) {
            for (Eigen::Index j = 0; j < n; ++j) {
                g(i, j) = product_overlap(vectors_[i], vectors_[j]);
            }
        }
        return g;
    }

    double trace() const {
        // Tr rho = sum_ij K_ij <v_j|v_i> = Tr(K G).
        return (kernel_ * gram()).trace().real();
    }

    double purity() const {
        const Eigen::MatrixXcd kg = kernel_ * gram();
        const double t = kg.trace().real();
        return (kg * kg).trace().real() / (t * t);
    }

    BranchMixture scaled(double factor) const {
        BranchMixture out = *this;
        out.kernel_ *= factor;
        return out;
    }

    BranchMixture normalized() const {
        const double t = trace();
        if (!(t > 0.0)) {
            throw ZeroProbability("cannot normalize a zero mixture");
        }
        return scaled(1.0 / t);
    }

    /// <psi|rho|psi> without normalizing either side.
    double expectation(const CoherentBranchState &psi) const {
        if (psi.mode_count() != mode_count_) {
            throw ShapeMismatch("target has a different mode count");
        }
        const Eigen::Index n = kernel_.rows();
        Eigen::VectorXcd a(n);  // a_i = <psi|v_i>
        for (Eigen::Index i = 0; i < n; ++i) {
            Complex s = 0.0;
            for (const CoherentBranch &b : psi.branches()) {
                s += std::conj(b.coefficient) * product_overlap(b.amplitudes, vectors_[i]);
            }
            a(i) = s;
        }
        return std::max((a.transpose() * kernel_ * a.conjugate())(0, 0).real(), 0.0);
    }

    double fidelity(const CoherentBranchState &target) const {
        return std::clamp(expectation(target) / (trace() * target.squared_norm()), 0.0, 1.0);
    }

    /// Same kernel with every branch vector passed through `f`.
    template <typename F>
    BranchMixture map_amplitudes(F &&f, std::size_t new_mode_count = 0) const {
        std::vector<std::vector<Complex>> out;
        out.reserve(vectors_.size());
        for (const auto &v : vectors_) {
            out.push_back(f(v));
        }
        return BranchMixture(new_mode_count ? new_mode_count : mode_count_, std::move(out), kernel_);
    }

    /// Removes `mode`, multiplying K_ij by w(gamma_j, gamma_i) = <gamma_j|Pi|gamma_i>
    /// for the mode's amplitudes. w = coherent_overlap gives the partial trace.
    template <typename Kernel>
    BranchMixture contract_mode(std::size_t mode, Kernel &&w) const {
        if (mode >= mode_count_) {
            throw BadModeIndex("mode " + std::to_string(mode) + " out of range");
        }
        if (mode_count_ == 1) {
            throw MultiModeUnsupported("cannot remove the last mode of a mixture");
        }
        const Eigen::Index n = kernel_.rows();
        Eigen::MatrixXcd k = kernel_;
        for (Eigen::Index i = 0; i < n; ++i) {
            for (Eigen::Index j = 0; j < n; ++j) {
                k(i, j) *= w(vectors_[j][mode], vectors_[i][mode]);
            }
        }
        std::vector<std::vector<Complex>> vs = vectors_;
        for (auto &v : vs) {
            v.erase(v.begin() + static_cast<std::ptrdiff_t>(mode));
        }
        return BranchMixture(mode_count_ - 1, std::move(vs), std::move(k));
    }

    /// Tr(W rho) for a one-mode mixture, with W given through its coherent kernel.
    template <typename Kernel>
    Complex expectation(Kernel &&w) const {
        if (mode_count_ != 1) {
            throw MultiModeUnsupported("expectation needs a one-mode mixture");
        }
        Complex s = 0.0;
        for (Eigen::Index i = 0; i < kernel_.rows(); ++i) {
            for (Eigen::Index j = 0; j < kernel_.cols(); ++j) {
                s += kernel_(i, j) * w(vectors_[j][0], vectors_[i][0]);
            }
        }
        return s;
    }

  private:
    void merge() {
        const std::size_t n = vectors_.size();
        std::vector<std::size_t> target(n);
        std::vector<std::vector<Complex>> unique;
        for (std::size_t i = 0; i < n; ++i) {
            std::size_t t = unique.size();
            for (std::size_t u = 0; u < unique.size(); ++u) {
                if (detail::same_amplitudes(unique[u], vectors_[i])) {
                    t = u;
                    break;
                }
            }
            if (t == unique.size()) {
                unique.push_back(vectors_[i]);
            }
            target[i] = t;
        }
        if (unique.size() == n) {
            return;
        }
        Eigen::MatrixXcd p = Eigen::MatrixXcd::Zero(static_cast<Eigen::Index>(unique.size()), static_cast<Eigen::Index>(n));
        for (std::size_t i = 0; i < n; ++i) {
            p(static_cast<Eigen::Index>(target[i]), static_cast<Eigen::Index>(i)) = 1.0;
        }
        kernel_ = p * kernel_ * p.transpose();
        vectors_ = std::move(unique);
    }

    std::size_t mode_count_ = 0;
    std::vector<std::vector<Complex>> vectors_;
    Eigen::MatrixXcd kernel_;
};

}  // namespace teleamp
