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

// Truncated number-basis states.
//
// Phase-space convention used throughout the library: x = (a + a^dag)/sqrt(2),
// p = (a - a^dag)/(i sqrt(2)). The vacuum has quadrature variance 1/2,
// W_vac(0, 0) = 1/pi, and |gamma> is centred at (sqrt(2) Re gamma, sqrt(2) Im gamma).

#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <numeric>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "teleamp/errors.hpp"
#include "teleamp/special.hpp"

namespace teleamp {

inline constexpr double kNormTolerance = 1e-9;
inline constexpr double kTailTolerance = 1e-10;
inline constexpr std::size_t kMinCutoff = 10;
inline constexpr std::size_t kMaxCutoff = 40;

/// ceil(|gamma|^2 + 8|gamma| + 10), clamped to [10, 40].
inline std::size_t default_cutoff(double magnitude) {
    const double raw = std::ceil(magnitude * magnitude + 8.0 * magnitude + 10.0);
    return std::clamp(static_cast<std::size_t>(raw), kMinCutoff, kMaxCutoff);
}

enum class Parity { Even, Odd };

struct PhaseSpacePoint {
    double x = 0.0;
    double p = 0.0;
};

/// Pure state on a product of truncated modes, amplitudes row-major with mode 0 slowest.
class FockState {
  public:
    FockState() = default;

    FockState(std::vector<std::size_t> cutoffs, std::vector<Complex> amplitudes)
        : cutoffs_(std::move(cutoffs)), amplitudes_(std::move(amplitudes)) {
        if (cutoffs_.empty()) {
            throw ShapeMismatch("FockState needs at least one mode");
        }
        std::size_t dim = 1;
        for (std::size_t c : cutoffs_) {
            if (c == 0) {
                throw ShapeMismatch("cutoff must be positive");
            }
            dim *= c;
        }
        if (dim != amplitudes_.size()) {
            throw ShapeMismatch("amplitude vector length " + std::to_string(amplitudes_.size()) +
                                " does not match product of cutoffs " + std::to_string(dim));
        }
        strides_.assign(cutoffs_.size(), 1);
        for (std::size_t m = cutoffs_.size() - 1; m > 0; --m) {
            strides_[m - 1] = strides_[m] * cutoffs_[m];
        }
    }

    static FockState vacuum(std::vector<std::size_t> cutoffs) {
        std::size_t dim = 1;
        for (std::size_t c : cutoffs) {
            dim *= c;
        }
        std::vector<Complex> amps(dim, 0.0);
        if (dim > 0) {
            amps[0] = 1.0;
        }
        return FockState(std::move(cutoffs), std::move(amps));
    }

    std::size_t mode_count() const noexcept { return cutoffs_.size(); }
    const std::vector<std::size_t> &cutoffs() const noexcept { return cutoffs_; }
    std::size_t cutoff(std::size_t mode) const { return cutoffs_.at(mode); }
    const std::vector<Complex> &amplitudes() const noexcept { return amplitudes_; }
    std::size_t dimension() const noexcept { return amplitudes_.size(); }
    std::size_t stride(std::size_t mode) const { return strides_.at(mode); }

    std::size_t photon_number(std::size_t index, std::size_t mode) const {
        return (index / strides_[mode]) % cutoffs_[mode];
    }

    std::size_t flatten(std::span<const std::size_t> ns) const {
        if (ns.size() != cutoffs_.size()) {
            throw ShapeMismatch("photon-number tuple has wrong length");
        }
        std::size_t index = 0;
        for (std::size_t m = 0; m < ns.size(); ++m) {
            if (ns[m] >= cutoffs_[m]) {
                throw BadModeIndex("photon number beyond cutoff");
            }
            index += ns[m] * strides_[m];
        }
        return index;
    }

    Complex amplitude(std::initializer_list<std::size_t> ns) const {
        return amplitudes_[flatten(std::span<const std::size_t>(ns.begin(), ns.size()))];
    }

    double squared_norm() const {
        double s = 0.0;
        for (const Complex &a : amplitudes_) {
            s += std::norm(a);
        }
        return s;
    }

    FockState normalized() const {
        const double n = squared_norm();
        if (!(n > 0.0)) {
            throw ZeroProbability("cannot normalize a zero vector");
        }
        return scaled(1.0 / std::sqrt(n));
    }

    FockState scaled(Complex factor) const {
        FockState out = *this;
        for (Complex &a : out.amplitudes_) {
            a *= factor;
        }
        return out;
    }

    double mean_photon_number(std::size_t mode = 0) const {
        check_mode(mode);
        double s = 0.0;
        for (std::size_t i = 0; i < amplitudes_.size(); ++i) {
            s += static_cast<double>(photon_number(i, mode)) * std::norm(amplitudes_[i]);
        }
        return s / squared_norm();
    }

    /// Population of the highest retained level of `mode`.
    double top_level_population(std::size_t mode) const {
        check_mode(mode);
        double s = 0.0;
        for (std::size_t i = 0; i < amplitudes_.size(); ++i) {
            if (photon_number(i, mode) + 1 == cutoffs_[mode]) {
                s += std::norm(amplitudes_[i]);
            }
        }
        return s;
    }

    FockState tensor(const FockState &other) const {
        std::vector<std::size_t> cutoffs = cutoffs_;
        cutoffs.insert(cutoffs.end(), other.cutoffs_.begin(), other.cutoffs_.end());
        std::vector<Complex> amps;
        amps.reserve(dimension() * other.dimension());
        for (const Complex &a : amplitudes_) {
            for (const Complex &b : other.amplitudes_) {
                amps.push_back(a * b);
            }
        }
        return FockState(std::move(cutoffs), std::move(amps));
    }

    void check_mode(std::size_t mode) const {
        if (mode >= cutoffs_.size()) {
            throw BadModeIndex("mode " + std::to_string(mode) + " out of range for " +
                               std::to_string(cutoffs_.size()) + "-mode state");
        }
    }

  private:
    std::vector<std::size_t> cutoffs_;
    std::vector<std::size_t> strides_;
    std::vector<Complex> amplitudes_;
};

struct FockBranch {
    double weight = 0.0;
    FockState state;
};

/// Mixed state sum_i w_i |psi_i><psi_i| kept as pure branches.
class FockEnsemble {
  public:
    FockEnsemble() = default;

    /// Branch states may be unnormalized; their norms are folded into the weights
    /// and branches of zero weight are dropped.
    explicit FockEnsemble(std::vector<FockBranch> branches) {
        for (FockBranch &b : branches) {
            if (!branches_.empty() && b.state.cutoffs() != branches_.front().state.cutoffs()) {
                throw ShapeMismatch("ensemble branches have different shapes");
            }
            if (b.weight < 0.0) {
                throw DomainError("negative ensemble weight");
            }
            const double n = b.state.squared_norm();
            const double w = b.weight * n;
            if (!(w > 0.0)) {
                continue;
            }
            branches_.push_back({w, b.state.scaled(1.0 / std::sqrt(n))});
        }
        if (branches_.empty()) {
            throw ZeroProbability("ensemble has no branch of positive weight");
        }
        if (total_weight() > 1.0 + kNormTolerance) {
            throw DomainError("ensemble weights sum above one");
        }
    }

    static FockEnsemble pure(const FockState &state) {
        return FockEnsemble({{1.0, state.normalized()}});
    }

    const std::vector<FockBranch> &branches() const noexcept { return branches_; }
    std::size_t size() const noexcept { return branches_.size(); }
    std::size_t mode_count() const { return branches_.front().state.mode_count(); }
    const std::vector<std::size_t> &cutoffs() const { return branches_.front().state.cutoffs(); }

    double total_weight() const {
        double s = 0.0;
        for (const FockBranch &b : branches_) {
            s += b.weight;
        }
        return s;
    }

    FockEnsemble normalized() const {
        const double t = total_weight();
        FockEnsemble out = *this;
        for (FockBranch &b : out.branches_) {
            b.weight /= t;
        }
        return out;
    }

    double mean_photon_number(std::size_t mode = 0) const {
        double s = 0.0;
        for (const FockBranch &b : branches_) {
            s += b.weight * b.state.mean_photon_number(mode);
        }
        return s / total_weight();
    }

  private:
    std::vector<FockBranch> branches_;
};

namespace detail {

inline FockState finish_single_mode(std::vector<Complex> c, const char *what) {
    double partial = 0.0;
    for (const Complex &a : c) {
        partial += std::norm(a);
    }
    const double tail = std::max(0.0, 1.0 - partial) + (c.size() > 1 ? std::norm(c.back()) : 0.0);
    if (tail >= kTailTolerance) {
        throw CutoffTooSmall(std::string(what) + ": cutoff " + std::to_string(c.size()) +
                             " leaves tail population " + std::to_string(tail));
    }
    const std::size_t cutoff = c.size();
    return FockState({cutoff}, std::move(c)).normalized();
}

}  // namespace detail

inline FockState number_state(std::size_t n, std::size_t cutoff) {
    if (n >= cutoff) {
        throw CutoffTooSmall("number state beyond cutoff");
    }
    std::vector<Complex> c(cutoff, 0.0);
    c[n] = 1.0;
    return FockState({cutoff}, std::move(c));
}

/// Unnormalized-free coherent coefficients e^{-|g|^2/2} g^n / sqrt(n!), n < cutoff.
inline std::vector<Complex> coherent_coefficients(Complex gamma, std::size_t cutoff) {
    std::vector<Complex> c(cutoff);
    if (cutoff == 0) {
        return c;
    }
    c[0] = std::exp(-0.5 * std::norm(gamma));
    for (std::size_t n = 1; n < cutoff; ++n) {
        c[n] = c[n - 1] * gamma / std::sqrt(static_cast<double>(n));
    }
    return c;
}

inline FockState coherent(Complex gamma, std::size_t cutoff) {
    return detail::finish_single_mode(coherent_coefficients(gamma, cutoff), "coherent");
}

inline FockState coherent(Complex gamma) { return coherent(gamma, default_cutoff(std::abs(gamma))); }

/// N_pm (|beta> pm |-beta>).
inline FockState cat_state(Complex beta, Parity parity, std::size_t cutoff) {
    const double b2 = std::norm(beta);
    if (parity == Parity::Odd && b2 == 0.0) {
        throw DegenerateCat("odd cat is undefined at zero amplitude");
    }
    // 2(1 - e^{-2|b|^2}) via expm1 so tiny odd cats keep their normalization.
    const double norm2 = parity == Parity::Even ? 2.0 * (1.0 + std::exp(-2.0 * b2)) : -2.0 * std::expm1(-2.0 * b2);
    const double scale = 1.0 / std::sqrt(norm2);
    std::vector<Complex> c = coherent_coefficients(beta, cutoff);
    const std::size_t keep = parity == Parity::Even ? 0 : 1;
    for (std::size_t n = 0; n < cutoff; ++n) {
        c[n] = (n % 2 == keep) ? 2.0 * scale * c[n] : Complex{0.0};
    }
    return detail::finish_single_mode(std::move(c), "cat_state");
}

inline FockState cat_state(Complex beta, Parity parity) {
    return cat_state(beta, parity, default_cutoff(std::abs(beta)));
}

/// |omega_k> for the M-PSK alphabet of amplitude beta: support on n = k (mod M).
inline FockState mpsk_resource_state(Complex beta, int M, int k, std::size_t cutoff) {
    if (M < 2 || k < 0 || k >= M) {
        throw DomainError("mpsk_resource_state needs M >= 2 and 0 <= k < M");
    }
    const double weight = psk_lambda(M, k, std::norm(beta)) / M;
    if (!(weight > 0.0)) {
        throw DegenerateCat("omega_k has zero weight at this amplitude");
    }
    std::vector<Complex> c = coherent_coefficients(beta, cutoff);
    for (std::size_t n = 0; n < cutoff; ++n) {
        c[n] = (static_cast<int>(n % M) == k) ? c[n] / std::sqrt(weight) : Complex{0.0};
    }
    return detail::finish_single_mode(std::move(c), "mpsk_resource_state");
}

/// Squeezed vacuum anti-squeezed along x for r > 0: Var x = e^{2r}/2, Var p = e^{-2r}/2.
inline FockState squeezed_vacuum(double r, std::size_t cutoff) {
    std::vector<Complex> c(cutoff, 0.0);
    const double t = std::tanh(r);
    c[0] = 1.0 / std::sqrt(std::cosh(r));
    for (std::size_t n = 2; n < cutoff; n += 2) {
        c[n] = c[n - 2] * t * std::sqrt(static_cast<double>(n - 1) / static_cast<double>(n));
    }
    return detail::finish_single_mode(std::move(c), "squeezed_vacuum");
}

inline void require_same_shape(const FockState &a, const FockState &b) {
    if (a.cutoffs() != b.cutoffs()) {
        throw ShapeMismatch("states have different mode counts or cutoffs");
    }
}

/// <a|b>.
inline Complex overlap(const FockState &a, const FockState &b) {
    require_same_shape(a, b);
    Complex s = 0.0;
    const auto &x = a.amplitudes();
    const auto &y = b.amplitudes();
    for (std::size_t i = 0; i < x.size(); ++i) {
        s += std::conj(x[i]) * y[i];
    }
    return s;
}

inline double fidelity(const FockState &a, const FockState &b) {
    const double f = std::norm(overlap(a, b)) / (a.squared_norm() * b.squared_norm());
    return std::clamp(f, 0.0, 1.0);
}

/// <b|rho|b> for the normalized ensemble.
inline double fidelity(const FockEnsemble &rho, const FockState &b) {
    double s = 0.0;
    for (const FockBranch &br : rho.branches()) {
        s += br.weight * std::norm(overlap(b, br.state));
    }
    return std::clamp(s / (rho.total_weight() * b.squared_norm()), 0.0, 1.0);
}

/// Tr(rho sigma) over normalized ensembles.
inline double hilbert_schmidt_overlap(const FockEnsemble &rho, const FockEnsemble &sigma) {
    double s = 0.0;
    for (const FockBranch &a : rho.branches()) {
        for (const FockBranch &b : sigma.branches()) {
            s += a.weight * b.weight * std::norm(overlap(a.state, b.state));
        }
    }
    return s / (rho.total_weight() * sigma.total_weight());
}

/// Tr(rho sigma) / sqrt(Tr rho^2 Tr sigma^2): equals |<a|b>|^2 for pure inputs and
/// reaches 1 only when rho = sigma.
inline double state_agreement(const FockEnsemble &rho, const FockEnsemble &sigma) {
    const double rs = hilbert_schmidt_overlap(rho, sigma);
    return rs / std::sqrt(hilbert_schmidt_overlap(rho, rho) * hilbert_schmidt_overlap(sigma, sigma));
}

/// Dense density matrix of a normalized ensemble; meant for single-mode or tiny spaces.
inline Eigen::MatrixXcd density_matrix(const FockEnsemble &rho) {
    const std::size_t dim = rho.branches().front().state.dimension();
    if (dim > 4096) {
        throw MultiModeUnsupported("dense density matrix requested for a large space");
    }
    Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(dim, dim);
    const double total = rho.total_weight();
    for (const FockBranch &b : rho.branches()) {
        Eigen::Map<const Eigen::VectorXcd> v(b.state.amplitudes().data(), dim);
        out.noalias() += (b.weight / total) * v * v.adjoint();
    }
    return out;
}

inline Eigen::MatrixXcd density_matrix(const FockState &psi) {
    return density_matrix(FockEnsemble::pure(psi));
}

/// Ensemble from a Hermitian PSD matrix via its eigenvectors, keeping the largest
/// eigenvalues until the discarded weight drops below `tolerance`.
inline FockEnsemble ensemble_from_density(const Eigen::MatrixXcd &rho, std::vector<std::size_t> cutoffs,
                                          double tolerance = 1e-12) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(rho);
    const Eigen::VectorXd &ev = es.eigenvalues();
    const double trace = std::max(ev.sum(), 0.0);
    std::vector<FockBranch> branches;
    double kept = 0.0;
    for (Eigen::Index i = ev.size() - 1; i >= 0; --i) {
        if (ev(i) <= 0.0 || kept >= trace * (1.0 - tolerance)) {
            break;
        }
        kept += ev(i);
        std::vector<Complex> v(es.eigenvectors().col(i).data(), es.eigenvectors().col(i).data() + ev.size());
        branches.push_back({ev(i), FockState(cutoffs, std::move(v))});
    }
    return FockEnsemble(std::move(branches));
}

/// Replaces a small-space ensemble by its eigen-decomposition (fewest branches).
inline FockEnsemble compressed(const FockEnsemble &rho, double tolerance = 1e-12) {
    const std::size_t dim = rho.branches().front().state.dimension();
    if (rho.size() <= 1 || dim > 512) {
        return rho;
    }
    const double total = rho.total_weight();
    FockEnsemble out = ensemble_from_density(density_matrix(rho), rho.cutoffs(), tolerance);
    std::vector<FockBranch> scaled = out.branches();
    for (FockBranch &b : scaled) {
        b.weight *= total;
    }
    return FockEnsemble(std::move(scaled));
}

/// Wigner function of a single-mode density matrix on the given points.
inline std::vector<double> wigner(const Eigen::MatrixXcd &rho, std::span<const PhaseSpacePoint> grid) {
    const Eigen::Index N = rho.rows();
    std::vector<double> out;
    out.reserve(grid.size());
    // sqrt(m!/(m+k)!) for all m + k < N.
    std::vector<double> log_fact(static_cast<std::size_t>(N) + 1, 0.0);
    for (Eigen::Index n = 1; n <= N; ++n) {
        log_fact[n] = log_fact[n - 1] + std::log(static_cast<double>(n));
    }
    std::vector<double> lag(static_cast<std::size_t>(N));
    for (const PhaseSpacePoint &pt : grid) {
        const Complex alpha = Complex(pt.x, pt.p) / std::numbers::sqrt2;
        const double B = 4.0 * std::norm(alpha);
        double acc = 0.0;
        Complex two_alpha_k = 1.0;
        for (Eigen::Index k = 0; k < N; ++k) {
            // Generalized Laguerre L_m^{(k)}(B), m = 0 .. N-1-k, by upward recurrence.
            const Eigen::Index count = N - k;
            lag[0] = 1.0;
            if (count > 1) {
                lag[1] = 1.0 + k - B;
            }
            for (Eigen::Index m = 1; m + 1 < count; ++m) {
                lag[m + 1] = ((2.0 * m + 1.0 + k - B) * lag[m] - (m + k) * lag[m - 1]) / (m + 1.0);
            }
            Complex s = 0.0;
            for (Eigen::Index m = 0; m < count; ++m) {
                const double sign = (m % 2 == 0) ? 1.0 : -1.0;
                const double ratio = std::exp(0.5 * (log_fact[m] - log_fact[m + k]));
                s += rho(m, m + k) * (sign * ratio * lag[m]);
            }
            acc += (k == 0) ? s.real() : 2.0 * (s * two_alpha_k).real();
            two_alpha_k *= 2.0 * alpha;
        }
        out.push_back(std::exp(-0.5 * B) / std::numbers::pi * acc);
    }
    return out;
}

inline std::vector<double> wigner(const FockEnsemble &rho, std::span<const PhaseSpacePoint> grid) {
    if (rho.mode_count() != 1) {
        throw MultiModeUnsupported("wigner needs a single-mode state");
    }
    return wigner(density_matrix(rho), grid);
}

inline std::vector<double> wigner(const FockState &psi, std::span<const PhaseSpacePoint> grid) {
    return wigner(FockEnsemble::pure(psi), grid);
}

}  // namespace teleamp
