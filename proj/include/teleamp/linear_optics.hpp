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

// Passive linear optics in both engines.
//
// Beam-splitter convention on the ordered pair (i, j), t = sqrt(1-R), r = sqrt(R):
//   coherent amplitudes  (g_i, g_j) -> (t g_i - r g_j,  r g_i + t g_j)
//   creation operators   a_i^dag -> t a_i^dag + r a_j^dag,  a_j^dag -> -r a_i^dag + t a_j^dag

#pragma once

#include <algorithm>
#include <array>
#include <functional>
#include <cmath>
#include <complex>
#include <cstddef>
#include <numeric>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "teleamp/coherent_branch.hpp"
#include "teleamp/detector.hpp"
#include "teleamp/errors.hpp"
#include "teleamp/fock.hpp"

namespace teleamp {

inline constexpr double kKrausTruncation = 1e-8;

struct BeamSplitter {
    double reflectivity = 0.0;
    std::size_t first = 0;
    std::size_t second = 1;

    double t() const { return std::sqrt(1.0 - reflectivity); }
    double r() const { return std::sqrt(reflectivity); }

    void validate(std::size_t mode_count) const {
        if (!(reflectivity >= 0.0 && reflectivity <= 1.0)) {
            throw DomainError("beam-splitter reflectivity must lie in [0, 1]");
        }
        if (first >= mode_count || second >= mode_count || first == second) {
            throw BadModeIndex("beam splitter acts on modes (" + std::to_string(first) + ", " +
                               std::to_string(second) + ") of a " + std::to_string(mode_count) + "-mode state");
        }
    }

    /// Row-major 2x2 map on (g_i, g_j).
    std::array<double, 4> amplitude_matrix() const { return {t(), -r(), r(), t()}; }
};

inline void check_loss(double R) {
    if (!(R >= 0.0 && R <= 1.0)) {
        throw BadLoss("loss must lie in [0, 1]");
    }
}

// ---------------------------------------------------------------------------
// Coherent-branch engine.

inline CoherentBranchState apply_beamsplitter(const CoherentBranchState &psi, const BeamSplitter &bs) {
    bs.validate(psi.mode_count());
    const double t = bs.t();
    const double r = bs.r();
    return psi.map_amplitudes([&](std::vector<Complex> v) {
        const Complex gi = v[bs.first];
        const Complex gj = v[bs.second];
        v[bs.first] = t * gi - r * gj;
        v[bs.second] = r * gi + t * gj;
        return v;
    });
}

inline BranchMixture apply_beamsplitter(const BranchMixture &rho, const BeamSplitter &bs) {
    bs.validate(rho.mode_count());
    const double t = bs.t();
    const double r = bs.r();
    return rho.map_amplitudes([&](std::vector<Complex> v) {
        const Complex gi = v[bs.first];
        const Complex gj = v[bs.second];
        v[bs.first] = t * gi - r * gj;
        v[bs.second] = r * gi + t * gj;
        return v;
    });
}

inline CoherentBranchState apply_phase(const CoherentBranchState &psi, std::size_t mode, double phase) {
    if (mode >= psi.mode_count()) {
        throw BadModeIndex("phase on a missing mode");
    }
    const Complex u = std::polar(1.0, phase);
    return psi.map_amplitudes([&](std::vector<Complex> v) {
        v[mode] *= u;
        return v;
    });
}

inline BranchMixture apply_phase(const BranchMixture &rho, std::size_t mode, double phase) {
    if (mode >= rho.mode_count()) {
        throw BadModeIndex("phase on a missing mode");
    }
    const Complex u = std::polar(1.0, phase);
    return rho.map_amplitudes([&](std::vector<Complex> v) {
        v[mode] *= u;
        return v;
    });
}

/// Loss R on `mode`; the environment is appended as the last mode, amplitude +sqrt(R) g.
inline CoherentBranchState loss_channel(const CoherentBranchState &psi, std::size_t mode, double R) {
    check_loss(R);
    if (mode >= psi.mode_count()) {
        throw BadModeIndex("loss on a missing mode");
    }
    const double t = std::sqrt(1.0 - R);
    const double r = std::sqrt(R);
    return psi.map_amplitudes(
        [&](std::vector<Complex> v) {
            const Complex g = v[mode];
            v[mode] = t * g;
            v.push_back(r * g);
            return v;
        },
        psi.mode_count() + 1);
}

inline BranchMixture loss_channel(const BranchMixture &rho, std::size_t mode, double R) {
    check_loss(R);
    if (mode >= rho.mode_count()) {
        throw BadModeIndex("loss on a missing mode");
    }
    const double t = std::sqrt(1.0 - R);
    const double r = std::sqrt(R);
    return rho.map_amplitudes(
        [&](std::vector<Complex> v) {
            const Complex g = v[mode];
            v[mode] = t * g;
            v.push_back(r * g);
            return v;
        },
        rho.mode_count() + 1);
}

/// Traces out every mode not listed in `keep` (kept modes stay in their original order).
inline BranchMixture partial_trace(const BranchMixture &rho, std::vector<std::size_t> keep) {
    std::sort(keep.begin(), keep.end());
    if (std::adjacent_find(keep.begin(), keep.end()) != keep.end() || keep.empty() ||
        keep.back() >= rho.mode_count()) {
        throw BadModeIndex("invalid keep-mode list");
    }
    BranchMixture out = rho;
    for (std::size_t m = rho.mode_count(); m-- > 0;) {
        if (!std::binary_search(keep.begin(), keep.end(), m)) {
            out = out.contract_mode(m, coherent_overlap);
        }
    }
    return out;
}

inline BranchMixture partial_trace(const CoherentBranchState &psi, std::vector<std::size_t> keep) {
    return partial_trace(BranchMixture::pure(psi), std::move(keep));
}

namespace detail {

/// Coherent coefficients with the faithful-embedding tail check.
inline std::vector<Complex> embedded_coherent(Complex gamma, std::size_t cutoff) {
    std::vector<Complex> c = coherent_coefficients(gamma, cutoff);
    double partial = 0.0;
    for (const Complex &a : c) {
        partial += std::norm(a);
    }
    if (1.0 - partial >= kTailTolerance) {
        throw CutoffTooSmall("cutoff " + std::to_string(cutoff) + " too small for amplitude " +
                             std::to_string(std::abs(gamma)));
    }
    return c;
}

inline std::vector<Complex> embedded_product(std::span<const Complex> amps, std::span<const std::size_t> cutoffs) {
    std::vector<Complex> v{1.0};
    for (std::size_t m = 0; m < amps.size(); ++m) {
        const std::vector<Complex> c = embedded_coherent(amps[m], cutoffs[m]);
        std::vector<Complex> next;
        next.reserve(v.size() * c.size());
        for (const Complex &a : v) {
            for (const Complex &b : c) {
                next.push_back(a * b);
            }
        }
        v = std::move(next);
    }
    return v;
}

}  // namespace detail

/// Faithful number-basis image (no renormalization beyond the truncation itself).
inline FockState to_fock(const CoherentBranchState &psi, std::vector<std::size_t> cutoffs) {
    if (cutoffs.size() != psi.mode_count()) {
        throw ShapeMismatch("one cutoff per mode required");
    }
    std::size_t dim = 1;
    for (std::size_t c : cutoffs) {
        dim *= c;
    }
    std::vector<Complex> out(dim, 0.0);
    for (const CoherentBranch &b : psi.branches()) {
        const std::vector<Complex> v = detail::embedded_product(b.amplitudes, cutoffs);
        for (std::size_t i = 0; i < dim; ++i) {
            out[i] += b.coefficient * v[i];
        }
    }
    return FockState(std::move(cutoffs), std::move(out));
}

/// Largest amplitude magnitude any branch puts on `mode`.
inline double max_amplitude(const CoherentBranchState &psi, std::size_t mode) {
    double m = 0.0;
    for (const CoherentBranch &b : psi.branches()) {
        m = std::max(m, std::abs(b.amplitudes.at(mode)));
    }
    return m;
}

inline std::vector<std::size_t> default_cutoffs(const CoherentBranchState &psi) {
    std::vector<std::size_t> c;
    for (std::size_t m = 0; m < psi.mode_count(); ++m) {
        c.push_back(default_cutoff(max_amplitude(psi, m)));
    }
    return c;
}

/// Ensemble image of a mixture: K = U diag(l) U^dag gives rho = sum_k l_k |V u_k><V u_k|.
inline FockEnsemble to_fock(const BranchMixture &rho, std::vector<std::size_t> cutoffs) {
    if (cutoffs.size() != rho.mode_count()) {
        throw ShapeMismatch("one cutoff per mode required");
    }
    const Eigen::Index n = rho.kernel().rows();
    std::size_t dim = 1;
    for (std::size_t c : cutoffs) {
        dim *= c;
    }
    Eigen::MatrixXcd V(static_cast<Eigen::Index>(dim), n);
    for (Eigen::Index i = 0; i < n; ++i) {
        const std::vector<Complex> v = detail::embedded_product(rho.vectors()[i], cutoffs);
        V.col(i) = Eigen::Map<const Eigen::VectorXcd>(v.data(), static_cast<Eigen::Index>(dim));
    }
    const Eigen::MatrixXcd K = 0.5 * (rho.kernel() + rho.kernel().adjoint());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(K);
    std::vector<FockBranch> branches;
    const double scale = std::max(es.eigenvalues().cwiseAbs().maxCoeff(), 1e-300);
    for (Eigen::Index k = 0; k < n; ++k) {
        const double l = es.eigenvalues()(k);
        if (l <= 1e-14 * scale) {
            continue;
        }
        Eigen::VectorXcd w = V * es.eigenvectors().col(k);
        std::vector<Complex> amps(w.data(), w.data() + w.size());
        branches.push_back({l, FockState(cutoffs, std::move(amps))});
    }
    FockEnsemble raw(std::move(branches));
    return raw.normalized();
}

// ---------------------------------------------------------------------------
// Fock engine.

namespace detail {

/// Number-basis matrix elements <m_i, N-m_i| U |n_i, N-n_i> of one beam splitter.
class BeamSplitterTable {
  public:
    BeamSplitterTable(const BeamSplitter &bs, std::size_t ci, std::size_t cj) : ci_(ci), cj_(cj) {
        const double t = bs.t();
        const double r = bs.r();
        const std::size_t n_max = ci + cj - 2;
        std::vector<double> lf(n_max + 2, 0.0);
        for (std::size_t n = 1; n < lf.size(); ++n) {
            lf[n] = lf[n - 1] + std::log(static_cast<double>(n));
        }
        blocks_.resize(n_max + 1);
        for (std::size_t N = 0; N <= n_max; ++N) {
            auto &blk = blocks_[N];
            blk.assign((N + 1) * (N + 1), 0.0);
            for (std::size_t ni = lo(N); ni <= hi(N); ++ni) {
                const std::size_t nj = N - ni;
                for (std::size_t mi = lo(N); mi <= hi(N); ++mi) {
                    const std::size_t mj = N - mi;
                    const double pre = 0.5 * (lf[mi] + lf[mj] - lf[ni] - lf[nj]);
                    double s = 0.0;
                    const std::size_t k_lo = mi > nj ? mi - nj : 0;
                    const std::size_t k_hi = std::min(ni, mi);
                    for (std::size_t k = k_lo; k <= k_hi; ++k) {
                        const std::size_t l = mi - k;
                        const double binom = lf[ni] - lf[k] - lf[ni - k] + lf[nj] - lf[l] - lf[nj - l];
                        const double mag = std::exp(binom + pre) * ipow(t, k + nj - l) * ipow(r, ni - k + l);
                        s += (l % 2 == 0) ? mag : -mag;
                    }
                    blk[mi * (N + 1) + ni] = s;
                }
            }
        }
    }

    std::size_t lo(std::size_t N) const { return N + 1 > cj_ ? N + 1 - cj_ : 0; }
    std::size_t hi(std::size_t N) const { return std::min(N, ci_ - 1); }
    double operator()(std::size_t N, std::size_t mi, std::size_t ni) const { return blocks_[N][mi * (N + 1) + ni]; }

  private:
    static double ipow(double x, std::size_t k) {
        double y = 1.0;
        for (std::size_t i = 0; i < k; ++i) {
            y *= x;
        }
        return y;
    }

    std::size_t ci_;
    std::size_t cj_;
    std::vector<std::vector<double>> blocks_;
};

inline FockState apply_table(const FockState &psi, const BeamSplitter &bs, const BeamSplitterTable &T) {
    const std::size_t si = psi.stride(bs.first);
    const std::size_t sj = psi.stride(bs.second);
    const auto &in = psi.amplitudes();
    std::vector<Complex> out(in.size(), 0.0);
    for (std::size_t idx = 0; idx < in.size(); ++idx) {
        const Complex v = in[idx];
        if (v == Complex{0.0}) {
            continue;
        }
        const std::size_t ni = psi.photon_number(idx, bs.first);
        const std::size_t nj = psi.photon_number(idx, bs.second);
        const std::size_t base = idx - ni * si - nj * sj;
        const std::size_t N = ni + nj;
        for (std::size_t mi = T.lo(N); mi <= T.hi(N); ++mi) {
            out[base + mi * si + (N - mi) * sj] += T(N, mi, ni) * v;
        }
    }
    return FockState(psi.cutoffs(), std::move(out));
}

}  // namespace detail

inline FockState apply_beamsplitter(const FockState &psi, const BeamSplitter &bs) {
    bs.validate(psi.mode_count());
    const detail::BeamSplitterTable T(bs, psi.cutoff(bs.first), psi.cutoff(bs.second));
    return detail::apply_table(psi, bs, T);
}

inline FockEnsemble apply_beamsplitter(const FockEnsemble &rho, const BeamSplitter &bs) {
    bs.validate(rho.mode_count());
    const detail::BeamSplitterTable T(bs, rho.cutoffs()[bs.first], rho.cutoffs()[bs.second]);
    std::vector<FockBranch> out;
    for (const FockBranch &b : rho.branches()) {
        out.push_back({b.weight, detail::apply_table(b.state, bs, T)});
    }
    return FockEnsemble(std::move(out));
}

inline FockState apply_phase(const FockState &psi, std::size_t mode, double phase) {
    psi.check_mode(mode);
    std::vector<Complex> amps = psi.amplitudes();
    const std::size_t c = psi.cutoff(mode);
    std::vector<Complex> u(c);
    for (std::size_t n = 0; n < c; ++n) {
        u[n] = std::polar(1.0, phase * static_cast<double>(n));
    }
    for (std::size_t i = 0; i < amps.size(); ++i) {
        amps[i] *= u[psi.photon_number(i, mode)];
    }
    return FockState(psi.cutoffs(), std::move(amps));
}

inline FockEnsemble apply_phase(const FockEnsemble &rho, std::size_t mode, double phase) {
    std::vector<FockBranch> out;
    for (const FockBranch &b : rho.branches()) {
        out.push_back({b.weight, apply_phase(b.state, mode, phase)});
    }
    return FockEnsemble(std::move(out));
}

namespace detail {

/// A_k |n> = sqrt(C(n,k)) t^{n-k} r^k |n-k> on `mode`; element k of the result.
inline std::vector<FockState> loss_kraus_images(const FockState &psi, std::size_t mode, double R) {
    psi.check_mode(mode);
    const std::size_t c = psi.cutoff(mode);
    const std::size_t s = psi.stride(mode);
    const double t = std::sqrt(1.0 - R);
    const double r = std::sqrt(R);
    std::vector<double> lf(c + 1, 0.0);
    for (std::size_t n = 1; n <= c; ++n) {
        lf[n] = lf[n - 1] + std::log(static_cast<double>(n));
    }
    std::vector<FockState> images;
    const auto &in = psi.amplitudes();
    for (std::size_t k = 0; k < c; ++k) {
        std::vector<Complex> out(in.size(), 0.0);
        bool any = false;
        for (std::size_t idx = 0; idx < in.size(); ++idx) {
            const std::size_t n = psi.photon_number(idx, mode);
            if (n < k || in[idx] == Complex{0.0}) {
                continue;
            }
            const double coeff = std::exp(0.5 * (lf[n] - lf[k] - lf[n - k])) * std::pow(t, static_cast<double>(n - k)) *
                                 std::pow(r, static_cast<double>(k));
            if (coeff == 0.0) {
                continue;
            }
            out[idx - k * s] += coeff * in[idx];
            any = true;
        }
        if (!any) {
            break;
        }
        images.emplace_back(psi.cutoffs(), std::move(out));
    }
    return images;
}

}  // namespace detail

/// Kraus-unraveled loss; branches are kept in order of weight until the retained
/// weight reaches 1 - truncation.
inline FockEnsemble loss_channel(const FockEnsemble &rho, std::size_t mode, double R,
                                 double truncation = kKrausTruncation) {
    check_loss(R);
    if (mode >= rho.mode_count()) {
        throw BadModeIndex("loss on a missing mode");
    }
    std::vector<FockBranch> out;
    for (const FockBranch &b : rho.branches()) {
        std::vector<FockState> images = detail::loss_kraus_images(b.state, mode, R);
        std::vector<std::pair<double, std::size_t>> order;
        for (std::size_t k = 0; k < images.size(); ++k) {
            order.emplace_back(images[k].squared_norm(), k);
        }
        std::sort(order.begin(), order.end(), std::greater<>());
        double kept = 0.0;
        for (const auto &[w, k] : order) {
            if (kept >= 1.0 - truncation || w <= 0.0) {
                break;
            }
            kept += w;
            out.push_back({b.weight, std::move(images[k])});
        }
    }
    return FockEnsemble(std::move(out));
}

inline FockEnsemble loss_channel(const FockState &psi, std::size_t mode, double R,
                                 double truncation = kKrausTruncation) {
    return loss_channel(FockEnsemble::pure(psi), mode, R, truncation);
}

struct SubtractionResult {
    FockEnsemble state;
    double probability = 0.0;
};

/// Tap `tap_ratio` of `mode` onto an on/off detector and keep the click events.
inline SubtractionResult photon_subtract(const FockEnsemble &rho, double tap_ratio, const DetectorModel &apd,
                                         std::size_t mode = 0) {
    if (!(tap_ratio > 0.0 && tap_ratio < 1.0)) {
        throw DomainError("tap ratio must lie in (0, 1)");
    }
    apd.validate();
    if (mode >= rho.mode_count()) {
        throw BadModeIndex("subtraction on a missing mode");
    }
    std::vector<FockBranch> out;
    const double total = rho.total_weight();
    for (const FockBranch &b : rho.branches()) {
        std::vector<FockState> images = detail::loss_kraus_images(b.state, mode, tap_ratio);
        for (std::size_t k = 0; k < images.size(); ++k) {
            const double p = apd.on_weight(k);
            if (p > 0.0) {
                out.push_back({b.weight / total * p, std::move(images[k])});
            }
        }
    }
    if (out.empty()) {
        throw ZeroProbability("photon subtraction never heralds");
    }
    double prob = 0.0;
    for (const FockBranch &b : out) {
        prob += b.weight * b.state.squared_norm();
    }
    if (prob < 1e-15) {
        throw ZeroProbability("photon subtraction heralding probability below 1e-15");
    }
    FockEnsemble conditioned(std::move(out));
    return {conditioned.normalized(), prob};
}

inline SubtractionResult photon_subtract(const FockState &psi, double tap_ratio, const DetectorModel &apd,
                                         std::size_t mode = 0) {
    return photon_subtract(FockEnsemble::pure(psi), tap_ratio, apd, mode);
}

namespace detail {

/// Splits each branch over the number states of the modes not in `keep`, weighting
/// the piece for traced photon numbers `ns` by weight(ns). Unit weight is the partial
/// trace; POVM diagonals give conditioning. Result weights are not renormalized.
template <typename Weight>
std::vector<FockBranch> unravel(const FockEnsemble &rho, const std::vector<std::size_t> &keep, Weight &&weight) {
    const std::size_t modes = rho.mode_count();
    std::vector<bool> kept(modes, false);
    for (std::size_t m : keep) {
        if (m >= modes || kept[m]) {
            throw BadModeIndex("invalid keep-mode list");
        }
        kept[m] = true;
    }
    if (keep.empty()) {
        throw BadModeIndex("at least one mode must be kept");
    }
    const auto &cut = rho.cutoffs();
    std::vector<std::size_t> traced;
    for (std::size_t m = 0; m < modes; ++m) {
        if (!kept[m]) {
            traced.push_back(m);
        }
    }
    std::vector<std::size_t> out_cut;
    for (std::size_t m : keep) {
        out_cut.push_back(cut[m]);
    }
    std::size_t traced_dim = 1;
    for (std::size_t m : traced) {
        traced_dim *= cut[m];
    }
    std::size_t kept_dim = 1;
    for (std::size_t c : out_cut) {
        kept_dim *= c;
    }
    const FockState &shape = rho.branches().front().state;
    std::vector<std::size_t> kept_offset(kept_dim, 0);
    for (std::size_t k = 0; k < kept_dim; ++k) {
        std::size_t r = k;
        for (std::size_t q = keep.size(); q-- > 0;) {
            kept_offset[k] += (r % out_cut[q]) * shape.stride(keep[q]);
            r /= out_cut[q];
        }
    }
    std::vector<FockBranch> out;
    std::vector<std::size_t> ns(traced.size(), 0);
    for (std::size_t t = 0; t < traced_dim; ++t) {
        std::size_t r = t;
        std::size_t offset = 0;
        for (std::size_t q = traced.size(); q-- > 0;) {
            ns[q] = r % cut[traced[q]];
            r /= cut[traced[q]];
            offset += ns[q] * shape.stride(traced[q]);
        }
        const double w = weight(std::span<const std::size_t>(ns));
        if (!(w > 0.0)) {
            continue;
        }
        for (const FockBranch &b : rho.branches()) {
            const auto &amps = b.state.amplitudes();
            std::vector<Complex> v(kept_dim);
            bool any = false;
            for (std::size_t k = 0; k < kept_dim; ++k) {
                v[k] = amps[offset + kept_offset[k]];
                any = any || v[k] != Complex{0.0};
            }
            if (any) {
                out.push_back({b.weight * w, FockState(out_cut, std::move(v))});
            }
        }
    }
    return out;
}

}  // namespace detail

/// Traces out the modes not in `keep`; kept modes are reordered as listed.
inline FockEnsemble partial_trace(const FockEnsemble &rho, const std::vector<std::size_t> &keep) {
    return FockEnsemble(detail::unravel(rho, keep, [](std::span<const std::size_t>) { return 1.0; }));
}

inline FockEnsemble partial_trace(const FockState &psi, const std::vector<std::size_t> &keep) {
    return partial_trace(FockEnsemble::pure(psi), keep);
}

}  // namespace teleamp
