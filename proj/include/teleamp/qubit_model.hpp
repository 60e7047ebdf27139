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

// Cat-qubit teleportation with a photon-subtracted squeezed vacuum resource.
//
// Resource: squeezed vacuum -> 92% transmission (mode impurity) -> 96% OPO escape
// -> 5% tap read by an on/off APD -> 95% propagation. The squeezing is tuned so the
// best-fit odd cat has the amplitude the protocol asks for, as in the experiment.

#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <functional>
#include <numbers>
#include <vector>

#include "teleamp/detection.hpp"
#include "teleamp/errors.hpp"
#include "teleamp/fock.hpp"
#include "teleamp/linear_optics.hpp"
#include "teleamp/protocol.hpp"

namespace teleamp {

/// r = kPumpScale * 2 artanh(epsilon). The factor multiplies the zero-frequency
/// squeezing of a below-threshold OPO and is fitted so that pump parameters 0.15
/// and 0.31 give best-fit cat amplitudes 0.78 and 1.15 under the default model
/// (see calibrate_pump_scale).
inline constexpr double kPumpScale = 0.8234;

struct ImperfectionModel {
    double sv_purity_transmission = 0.92;
    double opo_escape = 0.96;
    double tap_ratio = 0.05;
    double propagation = 0.95;
    double apd_efficiency = 0.10;
    double dark_count = 0.0;

    /// Lossless optics, unit-efficiency detectors and a weak tap.
    static ImperfectionModel ideal() { return {1.0, 1.0, 1e-3, 1.0, 1.0, 0.0}; }

    void validate() const {
        for (double v : {sv_purity_transmission, opo_escape, propagation, apd_efficiency}) {
            if (!(v > 0.0 && v <= 1.0)) {
                throw DomainError("imperfection parameters must lie in (0, 1]");
            }
        }
        if (!(tap_ratio > 0.0 && tap_ratio < 1.0)) {
            throw DomainError("tap ratio must lie in (0, 1)");
        }
        if (!(dark_count >= 0.0)) {
            throw DomainError("dark count must be non-negative");
        }
    }

    DetectorModel apd() const { return {dark_count, apd_efficiency}; }
};

inline double squeezing_from_pump(double epsilon, double scale = kPumpScale) {
    if (!(epsilon >= 0.0 && epsilon < 1.0)) {
        throw DomainError("pump parameter must lie in [0, 1)");
    }
    return scale * 2.0 * std::atanh(epsilon);
}

namespace detail {

/// Smallest even cutoff leaving less than `tail` squeezed-vacuum population above it.
inline std::size_t squeezed_cutoff(double r, double tail = 1e-13) {
    const double t2 = std::tanh(r) * std::tanh(r);
    double p = 1.0 / std::cosh(r);
    double acc = 0.0;
    for (std::size_t m = 0; m < 200; ++m) {
        acc += p;
        if (1.0 - acc < tail) {
            return std::max<std::size_t>(2 * m + 3, 20);
        }
        p *= t2 * (2.0 * m + 1.0) / (2.0 * m + 2.0);
    }
    throw CutoffTooSmall("squeezing too strong for the number basis");
}

inline FockEnsemble lossy(const FockEnsemble &rho, double transmission) {
    if (transmission >= 1.0) {
        return rho;
    }
    return compressed(loss_channel(rho, 0, 1.0 - transmission, 1e-13), 1e-14);
}

/// Odd-cat coefficients restricted to `cutoff` levels and renormalized there.
inline Eigen::VectorXcd odd_cat_vector(double beta, std::size_t cutoff) {
    std::vector<Complex> c = coherent_coefficients(beta, cutoff);
    Eigen::VectorXcd v = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(cutoff));
    for (std::size_t n = 1; n < cutoff; n += 2) {
        v(static_cast<Eigen::Index>(n)) = c[n];
    }
    return v / v.norm();
}

}  // namespace detail

struct PssvResource {
    FockEnsemble state;
    double herald_probability = 0.0;
    double squeezing = 0.0;
};

inline PssvResource build_pssv_resource(double r, const ImperfectionModel &model) {
    model.validate();
    if (!(r > 0.0)) {
        throw DomainError("squeezing must be positive");
    }
    const std::size_t n = detail::squeezed_cutoff(r);
    FockEnsemble rho = FockEnsemble::pure(squeezed_vacuum(r, n));
    rho = detail::lossy(rho, model.sv_purity_transmission);
    rho = detail::lossy(rho, model.opo_escape);
    SubtractionResult sub = photon_subtract(rho, model.tap_ratio, model.apd());
    rho = detail::lossy(compressed(sub.state, 1e-14), model.propagation);
    return {rho.normalized(), sub.probability, r};
}

struct CatFit {
    double beta = 0.0;
    double fidelity = 0.0;
};

/// argmax_beta <Phi_-(beta)|rho|Phi_-(beta)> over beta in (0.02, 3].
inline CatFit best_fit_odd_cat(const Eigen::MatrixXcd &rho) {
    const std::size_t n = static_cast<std::size_t>(rho.rows());
    auto f = [&](double b) {
        const Eigen::VectorXcd v = detail::odd_cat_vector(b, n);
        return (v.adjoint() * rho * v)(0, 0).real();
    };
    double best_b = 0.02;
    double best_f = f(best_b);
    const int steps = 150;
    for (int i = 1; i <= steps; ++i) {
        const double b = 0.02 + (3.0 - 0.02) * i / steps;
        const double v = f(b);
        if (v > best_f) {
            best_f = v;
            best_b = b;
        }
    }
    double lo = std::max(0.02, best_b - 0.02);
    double hi = std::min(3.0, best_b + 0.02);
    const double phi = (std::sqrt(5.0) - 1.0) / 2.0;
    double x1 = hi - phi * (hi - lo);
    double x2 = lo + phi * (hi - lo);
    double f1 = f(x1);
    double f2 = f(x2);
    while (hi - lo > 1e-10) {
        if (f1 < f2) {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + phi * (hi - lo);
            f2 = f(x2);
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - phi * (hi - lo);
            f1 = f(x1);
        }
    }
    const double b = 0.5 * (lo + hi);
    return {b, f(b)};
}

inline CatFit best_fit_odd_cat(const FockEnsemble &rho) { return best_fit_odd_cat(density_matrix(rho)); }

/// Squeezing whose PSSV resource best matches |Phi_-(beta)>.
inline double squeezing_for_cat_amplitude(double beta, const ImperfectionModel &model, double r_max = 0.75) {
    auto fit = [&](double r) { return best_fit_odd_cat(build_pssv_resource(r, model).state).beta; };
    double lo = 1e-3;
    double hi = r_max;
    if (fit(lo) > beta || fit(hi) < beta) {
        throw DomainError("no squeezing in (0, " + std::to_string(r_max) + "] gives cat amplitude " +
                          std::to_string(beta));
    }
    while (hi - lo > 1e-7) {
        const double mid = 0.5 * (lo + hi);
        (fit(mid) < beta ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

/// Least-squares scale c in r = c * 2 artanh(eps) through the two anchors
/// (eps, beta) = (0.15, 0.78) and (0.31, 1.15).
inline double calibrate_pump_scale(const ImperfectionModel &model = {}) {
    const std::array<std::pair<double, double>, 2> anchors{{{0.15, 0.78}, {0.31, 1.15}}};
    auto cost = [&](double c) {
        double s = 0.0;
        for (const auto &[eps, beta] : anchors) {
            const double b = best_fit_odd_cat(build_pssv_resource(squeezing_from_pump(eps, c), model).state).beta;
            s += (b - beta) * (b - beta);
        }
        return s;
    };
    double lo = 0.5;
    double hi = 1.2;
    const double phi = (std::sqrt(5.0) - 1.0) / 2.0;
    double x1 = hi - phi * (hi - lo);
    double x2 = lo + phi * (hi - lo);
    double f1 = cost(x1);
    double f2 = cost(x2);
    while (hi - lo > 1e-6) {
        if (f1 > f2) {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + phi * (hi - lo);
            f2 = cost(x2);
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - phi * (hi - lo);
            f1 = cost(x1);
        }
    }
    return 0.5 * (lo + hi);
}

/// cos(theta/2)|Phi_+(alpha)> + e^{i phi} sin(theta/2)|Phi_-(alpha)>.
struct CatQubit {
    double alpha = 0.4;
    double theta = 0.0;
    double phi = 0.0;

    void validate() const {
        if (!(alpha > 0.0)) {
            throw DegenerateCat("cat qubit needs alpha > 0");
        }
    }

    double n_plus() const { return 1.0 / std::sqrt(2.0 * (1.0 + std::exp(-2.0 * alpha * alpha))); }
    double n_minus() const { return 1.0 / std::sqrt(-2.0 * std::expm1(-2.0 * alpha * alpha)); }

    Complex c_plus() const {
        return n_plus() * std::cos(theta / 2.0) + n_minus() * std::polar(1.0, phi) * std::sin(theta / 2.0);
    }
    Complex c_minus() const {
        return n_plus() * std::cos(theta / 2.0) - n_minus() * std::polar(1.0, phi) * std::sin(theta / 2.0);
    }

    CoherentBranchState branches() const {
        validate();
        return CoherentBranchState(1, {{c_plus(), {alpha}}, {c_minus(), {-alpha}}});
    }

    FockState to_fock(std::size_t cutoff) const {
        return teleamp::to_fock(branches(), {cutoff}).normalized();
    }
};

enum class ResourceKind { Pssv, IdealCat };
enum class HeraldKind { OnOff, IdealProjectors };

struct TeleportSettings {
    double R_B = 0.1;
    double R_E = 0.0;
    ResourceKind resource = ResourceKind::Pssv;
    HeraldKind herald = HeraldKind::OnOff;
    bool detect_port_c = false;  // on/off herald only; ideal projectors always read C
    std::size_t cutoff = 20;     // lower bound; raised if the resource needs more levels
};

/// Precomputes the teleportation map for one (alpha, alpha') setting.
/// With |psi_s> = |s alpha> (s = +-) the unnormalized output for c_+|alpha> + c_-|-alpha>
/// is sum_{s s'} c_s c_s'^* X_{s s'}, so every Bloch point costs O(N^2).
class QubitTeleporter {
  public:
    QubitTeleporter(double alpha, double alpha_out, const ImperfectionModel &model = {},
                    const TeleportSettings &settings = {})
        : alpha_(alpha), alpha_out_(alpha_out), settings_(settings) {
        model.validate();
        if (!(alpha > 0.0) || !(alpha_out > 0.0)) {
            throw DomainError("alpha and alpha' must be positive");
        }
        check_loss(settings.R_E);
        gain_ = alpha_out / alpha;
        R_A_ = solve_ra_for_gain(gain_, settings.R_B, settings.R_E);
        ProtocolConfig cfg;
        cfg.alpha = alpha;
        cfg.R_A = R_A_;
        cfg.R_B = settings.R_B;
        cfg.R_E = settings.R_E;
        beta_ = resource_amplitude(cfg);

        Eigen::MatrixXcd resource;
        if (settings.resource == ResourceKind::IdealCat) {
            resource = density_matrix(cat_state(beta_, Parity::Odd, std::max<std::size_t>(default_cutoff(beta_), 20)));
        } else {
            squeezing_ = squeezing_for_cat_amplitude(beta_, model);
            PssvResource res = build_pssv_resource(squeezing_, model);
            herald_probability_ = res.herald_probability;
            resource = density_matrix(res.state);
        }
        cutoff_ = std::max({settings.cutoff, needed_levels(resource), default_cutoff(alpha), default_cutoff(alpha_out)});
        const std::size_t N = cutoff_;
        if (static_cast<std::size_t>(resource.rows()) < N) {
            Eigen::MatrixXcd padded = Eigen::MatrixXcd::Zero(N, N);
            padded.topLeftCorner(resource.rows(), resource.cols()) = resource;
            resource = padded;
        }
        resource = resource.topLeftCorner(N, N).eval();
        const FockEnsemble res_ens = ensemble_from_density(resource, {N}, 1e-13);

        // Alice's herald weights p(n_A) and q(n_C).
        const DetectorModel apd = model.apd();
        std::vector<double> pa(N), qc(N);
        for (std::size_t n = 0; n < N; ++n) {
            if (settings.herald == HeraldKind::IdealProjectors) {
                pa[n] = n == 1 ? 1.0 : 0.0;
                qc[n] = n == 0 ? 1.0 : 0.0;
            } else {
                pa[n] = apd.on_weight(n);
                qc[n] = settings.detect_port_c ? apd.off_weight(n) : 1.0;
            }
        }

        // Per resource branch (and loss Kraus branch), the 3-mode states for s = +-.
        std::array<FockState, 2> inputs{coherent_vector(alpha, N), coherent_vector(-alpha, N)};
        for (auto &x : X_) {
            for (auto &y : x) {
                y = Eigen::MatrixXcd::Zero(N, N);
            }
        }
        const detail::BeamSplitterTable bs_bc({settings.R_B, binary_modes::C, binary_modes::B}, N, N);
        const detail::BeamSplitterTable bs_ac({R_A_, binary_modes::C, binary_modes::A}, N, N);
        for (const FockBranch &rb : res_ens.branches()) {
            std::array<std::vector<FockState>, 2> outs;
            for (int s = 0; s < 2; ++s) {
                FockState psi = inputs[s].tensor(rb.state).tensor(FockState::vacuum({N}));
                psi = detail::apply_table(psi, {settings.R_B, binary_modes::C, binary_modes::B}, bs_bc);
                std::vector<FockState> kraus = settings.R_E > 0.0
                                                   ? detail::loss_kraus_images(psi, binary_modes::C, settings.R_E)
                                                   : std::vector<FockState>{psi};
                for (FockState &k : kraus) {
                    outs[s].push_back(detail::apply_table(k, {R_A_, binary_modes::C, binary_modes::A}, bs_ac));
                }
            }
            const std::size_t nk = std::min(outs[0].size(), outs[1].size());
            for (std::size_t k = 0; k < nk; ++k) {
                for (int s = 0; s < 2; ++s) {
                    for (int t = 0; t < 2; ++t) {
                        accumulate(X_[s][t], rb.weight, outs[s][k], outs[t][k], pa, qc);
                    }
                }
            }
        }
    }

    double gain() const { return gain_; }
    double R_A() const { return R_A_; }
    double beta() const { return beta_; }
    double squeezing() const { return squeezing_; }
    double herald_probability() const { return herald_probability_; }
    std::size_t cutoff() const { return cutoff_; }

    /// Unnormalized output on B after the pi-phase correction; its trace is the
    /// success probability.
    Eigen::MatrixXcd raw_output(const CatQubit &q) const {
        const std::array<Complex, 2> c{q.c_plus(), q.c_minus()};
        Eigen::MatrixXcd rho = Eigen::MatrixXcd::Zero(cutoff_, cutoff_);
        for (int s = 0; s < 2; ++s) {
            for (int t = 0; t < 2; ++t) {
                rho += c[s] * std::conj(c[t]) * X_[s][t];
            }
        }
        for (std::size_t m = 0; m < cutoff_; ++m) {
            for (std::size_t n = 0; n < cutoff_; ++n) {
                if ((m + n) % 2 == 1) {
                    rho(m, n) = -rho(m, n);
                }
            }
        }
        return rho;
    }

    double success_probability(double theta, double phi) const {
        return raw_output({alpha_, theta, phi}).trace().real();
    }

    Eigen::MatrixXcd output(double theta, double phi) const {
        Eigen::MatrixXcd rho = raw_output({alpha_, theta, phi});
        const double p = rho.trace().real();
        if (!(p >= kZeroProbability)) {
            throw ZeroProbability("teleportation herald probability below 1e-15");
        }
        return rho / p;
    }

    double fidelity(double theta, double phi) const {
        const Eigen::MatrixXcd rho = output(theta, phi);
        const FockState t = CatQubit{alpha_out_, theta, phi}.to_fock(cutoff_);
        Eigen::Map<const Eigen::VectorXcd> v(t.amplitudes().data(), static_cast<Eigen::Index>(cutoff_));
        return std::clamp((v.adjoint() * rho * v)(0, 0).real(), 0.0, 1.0);
    }

  private:
    static FockState coherent_vector(double a, std::size_t N) {
        return FockState({N}, coherent_coefficients(a, N)).normalized();
    }

    /// Levels needed so the resource population above them stays below 1e-10.
    static std::size_t needed_levels(const Eigen::MatrixXcd &rho) {
        double tail = 0.0;
        for (Eigen::Index n = rho.rows(); n-- > 0;) {
            tail += rho(n, n).real();
            if (tail >= kTailTolerance) {
                return static_cast<std::size_t>(n) + 2;
            }
        }
        return 2;
    }

    /// X += w sum_{nA, c} p(nA) q(c) v_s[nA, :, c] v_t[nA, :, c]^dag.
    void accumulate(Eigen::MatrixXcd &X, double w, const FockState &vs, const FockState &vt,
                    const std::vector<double> &pa, const std::vector<double> &qc) const {
        const std::size_t N = cutoff_;
        const auto &a = vs.amplitudes();
        const auto &b = vt.amplitudes();
        Eigen::VectorXcd x(N), y(N);
        for (std::size_t nA = 0; nA < N; ++nA) {
            if (pa[nA] == 0.0) {
                continue;
            }
            for (std::size_t c = 0; c < N; ++c) {
                const double wq = w * pa[nA] * qc[c];
                if (wq == 0.0) {
                    continue;
                }
                for (std::size_t nB = 0; nB < N; ++nB) {
                    const std::size_t idx = (nA * N + nB) * N + c;
                    x(nB) = a[idx];
                    y(nB) = b[idx];
                }
                X.noalias() += wq * x * y.adjoint();
            }
        }
    }

    double alpha_;
    double alpha_out_;
    TeleportSettings settings_;
    double gain_ = 0.0;
    double R_A_ = 0.0;
    double beta_ = 0.0;
    double squeezing_ = 0.0;
    double herald_probability_ = 1.0;
    std::size_t cutoff_ = 0;
    std::array<std::array<Eigen::MatrixXcd, 2>, 2> X_;
};

struct QubitTeleportResult {
    FockEnsemble output;
    double fidelity = 0.0;
    double probability = 0.0;
};

inline QubitTeleportResult teleport_qubit(const CatQubit &q, double alpha_out, const ImperfectionModel &model = {},
                                          const TeleportSettings &settings = {}) {
    q.validate();
    const QubitTeleporter tp(q.alpha, alpha_out, model, settings);
    const Eigen::MatrixXcd rho = tp.output(q.theta, q.phi);
    return {ensemble_from_density(rho, {tp.cutoff()}), tp.fidelity(q.theta, q.phi),
            tp.success_probability(q.theta, q.phi)};
}

struct BlochPoint {
    double theta = 0.0;
    double phi = 0.0;
    double weight = 0.0;  // quadrature weight, summing to 1
};

/// n points at z_i = 1 - (2i+1)/n, phi_i = i pi (3 - sqrt 5) mod 2 pi, equal weights.
inline std::vector<BlochPoint> fibonacci_grid(std::size_t n = 168) {
    std::vector<BlochPoint> g;
    const double golden = std::numbers::pi * (3.0 - std::sqrt(5.0));
    for (std::size_t i = 0; i < n; ++i) {
        const double z = 1.0 - (2.0 * i + 1.0) / n;
        g.push_back({std::acos(z), std::fmod(i * golden, 2.0 * std::numbers::pi), 1.0 / n});
    }
    return g;
}

/// Midpoints in cos(theta) times uniform phi: an equal-area product rule for the
/// sin(theta)-weighted sphere average.
inline std::vector<BlochPoint> product_grid(std::size_t n_z, std::size_t n_phi) {
    std::vector<BlochPoint> g;
    for (std::size_t i = 0; i < n_z; ++i) {
        const double z = 1.0 - (2.0 * i + 1.0) / n_z;
        for (std::size_t j = 0; j < n_phi; ++j) {
            g.push_back({std::acos(z), 2.0 * std::numbers::pi * j / n_phi, 1.0 / (n_z * n_phi)});
        }
    }
    return g;
}

struct FidelityMap {
    std::vector<BlochPoint> points;
    std::vector<double> values;
    double average = 0.0;
};

inline FidelityMap fidelity_map(const QubitTeleporter &tp, const std::vector<BlochPoint> &grid) {
    FidelityMap m{grid, {}, 0.0};
    for (const BlochPoint &p : grid) {
        const double f = tp.fidelity(p.theta, p.phi);
        m.values.push_back(f);
        m.average += p.weight * f;
    }
    return m;
}

inline FidelityMap fidelity_map(double alpha, double alpha_out, const ImperfectionModel &model,
                                const std::vector<BlochPoint> &grid, const TeleportSettings &settings = {}) {
    return fidelity_map(QubitTeleporter(alpha, alpha_out, model, settings), grid);
}

}  // namespace teleamp
