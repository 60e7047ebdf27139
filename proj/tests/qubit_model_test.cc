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
#include <numbers>

#include "gtest/gtest.h"
#include "teleamp/qubit_model.hpp"

namespace teleamp {
namespace {

TeleportSettings ideal_settings() {
    TeleportSettings s;
    s.resource = ResourceKind::IdealCat;
    s.herald = HeraldKind::IdealProjectors;
    return s;
}

TEST(CatQubit, CoefficientsReproduceTheLogicalState) {
    const CatQubit q{0.7, 1.1, 0.4};
    const std::size_t N = 25;
    const FockState direct = q.to_fock(N);
    const FockState plus = cat_state(0.7, Parity::Even, N);
    const FockState minus = cat_state(0.7, Parity::Odd, N);
    std::vector<Complex> amps(N);
    for (std::size_t n = 0; n < N; ++n) {
        amps[n] = std::cos(0.55) * plus.amplitudes()[n] + std::polar(1.0, 0.4) * std::sin(0.55) * minus.amplitudes()[n];
    }
    EXPECT_NEAR(fidelity(direct, FockState({N}, amps)), 1.0, 1e-12);
}

TEST(Pssv, IdealLimitIsAnOddCat) {
    const PssvResource res = build_pssv_resource(0.3, ImperfectionModel::ideal());
    const CatFit fit = best_fit_odd_cat(res.state);
    // S(r)|1> against its best odd cat: about 0.997 at r = 0.3.
    EXPECT_GT(fit.fidelity, 0.995);
    const FockState cat = cat_state(fit.beta, Parity::Odd, res.state.cutoffs()[0]);
    EXPECT_NEAR(fidelity(res.state, cat), fit.fidelity, 1e-9);
}

TEST(Pssv, BestFitAmplitudeGrowsAndFidelityFalls) {
    double last_beta = 0.0, last_f = 1.0;
    for (double eps : {0.10, 0.15, 0.20, 0.25, 0.31}) {
        const CatFit fit = best_fit_odd_cat(build_pssv_resource(squeezing_from_pump(eps), {}).state);
        EXPECT_GT(fit.beta, last_beta);
        EXPECT_LT(fit.fidelity, last_f);
        last_beta = fit.beta;
        last_f = fit.fidelity;
    }
}

TEST(Pssv, PumpRangeAnchors) {
    const double b_lo = best_fit_odd_cat(build_pssv_resource(squeezing_from_pump(0.15), {}).state).beta;
    const double b_hi = best_fit_odd_cat(build_pssv_resource(squeezing_from_pump(0.31), {}).state).beta;
    EXPECT_NEAR(b_lo, 0.78, 0.1);
    EXPECT_NEAR(b_hi, 1.15, 0.1);
}

TEST(Pssv, FrozenPumpScaleMatchesRefit) {
    EXPECT_NEAR(calibrate_pump_scale(), kPumpScale, 1e-3);
}

TEST(Pssv, SqueezingSolverHitsTarget) {
    const double r = squeezing_for_cat_amplitude(0.9, {});
    EXPECT_NEAR(best_fit_odd_cat(build_pssv_resource(r, {}).state).beta, 0.9, 1e-5);
    EXPECT_THROW(squeezing_for_cat_amplitude(5.0, {}), DomainError);
}

TEST(Pssv, RejectsBadModel) {
    ImperfectionModel m;
    m.apd_efficiency = 0.0;
    EXPECT_THROW(build_pssv_resource(0.3, m), DomainError);
    m = {};
    m.tap_ratio = 1.0;
    EXPECT_THROW(build_pssv_resource(0.3, m), DomainError);
}

TEST(Teleporter, IdealUnitGainIsPerfectEverywhere) {
    for (double a : {0.4, 0.8}) {
        const QubitTeleporter tp(a, a, ImperfectionModel::ideal(), ideal_settings());
        const FidelityMap m = fidelity_map(tp, fibonacci_grid(12));
        for (double f : m.values) {
            EXPECT_NEAR(f, 1.0, 1e-6);
        }
    }
}

TEST(Teleporter, IdealOutputIsTheAmplifiedCoherentSuperposition) {
    // Ideal heralding maps c_+|a> + c_-|-a> to c_+|ga> + c_-|-ga> with the input coefficients.
    const double a = 0.4, ap = 0.6;
    const QubitTeleporter tp(a, ap, ImperfectionModel::ideal(), ideal_settings());
    const CatQubit q{a, 1.3, 0.7};
    const CoherentBranchState target(1, {{q.c_plus(), {ap}}, {q.c_minus(), {-ap}}});
    const FockState t = to_fock(target.normalized(), {tp.cutoff()});
    Eigen::Map<const Eigen::VectorXcd> v(t.amplitudes().data(), tp.cutoff());
    EXPECT_NEAR((v.adjoint() * tp.output(q.theta, q.phi) * v)(0, 0).real(), 1.0, 1e-9);
}

TEST(Teleporter, FullModelAnchor) {
    const QubitTeleporter tp(0.4, 0.6);
    EXPECT_LE(tp.cutoff(), 20u);
    const FidelityMap m = fidelity_map(tp, fibonacci_grid(168));
    EXPECT_NEAR(m.average, 0.77, 0.03);
    for (double f : m.values) {
        EXPECT_GE(f, 0.0);
        EXPECT_LE(f, 1.0);
    }
    EXPECT_GT(tp.fidelity(0.0, 0.0), tp.fidelity(std::numbers::pi, 0.0));
}

TEST(Teleporter, CoherentInputsDoBest) {
    // c_- = 0 at tan(theta/2) = N_+/N_-, phi = 0: the input is |alpha>.
    const QubitTeleporter tp(0.4, 0.6);
    const CatQubit probe{0.4, 0.0, 0.0};
    const double theta = 2.0 * std::atan(probe.n_plus() / probe.n_minus());
    EXPECT_NEAR(std::abs(CatQubit{0.4, theta, 0.0}.c_minus()), 0.0, 1e-15);
    const double coherent_pole = tp.fidelity(theta, 0.0);
    const FidelityMap m = fidelity_map(tp, fibonacci_grid(168));
    EXPECT_GT(coherent_pole, 0.9);
    EXPECT_GT(coherent_pole, m.average);
}

TEST(Teleporter, QuadratureConverges) {
    const QubitTeleporter tp(0.4, 0.6);
    const double a168 = fidelity_map(tp, fibonacci_grid(168)).average;
    const double a336 = fidelity_map(tp, fibonacci_grid(336)).average;
    const double integral = fidelity_map(tp, product_grid(48, 48)).average;
    EXPECT_LT(std::abs(a168 - a336), 0.005);
    EXPECT_LT(std::abs(a168 - integral), 0.005);
}

TEST(Teleporter, MonotoneInApdEfficiency) {
    double last = 1.0;
    for (double eta : {0.6, 0.3, 0.1}) {
        ImperfectionModel m;
        m.apd_efficiency = eta;
        const double avg = fidelity_map(0.4, 0.6, m, fibonacci_grid(168)).average;
        EXPECT_LE(avg, last + 1e-12);
        last = avg;
    }
}

TEST(Teleporter, SuccessProbabilityIsAProbability) {
    const QubitTeleporter tp(0.5, 0.6);
    for (const BlochPoint &p : fibonacci_grid(20)) {
        const double s = tp.success_probability(p.theta, p.phi);
        EXPECT_GT(s, 0.0);
        EXPECT_LT(s, 1.0);
    }
}

TEST(Teleporter, PortCDetectorAndLossRun) {
    TeleportSettings s;
    s.detect_port_c = true;
    s.R_E = 0.2;
    const QubitTeleporter tp(0.4, 0.6, {}, s);
    const double f = fidelity_map(tp, fibonacci_grid(24)).average;
    EXPECT_GT(f, 0.5);
    EXPECT_LT(f, 1.0);
}

TEST(Teleporter, ResultBundle) {
    const auto r = teleport_qubit({0.4, 0.9, 0.2}, 0.6);
    const QubitTeleporter tp(0.4, 0.6);
    EXPECT_NEAR(r.fidelity, tp.fidelity(0.9, 0.2), 1e-12);
    EXPECT_NEAR(fidelity(r.output, CatQubit{0.6, 0.9, 0.2}.to_fock(tp.cutoff())), r.fidelity, 1e-9);
}

TEST(BlochGrids, WeightsAndCoverage) {
    for (const auto &g : {fibonacci_grid(168), product_grid(8, 12)}) {
        double w = 0.0, z = 0.0;
        for (const BlochPoint &p : g) {
            w += p.weight;
            z += p.weight * std::cos(p.theta);
        }
        EXPECT_NEAR(w, 1.0, 1e-12);
        EXPECT_NEAR(z, 0.0, 1e-12);
    }
}

TEST(ClassicalBound, SomeGainBeatsTwoThirds) {
    for (double a : {0.3, 0.8}) {
        double best = 0.0;
        for (double ap : {0.45, 0.6, 0.75, 0.9}) {
            best = std::max(best, fidelity_map(a, ap, {}, fibonacci_grid(168)).average);
        }
        EXPECT_GT(best, 2.0 / 3.0) << "alpha " << a;
    }
}

}  // namespace
}  // namespace teleamp
