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
#include <random>

#include "gtest/gtest.h"
#include "teleamp/detection.hpp"
#include "teleamp/linear_optics.hpp"
#include "teleamp/qkd.hpp"

namespace teleamp {
namespace {

constexpr std::size_t kR = 0;
constexpr std::size_t kS = 1;

/// <psi| V^dag (pattern on R, S) V |psi> in the number basis, V = BS{1/2, (S, R)}.
double receiver_probability(const FockState &psi, Outcome r, Outcome s, const DetectorModel &d) {
    const FockState out = apply_beamsplitter(psi, {0.5, kS, kR});
    return pattern_probability(out, ClickPattern({{"R", kR, r, d}, {"S", kS, s, d}}));
}

/// Pi_0 = on_R off_S + 1/2 on on, Pi_2 = off off.
double pi0(const FockState &psi, const DetectorModel &d) {
    return receiver_probability(psi, Outcome::On, Outcome::Off, d) +
           0.5 * receiver_probability(psi, Outcome::On, Outcome::On, d);
}

TEST(Channel, Transmittance) {
    EXPECT_DOUBLE_EQ(channel_transmittance(0.2, 0.0), 1.0);
    EXPECT_NEAR(channel_transmittance(0.2, 50.0), 0.1, 1e-15);
    EXPECT_NEAR(channel_transmittance(0.2, 100.0), 0.01, 1e-16);
    EXPECT_THROW(channel_transmittance(0.2, -1.0), DomainError);
}

TEST(Bb84, ProbabilitiesPartitionUnity) {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int i = 0; i < 500; ++i) {
        const auto p = bb84_probabilities(5.0 * u(rng), 0.1 * u(rng), 0.01 + 0.99 * u(rng));
        EXPECT_NEAR(p.correct + p.error + p.inconclusive, 1.0, 1e-12);
    }
}

TEST(Bb84, TrivialLimits) {
    EXPECT_EQ(bb84_probabilities(0.3, 0.0, 0.2).error, 0.0);
    const auto p = bb84_probabilities(0.0, 0.0, 0.2);
    EXPECT_EQ(p.inconclusive, 1.0);
}

TEST(Bb84, FockPovmOracleXBasis) {
    const double a2 = 0.1;
    const DetectorModel d{1e-6, 0.2};
    const std::size_t N = 14;
    const double a = std::sqrt(a2);
    const auto closed = bb84_probabilities(a2, d.dark_count, d.efficiency);
    const FockState bit0 = coherent(a, N).tensor(coherent(a, N));
    const FockState bit1 = coherent(a, N).tensor(coherent(-a, N));
    EXPECT_NEAR(pi0(bit0, d), closed.correct, 1e-10);
    EXPECT_NEAR(pi0(bit1, d), closed.error, 1e-10);
    EXPECT_NEAR(receiver_probability(bit0, Outcome::Off, Outcome::Off, d), closed.inconclusive, 1e-10);
}

TEST(Bb84, FockPovmOracleYBasis) {
    const double a2 = 0.1;
    const DetectorModel d{1e-6, 0.2};
    const std::size_t N = 14;
    const double a = std::sqrt(a2);
    const auto closed = bb84_probabilities(a2, d.dark_count, d.efficiency);
    // e^{-i pi n/2} on the signal maps |+-i a> onto |+-a>.
    const FockState plus = apply_phase(coherent(a, N).tensor(coherent(Complex(0, a), N)), kS, -std::numbers::pi / 2);
    const FockState minus = apply_phase(coherent(a, N).tensor(coherent(Complex(0, -a), N)), kS, -std::numbers::pi / 2);
    EXPECT_NEAR(pi0(plus, d), closed.correct, 1e-10);
    EXPECT_NEAR(pi0(minus, d), closed.error, 1e-10);
}

TEST(PhaseError, ReducesWithoutBitErrors) {
    const double d = 0.1;
    EXPECT_NEAR(phase_error_rate(0.0, d), 4.0 * d * (1.0 - d), 1e-15);
    EXPECT_NEAR(phase_error_rate(0.05, 0.0), 0.05, 1e-15);
    EXPECT_TRUE(std::isnan(phase_error_rate(0.05, 1.5)));
}

TEST(CoinImbalance, SmallAmplitudeExpansion) {
    // 1 - e^{-a}(cos a + sin a) = a^2 - 2a^3/3 + a^4/6 + O(a^5).
    const double a = 1e-3;
    EXPECT_NEAR(coin_imbalance(a), 0.5 * (a * a - 2.0 * a * a * a / 3.0 + a * a * a * a / 6.0), 1e-18);
    // Both branches of the implementation agree where they meet.
    EXPECT_NEAR(coin_imbalance(0.1 - 1e-12), coin_imbalance(0.1), 1e-12);
}

TEST(KeyRate, UnassistedAtZeroDistance) {
    QkdParams p;
    p.nu = 0.0;
    const auto r = key_rate(p, false);
    EXPECT_EQ(r.delta, 0.0);
    EXPECT_NEAR(r.delta_ph_raw, 4.0 * r.Delta_prime * (1.0 - r.Delta_prime), 1e-15);
    EXPECT_EQ(r.P_suc, 1.0);
    EXPECT_GT(r.G, 0.0);
}

TEST(KeyRate, RelayGainAtFullRelayPosition) {
    QkdParams p;
    p.x = 1.0 - 1e-12;
    p.L = 50.0;
    EXPECT_NEAR(relay_gain(p), 2.0, 1e-9);
}

TEST(KeyRate, AssistedTransmittanceIdentity) {
    for (double x : {0.2, 0.4, 0.6}) {
        for (double L : {0.0, 30.0, 120.0}) {
            QkdParams p;
            p.x = x;
            p.L = L;
            const auto r = key_rate(p, true);
            const double expected = (1.0 - p.R_B) / p.R_B * std::pow(10.0, -p.xi * (2.0 * x - 1.0) * L / 10.0);
            EXPECT_NEAR(r.transmittance / expected, 1.0, 1e-12);
        }
    }
}

TEST(KeyRate, CatPhotonNumber) {
    QkdParams p;
    p.alpha_in_sq = 0.2;
    p.x = 0.5;
    p.L = 80.0;
    EXPECT_NEAR(required_cat_photons(p), 0.2 / 0.2, 1e-12);
    p.x = 0.2;
    p.L = 0.0;
    EXPECT_NEAR(required_cat_photons(p), 1.0, 1e-12);
}

TEST(KeyRate, CatPhotonsPassOneHundredAtLongRange) {
    const QkdPreset &pr = qkd_preset("relay-x0.2-a0.05");
    QkdParams p;
    p.alpha_in_sq = pr.alpha_in_sq;
    p.x = pr.x;
    p.L = 200.0;
    EXPECT_GT(required_cat_photons(p), 50.0);
    p.L = 250.0;
    EXPECT_GT(required_cat_photons(p), 100.0);
}

TEST(DistanceScan, ShapesAndOrdering) {
    std::vector<double> L;
    for (double d = 0.0; d <= 300.0; d += 5.0) {
        L.push_back(d);
    }
    QkdParams direct;
    direct.alpha_in_sq = 0.008;
    const auto sd = distance_scan(direct, L);
    for (std::size_t i = 1; i < sd.size(); ++i) {
        EXPECT_GE(sd[i].delta, sd[i - 1].delta);
    }
    for (double x : {0.2, 0.4}) {
        QkdParams relay;
        relay.alpha_in_sq = 0.2;
        relay.x = x;
        const auto sr = distance_scan(relay, L);
        // Decreasing until the dark-count floor (1 - e^{-nu})/2, flat once Q rounds to one.
        const double floor = -0.5 * std::expm1(-relay.nu);
        for (std::size_t i = 1; i < sr.size(); ++i) {
            if (sr[i - 1].delta > floor * (1.0 + 1e-9)) {
                EXPECT_LT(sr[i].delta, sr[i - 1].delta) << "x " << x << " L " << L[i];
            } else {
                EXPECT_LE(sr[i].delta, sr[i - 1].delta) << "x " << x << " L " << L[i];
            }
        }
        EXPECT_GE(sr.back().delta, floor * (1.0 - 1e-12));
        EXPECT_GT(sr.back().transmittance, 1.0);
    }
    QkdParams relay;
    relay.alpha_in_sq = 0.05;
    relay.x = 0.2;
    EXPECT_GT(max_secure_distance(distance_scan(relay, L)), max_secure_distance(sd));
    EXPECT_THROW(distance_scan(direct, {10.0, 5.0}), DomainError);
}

TEST(Presets, Lookup) {
    EXPECT_EQ(qkd_presets().size(), 7u);
    EXPECT_FALSE(qkd_preset("direct-0.008").x.has_value());
    EXPECT_THROW(qkd_preset("nope"), ConfigError);
}

}  // namespace
}  // namespace teleamp
