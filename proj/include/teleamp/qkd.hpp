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

// 4PSK-BB84 with a reference pulse, with and without a tele-amplifying relay.

#pragma once

#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "teleamp/errors.hpp"
#include "teleamp/protocol.hpp"
#include "teleamp/special.hpp"

namespace teleamp {

/// eta = 10^{-xi L / 10}, xi in dB/km and L in km.
inline double channel_transmittance(double xi, double L) {
    if (!(xi >= 0.0) || !(L >= 0.0) || !std::isfinite(xi) || !std::isfinite(L)) {
        throw DomainError("loss rate and distance must be finite and non-negative");
    }
    return std::pow(10.0, -xi * L / 10.0);
}

struct Bb84Probabilities {
    double correct = 0.0;       // P_c
    double error = 0.0;         // P_e
    double inconclusive = 0.0;  // P_i
};

/// Outcome probabilities of Bob's X (or Y) POVM for a signal and reference
/// pulse each of mean photon number a at Bob.
inline Bb84Probabilities bb84_probabilities(double a, double nu, double eta_B) {
    if (!(a >= 0.0) || !(nu >= 0.0) || !(eta_B > 0.0 && eta_B <= 1.0)) {
        throw DomainError("bb84 probabilities need a >= 0, nu >= 0, eta_B in (0, 1]");
    }
    const double click = -std::expm1(-nu - 2.0 * eta_B * a);
    const double dark = -std::expm1(-nu);
    return {0.5 * click * (2.0 - dark), 0.5 * (2.0 - click) * dark, std::exp(-2.0 * nu - 2.0 * eta_B * a)};
}

/// Basis-coin imbalance 1/2 [1 - e^{-a}(cos a + sin a)] with a = |alpha_in|^2.
inline double coin_imbalance(double alpha_in_sq) {
    const double a = alpha_in_sq;
    if (a >= 0.1) {
        return 0.5 * (1.0 - std::exp(-a) * (std::cos(a) + std::sin(a)));
    }
    // e^{-a}(cos a + sin a) = Re z + Im z with z = e^{(i-1)a}; sum the series so weak pulses keep their digits.
    const Complex w{-a, a};
    Complex term = w;
    double s = 0.0;
    for (int n = 2; n < 40; ++n) {
        term *= w / static_cast<double>(n);
        s -= term.real() + term.imag();
        if (std::abs(term) < 1e-18 * std::abs(s)) {
            break;
        }
    }
    return 0.5 * s;
}

/// Upper bound on the phase error rate. NaN when Delta' lies outside [0, 1].
inline double phase_error_rate(double delta, double delta_prime) {
    const double d = delta_prime;
    if (!(d >= 0.0 && d <= 1.0)) {
        return std::numeric_limits<double>::quiet_NaN();
    }
    return delta + 4.0 * d * (1.0 - d) * (1.0 - 2.0 * delta) +
           4.0 * (1.0 - 2.0 * d) * std::sqrt(d * (1.0 - d) * delta * (1.0 - delta));
}

struct QkdParams {
    double alpha_in_sq = 0.008;
    double xi = 0.2;  // dB/km
    double L = 0.0;   // km
    std::optional<double> x;  // relay position as a fraction of L; set for the assisted scheme
    double R_B = 0.2;
    double nu = 1e-6;
    double eta_B = 0.2;

    void validate() const {
        if (!(alpha_in_sq >= 0.0) || !std::isfinite(alpha_in_sq)) {
            throw DomainError("|alpha_in|^2 must be finite and non-negative");
        }
        if (!(xi > 0.0) || !std::isfinite(xi) || !(L >= 0.0) || !std::isfinite(L)) {
            throw DomainError("xi must be positive and L non-negative");
        }
        if (x && !(*x > 0.0 && *x < 1.0)) {
            throw DomainError("relay fraction x must lie in (0, 1)");
        }
        if (!(R_B > 0.0 && R_B < 1.0)) {
            throw DomainError("R_B must lie in (0, 1)");
        }
        if (!(nu >= 0.0) || !(eta_B > 0.0 && eta_B <= 1.0)) {
            throw DomainError("need nu >= 0 and eta_B in (0, 1]");
        }
    }
};

struct KeyRateReport {
    double L = 0.0;
    double Q = 0.0;
    double delta = 0.0;
    double delta_ph = 0.0;      // value entering the rate
    double delta_ph_raw = 0.0;  // bound as evaluated; NaN if Delta' > 1
    double Delta_prime = 0.0;
    double G = 0.0;
    double P_suc = 1.0;
    double g_relay = 1.0;
    double beta_cat_mean_photons = 0.0;
    double transmittance = 0.0;  // end-to-end amplitude transmittance squared, Alice to Bob
};

/// g(x, L) = sqrt((1 - R_B) / (R_B eta((1-x) L))).
inline double relay_gain(const QkdParams &p) {
    p.validate();
    if (!p.x) {
        throw DomainError("relay gain needs a relay position x");
    }
    return std::sqrt((1.0 - p.R_B) / (p.R_B * channel_transmittance(p.xi, (1.0 - *p.x) * p.L)));
}

/// eta(xL) |alpha_in|^2 / (eta((1-x)L) R_B).
inline double required_cat_photons(const QkdParams &p) {
    p.validate();
    if (!p.x) {
        throw DomainError("cat photon number needs a relay position x");
    }
    return channel_transmittance(p.xi, *p.x * p.L) * p.alpha_in_sq /
           (channel_transmittance(p.xi, (1.0 - *p.x) * p.L) * p.R_B);
}

/// Relay success probability: four-port 0111 herald with ideal detectors, R_A = 1/2,
/// input amplitude sqrt(eta(xL)) alpha_in and the resource half crossing (1-x)L.
inline double relay_success(const QkdParams &p) {
    ProtocolConfig cfg;
    cfg.M = 4;
    cfg.R_A = 0.5;
    cfg.R_B = p.R_B;
    cfg.R_E = -std::expm1(-p.xi * (1.0 - *p.x) * p.L * std::log(10.0) / 10.0);
    cfg.alpha = std::sqrt(channel_transmittance(p.xi, *p.x * p.L) * p.alpha_in_sq);
    if (cfg.R_E >= 1.0 || std::norm(cfg.alpha) == 0.0) {
        return 0.0;
    }
    return success_prob_4psk_closed(cfg);
}

inline KeyRateReport key_rate(const QkdParams &p, bool assisted) {
    p.validate();
    KeyRateReport r;
    r.L = p.L;
    double a = 0.0;  // mean photon number per pulse at Bob
    if (assisted) {
        if (!p.x) {
            throw DomainError("assisted key rate needs a relay position x");
        }
        r.g_relay = relay_gain(p);
        r.transmittance = r.g_relay * r.g_relay * channel_transmittance(p.xi, *p.x * p.L);
        r.beta_cat_mean_photons = required_cat_photons(p);
        r.P_suc = relay_success(p);
    } else {
        r.transmittance = channel_transmittance(p.xi, p.L);
    }
    a = r.transmittance * p.alpha_in_sq;
    const Bb84Probabilities pr = bb84_probabilities(a, p.nu, p.eta_B);
    r.Q = -std::expm1(-2.0 * p.nu - 2.0 * p.eta_B * a);
    r.delta = r.Q > 0.0 ? pr.error / r.Q : 0.0;
    r.Delta_prime = r.Q > 0.0 ? coin_imbalance(p.alpha_in_sq) / r.Q : std::numeric_limits<double>::infinity();
    r.delta_ph_raw = phase_error_rate(r.delta, r.Delta_prime);
    // A bound at or above 1/2 certifies nothing; treat it as 1/2 so H does not fold back.
    r.delta_ph = (r.Delta_prime >= 0.5 || !(r.delta_ph_raw < 0.5)) ? 0.5 : std::max(0.0, r.delta_ph_raw);
    if (!(r.delta >= 0.0 && r.delta <= 1.0)) {
        throw DomainError("bit error rate outside [0, 1]");
    }
    const double bracket = 1.0 - binary_entropy(r.delta) - binary_entropy(r.delta_ph);
    r.G = std::max(0.0, 0.5 * r.P_suc * r.Q * bracket);
    return r;
}

struct QkdPreset {
    std::string name;
    std::optional<double> x;
    double alpha_in_sq;
};

/// Curves of the distance plots: two unassisted pulse energies and five relay settings.
inline const std::vector<QkdPreset> &qkd_presets() {
    static const std::vector<QkdPreset> presets{
        {"direct-0.008", std::nullopt, 0.008}, {"direct-0.001", std::nullopt, 0.001},
        {"relay-x0.8", 0.8, 0.2},               {"relay-x0.6", 0.6, 0.2},
        {"relay-x0.4-a0.2", 0.4, 0.2},          {"relay-x0.4-a0.3", 0.4, 0.3},
        {"relay-x0.2-a0.05", 0.2, 0.05},
    };
    return presets;
}

inline const QkdPreset &qkd_preset(const std::string &name) {
    for (const QkdPreset &p : qkd_presets()) {
        if (p.name == name) {
            return p;
        }
    }
    throw ConfigError("unknown QKD preset '" + name + "'");
}

/// Key-rate reports at each distance, in order. `base.L` is ignored.
inline std::vector<KeyRateReport> distance_scan(const QkdParams &base, const std::vector<double> &distances) {
    std::vector<KeyRateReport> out;
    out.reserve(distances.size());
    for (std::size_t i = 0; i < distances.size(); ++i) {
        if (i > 0 && !(distances[i] > distances[i - 1])) {
            throw DomainError("distance grid must be strictly increasing");
        }
        QkdParams p = base;
        p.L = distances[i];
        out.push_back(key_rate(p, p.x.has_value()));
    }
    return out;
}

/// Largest grid distance with G > 0, or -1 if none.
inline double max_secure_distance(const std::vector<KeyRateReport> &scan) {
    double L = -1.0;
    for (const KeyRateReport &r : scan) {
        if (r.G > 0.0) {
            L = r.L;
        }
    }
    return L;
}

}  // namespace teleamp
