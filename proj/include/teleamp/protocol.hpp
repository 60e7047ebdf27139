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

// Binary and 4-PSK tele-amplification.
//
// Binary mode order: A (Alice's input), B (Bob's output), C (Alice's second port),
// E (loss environment of the Bob-to-Alice channel). The circuit is
//   |psi>_A |Phi_-(beta)>_B |0>_C  ->  BS{R_B, (C,B)}  ->  loss R_E on C  ->  BS{R_A, (C,A)}
// and Bob keeps B after Alice sees one photon at A and none at C.

#pragma once

#include <array>
#include <chrono>
#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "teleamp/coherent_branch.hpp"
#include "teleamp/detection.hpp"
#include "teleamp/errors.hpp"
#include "teleamp/fock.hpp"
#include "teleamp/linear_optics.hpp"
#include "teleamp/special.hpp"

namespace teleamp {

namespace binary_modes {
inline constexpr std::size_t A = 0;
inline constexpr std::size_t B = 1;
inline constexpr std::size_t C = 2;
inline constexpr std::size_t E = 3;
}  // namespace binary_modes

namespace mpsk4_modes {
inline constexpr std::size_t A = 0;
inline constexpr std::size_t B = 1;
inline constexpr std::size_t C = 2;
inline constexpr std::size_t A2 = 3;  // A'
inline constexpr std::size_t C2 = 4;  // C'
inline constexpr std::size_t E = 5;
}  // namespace mpsk4_modes

/// How Alice reads ports A and C in the binary protocol.
enum class BinaryDetection {
    IdealProjectors,  // |1><1|_A (x) |0><0|_C
    OnOff,            // on at A, off at C
    OnOffWithoutC,    // on at A, no detector at C
};

struct ProtocolConfig {
    Complex alpha = 0.35;
    double R_A = 0.5;
    double R_B = 0.1;
    double R_E = 0.0;
    int M = 2;
    DetectorModel detector_A{};
    DetectorModel detector_C{};
    BinaryDetection detection = BinaryDetection::IdealProjectors;
    std::optional<double> resource_beta;  // amplitude actually prepared, if not the matched one
    std::optional<double> target_gain;    // gain the run is scored against, if not the matched one
    std::size_t branch_limit = CoherentBranchState::kDefaultBranchLimit;

    void validate() const {
        if (!std::isfinite(alpha.real()) || !std::isfinite(alpha.imag())) {
            throw DomainError("alpha must be finite");
        }
        for (double R : {R_A, R_B}) {
            if (!(R >= 0.0 && R <= 1.0)) {
                throw BadLoss("beam-splitter reflectivity outside [0, 1]");
            }
            if (R == 0.0 || R == 1.0) {
                throw DegenerateSplit("R_A and R_B must lie strictly inside (0, 1)");
            }
        }
        check_loss(R_E);
        if (R_E == 1.0) {
            throw DegenerateSplit("R_E = 1 leaves no channel");
        }
        if (M != 2 && M != 4) {
            throw DomainError("only M = 2 and M = 4 are supported");
        }
        detector_A.validate();
        detector_C.validate();
    }
};

/// beta = |alpha| sqrt((1-R_A) / (R_A R_B (1-R_E))).
inline double resource_amplitude(const ProtocolConfig &cfg) {
    cfg.validate();
    return std::abs(cfg.alpha) * std::sqrt((1.0 - cfg.R_A) / (cfg.R_A * cfg.R_B * (1.0 - cfg.R_E)));
}

/// g = sqrt((1-R_A)(1-R_B) / (R_A R_B (1-R_E))).
inline double gain(const ProtocolConfig &cfg) {
    cfg.validate();
    return std::sqrt((1.0 - cfg.R_A) * (1.0 - cfg.R_B) / (cfg.R_A * cfg.R_B * (1.0 - cfg.R_E)));
}

inline double prepared_beta(const ProtocolConfig &cfg) { return cfg.resource_beta.value_or(resource_amplitude(cfg)); }
inline double scored_gain(const ProtocolConfig &cfg) { return cfg.target_gain.value_or(gain(cfg)); }

inline double solve_ra_for_gain(double g, double R_B, double R_E) {
    if (!(g > 0.0) || !std::isfinite(g) || !(R_B > 0.0 && R_B < 1.0) || !(R_E >= 0.0 && R_E < 1.0)) {
        throw NoFeasibleRA("no R_A in (0, 1) for these parameters");
    }
    const double R_A = (1.0 - R_B) / (g * g * R_B * (1.0 - R_E) + (1.0 - R_B));
    if (!(R_A > 0.0 && R_A < 1.0)) {
        throw NoFeasibleRA("no R_A in (0, 1) for these parameters");
    }
    return R_A;
}

inline double solve_rb_for_gain(double g, double R_A, double R_E) {
    if (!(g > 0.0) || !std::isfinite(g) || !(R_A > 0.0 && R_A < 1.0) || !(R_E >= 0.0 && R_E < 1.0)) {
        throw NoFeasibleRA("no R_B in (0, 1) for these parameters");
    }
    const double k = (1.0 - R_A) / (R_A * (1.0 - R_E));
    return k / (g * g + k);
}

inline Complex unit_phase(Complex z) { return std::abs(z) > 0.0 ? z / std::abs(z) : Complex{1.0}; }

/// c_+|alpha> + c_-|-alpha>, required to be normalized.
inline CoherentBranchState binary_input(Complex alpha, Complex c_plus, Complex c_minus) {
    CoherentBranchState in(1, {{c_plus, {alpha}}, {c_minus, {-alpha}}});
    if (std::abs(in.squared_norm() - 1.0) > kNormTolerance) {
        throw DomainError("input coefficients are not normalized in the coherent basis");
    }
    return in;
}

/// Four-branch state on (A, B, C, E) just before Alice's detectors.
inline CoherentBranchState binary_state(const ProtocolConfig &cfg, Complex c_plus, Complex c_minus) {
    cfg.validate();
    const Complex beta = prepared_beta(cfg) * unit_phase(cfg.alpha);
    CoherentBranchState in = binary_input(cfg.alpha, c_plus, c_minus);
    CoherentBranchState psi = in.tensor(cat_branches(beta, Parity::Odd)).tensor(CoherentBranchState::product({0.0}));
    psi = CoherentBranchState(psi.mode_count(), psi.branches(), cfg.branch_limit);
    psi = apply_beamsplitter(psi, {cfg.R_B, binary_modes::C, binary_modes::B});
    psi = loss_channel(psi, binary_modes::C, cfg.R_E);
    return apply_beamsplitter(psi, {cfg.R_A, binary_modes::C, binary_modes::A});
}

inline ClickPattern binary_pattern(const ProtocolConfig &cfg) {
    using binary_modes::A;
    using binary_modes::C;
    switch (cfg.detection) {
        case BinaryDetection::IdealProjectors:
            return ClickPattern({{"A", A, Outcome::SinglePhoton, {}}, {"C", C, Outcome::Vacuum, {}}});
        case BinaryDetection::OnOff:
            return ClickPattern({{"A", A, Outcome::On, cfg.detector_A}, {"C", C, Outcome::Off, cfg.detector_C}});
        case BinaryDetection::OnOffWithoutC:
            return ClickPattern({{"A", A, Outcome::On, cfg.detector_A}});
    }
    throw ConfigError("unknown detection mode");
}

struct TeleampResult {
    BranchMixture output;        // Bob's mode after the correction phase
    BranchMixture joint;         // Bob's mode with the environment, before tracing it out
    CoherentBranchState target;  // the state the run is scored against
    double probability = 0.0;
    double gain = 0.0;
    double fidelity = 0.0;
    double correction_phase = 0.0;  // applied to B for binary runs, suggested for 4-PSK runs
};

/// Exact binary run in the coherent-branch engine; Bob's output gets the pi phase
/// so that the target is c_+|g alpha> + c_-|-g alpha>.
inline TeleampResult run_binary(const ProtocolConfig &cfg, Complex c_plus, Complex c_minus) {
    const CoherentBranchState psi = binary_state(cfg, c_plus, c_minus);
    const ClickPattern pattern = binary_pattern(cfg);
    BranchMixture joint;
    double prob = 0.0;
    if (pattern.is_projective()) {
        auto cond = project(psi, pattern);
        joint = BranchMixture::pure(cond.state);
        prob = cond.probability;
    } else {
        auto cond = condition(psi, pattern);
        joint = cond.state;
        prob = cond.probability;
    }
    // Everything but B is an environment for Bob now (E, and C if it was not read).
    BranchMixture bob = partial_trace(joint, {0});
    bob = apply_phase(bob, 0, std::numbers::pi);
    const double g = scored_gain(cfg);
    const CoherentBranchState target =
        CoherentBranchState(1, {{c_plus, {g * cfg.alpha}}, {c_minus, {-g * cfg.alpha}}}).normalized();
    return {bob, joint, target, prob, gain(cfg), bob.fidelity(target), std::numbers::pi};
}

struct FockTeleampResult {
    FockEnsemble output;
    FockState target;
    std::vector<std::size_t> cutoffs;  // per mode A, B, C
    double probability = 0.0;
    double gain = 0.0;
    double fidelity = 0.0;
};

/// Per-mode cutoffs covering every amplitude a binary run reaches.
inline std::vector<std::size_t> binary_cutoffs(const ProtocolConfig &cfg, Complex c_plus, Complex c_minus) {
    const Complex beta = prepared_beta(cfg) * unit_phase(cfg.alpha);
    CoherentBranchState psi = binary_input(cfg.alpha, c_plus, c_minus)
                                  .tensor(cat_branches(beta, Parity::Odd))
                                  .tensor(CoherentBranchState::product({0.0}));
    std::vector<double> peak(3, 0.0);
    auto track = [&](const CoherentBranchState &s) {
        for (std::size_t m = 0; m < 3; ++m) {
            peak[m] = std::max(peak[m], max_amplitude(s, m));
        }
    };
    track(psi);
    psi = apply_beamsplitter(psi, {cfg.R_B, binary_modes::C, binary_modes::B});
    track(psi);
    psi = loss_channel(psi, binary_modes::C, cfg.R_E);
    psi = apply_beamsplitter(psi, {cfg.R_A, binary_modes::C, binary_modes::A});
    track(psi);
    std::vector<std::size_t> cut;
    for (double p : peak) {
        cut.push_back(default_cutoff(p));
    }
    return cut;
}

/// The same binary run in the number basis (Kraus loss, unraveled detection).
inline FockTeleampResult run_binary_fock(const ProtocolConfig &cfg, Complex c_plus, Complex c_minus,
                                         std::optional<std::vector<std::size_t>> cutoffs = std::nullopt) {
    cfg.validate();
    const std::vector<std::size_t> cut = cutoffs.value_or(binary_cutoffs(cfg, c_plus, c_minus));
    const Complex beta = prepared_beta(cfg) * unit_phase(cfg.alpha);
    const FockState in = to_fock(binary_input(cfg.alpha, c_plus, c_minus), {cut[0]});
    const FockState cat = cat_state(beta, Parity::Odd, cut[1]);
    FockState psi = in.tensor(cat).tensor(FockState::vacuum({cut[2]}));
    psi = apply_beamsplitter(psi, {cfg.R_B, binary_modes::C, binary_modes::B});
    FockEnsemble rho = cfg.R_E > 0.0 ? loss_channel(psi, binary_modes::C, cfg.R_E) : FockEnsemble::pure(psi);
    rho = apply_beamsplitter(rho, {cfg.R_A, binary_modes::C, binary_modes::A});
    auto cond = condition(rho, binary_pattern(cfg));
    FockEnsemble bob = cond.state.mode_count() == 1 ? cond.state : partial_trace(cond.state, {0});
    bob = apply_phase(bob, 0, std::numbers::pi);
    const double g = scored_gain(cfg);
    const FockState target =
        to_fock(CoherentBranchState(1, {{c_plus, {g * cfg.alpha}}, {c_minus, {-g * cfg.alpha}}}), {cut[1]})
            .normalized();
    return {bob, target, cut, cond.probability, gain(cfg), fidelity(bob, target)};
}

/// P(on at A, off at C) averaged over |+alpha> and |-alpha> with ideal on/off detectors.
inline double success_prob_binary_closed(const ProtocolConfig &cfg) {
    const double beta = resource_amplitude(cfg);
    const double a2 = std::norm(cfg.alpha);
    // [e^{-(1-2R_A)^2 a2/R_A} - e^{-a2/R_A}] / (2 (1 - e^{-2 beta^2}))
    const double num = std::exp(-a2 / cfg.R_A) * std::expm1(4.0 * a2 * (1.0 - cfg.R_A));
    return num / (-2.0 * std::expm1(-2.0 * beta * beta));
}

/// Same quantity by direct POVM evaluation on the four-branch state.
inline double success_prob_binary_bruteforce(const ProtocolConfig &cfg) {
    ProtocolConfig c = cfg;
    c.detection = BinaryDetection::OnOff;
    c.detector_A = DetectorModel::ideal();
    c.detector_C = DetectorModel::ideal();
    const ClickPattern pattern = binary_pattern(c);
    double p = 0.0;
    for (double sign : {1.0, -1.0}) {
        const CoherentBranchState psi = binary_state(c, sign > 0 ? 1.0 : 0.0, sign > 0 ? 0.0 : 1.0);
        p += 0.5 * pattern_probability(psi, pattern);
    }
    return p;
}

// ---------------------------------------------------------------------------
// 4-PSK.

inline Complex upow(int k) {
    static constexpr std::array<Complex, 4> u{Complex{1.0, 0.0}, Complex{0.0, 1.0}, Complex{-1.0, 0.0},
                                              Complex{0.0, -1.0}};
    return u[((k % 4) + 4) % 4];
}

inline void check_mpsk4(const ProtocolConfig &cfg) {
    cfg.validate();
    if (cfg.R_A != 0.5) {
        throw DomainError("the 4-PSK network is defined for R_A = 0.5");
    }
}

/// Six-mode state (A, B, C, A', C', E) for input |alpha u^m> and resource |omega_3(beta)>.
inline CoherentBranchState mpsk4_state(const ProtocolConfig &cfg, int m) {
    check_mpsk4(cfg);
    const Complex a = cfg.alpha;
    const double g = gain(cfg);
    const double beta = resource_amplitude(cfg);
    const double norm = 1.0 / std::sqrt(4.0 * lambda3(beta * beta));
    const double env = std::sqrt(cfg.R_E / (1.0 - cfg.R_E));
    const double s8 = 2.0 * std::numbers::sqrt2;
    std::vector<CoherentBranch> branches;
    for (int k = 0; k < 4; ++k) {
        const Complex um = upow(m);
        const Complex um1 = upow(m + 1);
        const Complex uk = upow(k);
        const Complex uk1 = upow(k + 1);
        std::vector<Complex> amps(6);
        amps[mpsk4_modes::A] = a * (um - uk) / 2.0;
        amps[mpsk4_modes::B] = g * a * uk;
        amps[mpsk4_modes::C] = -a * (um + uk) / 2.0;
        amps[mpsk4_modes::A2] = a * (um - um1 + uk + uk1) / s8;
        amps[mpsk4_modes::C2] = a * (um + um1 + uk - uk1) / s8;
        amps[mpsk4_modes::E] = env * a * uk;
        branches.push_back({norm * uk, std::move(amps)});
    }
    return CoherentBranchState(6, std::move(branches), cfg.branch_limit);
}

/// On/off pattern over ports (A, A', C, C') from a string such as "0111".
inline ClickPattern mpsk4_pattern(const std::string &bits, const DetectorModel &d = {}) {
    return ClickPattern::on_off(
        {{"A", mpsk4_modes::A}, {"A'", mpsk4_modes::A2}, {"C", mpsk4_modes::C}, {"C'", mpsk4_modes::C2}}, bits, d);
}

inline std::string pattern_bits(unsigned code) {
    std::string s(4, '0');
    for (int i = 0; i < 4; ++i) {
        if (code & (8u >> i)) {
            s[i] = '1';
        }
    }
    return s;
}

/// Probabilities of all 16 on/off patterns, indexed by the bit string read as binary.
inline std::array<double, 16> mpsk4_pattern_probabilities(const ProtocolConfig &cfg, int m) {
    const BranchMixture rho = BranchMixture::pure(mpsk4_state(cfg, m));
    std::array<double, 16> p{};
    for (unsigned code = 0; code < 16; ++code) {
        p[code] = pattern_probability(rho, mpsk4_pattern(pattern_bits(code)));
    }
    return p;
}

/// Exactly one port dark selects one resource branch; returns its rotation index.
inline std::optional<int> mpsk4_dispatch(const std::string &bits) {
    if (bits == "0111") return 0;
    if (bits == "1011") return 1;
    if (bits == "1101") return 2;
    if (bits == "1110") return 3;
    return std::nullopt;
}

/// Conditional 4-PSK run; the target for pattern index p is |u^p g alpha u^m>.
inline TeleampResult run_mpsk4(const ProtocolConfig &cfg, int m, const std::string &bits) {
    const ClickPattern pattern = mpsk4_pattern(bits);
    const CoherentBranchState psi = mpsk4_state(cfg, m);
    const BranchMixture rho = BranchMixture::pure(psi);
    const double p = pattern_probability(rho, pattern);
    detail::check_probability(p);
    const std::optional<int> rot = mpsk4_dispatch(bits);
    if (!rot) {
        throw UnsupportedPattern("pattern " + bits + " does not herald a target state");
    }
    auto cond = condition(rho, pattern);
    BranchMixture bob = partial_trace(cond.state, {0});
    const double g = gain(cfg);
    const CoherentBranchState target = CoherentBranchState::product({g * cfg.alpha * upow(m + *rot)});
    return {bob, cond.state, target, cond.probability, g, bob.fidelity(target), -std::numbers::pi / 2.0 * *rot};
}

/// (1 - e^{-a/2})^2 (1 - e^{-a}) / (4 lambda_3(a / (R_B (1-R_E)))), a = |alpha|^2.
inline double success_prob_4psk_closed(const ProtocolConfig &cfg) {
    check_mpsk4(cfg);
    const double a = std::norm(cfg.alpha);
    const double h = -std::expm1(-0.5 * a);
    return h * h * (-std::expm1(-a)) / (4.0 * lambda3(a / (cfg.R_B * (1.0 - cfg.R_E))));
}

/// P(0111) averaged over the four inputs by direct POVM evaluation.
inline double success_prob_4psk_bruteforce(const ProtocolConfig &cfg) {
    double p = 0.0;
    for (int m = 0; m < 4; ++m) {
        p += 0.25 * pattern_probability(mpsk4_state(cfg, m), mpsk4_pattern("0111"));
    }
    return p;
}

// ---------------------------------------------------------------------------
// The twelve experimental settings.

struct Table1Row {
    int id;
    double alpha;
    double g_tg;
    double beta_printed;
    double ra_printed;
    double re_channel;     // loss actually present
    double re_design;      // loss the settings were chosen for
    double fidelity_measured;
};

inline const std::array<Table1Row, 12> &table1() {
    static const std::array<Table1Row, 12> rows{{
        {1, 0.35, 3.0, 1.11, 0.50, 0.0, 0.0, 0.901},
        {2, 0.35, 2.2, 0.81, 0.65, 0.0, 0.0, 0.945},
        {3, 0.50, 2.2, 1.16, 0.65, 0.0, 0.0, 0.936},
        {4, 0.50, 1.5, 0.79, 0.80, 0.0, 0.0, 0.921},
        {5, 0.71, 1.5, 1.12, 0.80, 0.0, 0.0, 0.885},
        {6, 0.71, 1.0, 0.75, 0.90, 0.0, 0.0, 0.950},
        {7, 1.00, 1.0, 1.05, 0.90, 0.0, 0.0, 0.926},
        {8, 1.00, 0.76, 0.80, 0.94, 0.0, 0.0, 0.940},
        {9, 1.41, 0.76, 1.13, 0.94, 0.0, 0.0, 0.889},
        {10, 1.41, 0.50, 0.74, 0.97, 0.0, 0.0, 0.935},
        {11, 0.35, 3.0, 1.11, 0.50, 0.8, 0.0, 0.839},
        {12, 0.35, 3.0, 1.11, 0.83, 0.8, 0.8, 0.872},
    }};
    return rows;
}

/// Configuration as run: R_A and beta from the design loss, the channel loss applied.
inline ProtocolConfig table1_config(const Table1Row &row, BinaryDetection detection = BinaryDetection::IdealProjectors) {
    ProtocolConfig design;
    design.alpha = row.alpha;
    design.R_B = 0.1;
    design.R_E = row.re_design;
    design.R_A = solve_ra_for_gain(row.g_tg, design.R_B, design.R_E);
    ProtocolConfig cfg = design;
    cfg.R_E = row.re_channel;
    cfg.detection = detection;
    cfg.resource_beta = resource_amplitude(design);
    cfg.target_gain = row.g_tg;
    return cfg;
}

}  // namespace teleamp
