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

// Acceptance report: one PASS/FAIL line per criterion, with timings.
//
// Usage: acceptance [--expect-red=N,M,...]
// Exits 0 when exactly the listed criteria fail and all others pass.

#include <chrono>
#include <cstdio>
#include <cstring>
#include <functional>
#include <numbers>
#include <random>
#include <set>
#include <sstream>
#include <string>

#include "pipelines.hpp"
#include "teleamp/teleamp.hpp"

namespace {

using namespace teleamp;

struct Verdict {
    bool pass = false;
    std::string detail;
};

std::string fmt(const char *f, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof(buf), f, args...);
    return buf;
}

Verdict c1_table_parameters() {
    double worst_beta = 0.0, worst_g = 0.0;
    for (const Table1Row &row : table1()) {
        const ProtocolConfig cfg = table1_config(row);
        ProtocolConfig design = cfg;
        design.R_E = row.re_design;
        worst_beta = std::max(worst_beta, std::abs(prepared_beta(cfg) - row.beta_printed));
        worst_g = std::max(worst_g, std::abs(gain(design) - row.g_tg));
    }
    return {worst_beta <= 0.01 && worst_g <= 0.01,
            fmt("max |beta - printed| = %.4f, max |g - g_tg| = %.2g", worst_beta, worst_g)};
}

Verdict c2_loss_tolerance() {
    bool ok = true;
    std::string bad;
    double worst_a = 1.0, worst_f = 1.0;
    for (const Table1Row &row : table1()) {
        const ProtocolConfig cfg = table1_config(row);
        const double fa = run_binary(cfg, 1.0, 0.0).fidelity;
        const double ff = run_binary_fock(cfg, 1.0, 0.0).fidelity;
        worst_a = std::min(worst_a, fa);
        worst_f = std::min(worst_f, ff);
        if (fa < 1.0 - 1e-9 || ff < 1.0 - 1e-6) {
            ok = false;
            bad += fmt(" row %d: F_analytic=%.6f F_fock=%.6f;", row.id, fa, ff);
        }
    }
    std::string d = fmt("min F analytic %.12f, fock %.12f", worst_a, worst_f);
    if (!ok) {
        d += ";" + bad + " row 11 runs the lossless design (R_A=0.5) through R_E=0.8; no detection pattern recovers |g alpha>";
    }
    return {ok, d};
}

Verdict c3_closed_forms() {
    double worst2 = 0.0, worst4 = 0.0;
    for (double a : {0.1, 0.4, 0.7, 1.0, 1.3}) {
        for (double R_A : {0.2, 0.4, 0.5, 0.7, 0.9}) {
            ProtocolConfig c;
            c.alpha = a;
            c.R_A = R_A;
            c.R_B = 0.15;
            c.R_E = 0.3;
            worst2 = std::max(worst2, std::abs(success_prob_binary_closed(c) - success_prob_binary_bruteforce(c)));
        }
        for (double R_E : {0.0, 0.2, 0.5, 0.8, 0.9}) {
            ProtocolConfig c;
            c.M = 4;
            c.alpha = a;
            c.R_B = 0.2;
            c.R_E = R_E;
            worst4 = std::max(worst4, std::abs(success_prob_4psk_closed(c) - success_prob_4psk_bruteforce(c)));
        }
    }
    return {worst2 <= 1e-10 && worst4 <= 1e-10, fmt("max |closed - brute| P2 %.2g, P4 %.2g", worst2, worst4)};
}

Verdict c4_dispatch() {
    double worst = 1.0;
    int n = 0;
    for (double R_E : {0.0, 0.8}) {
        ProtocolConfig c;
        c.M = 4;
        c.alpha = 0.5;
        c.R_B = 0.3;
        c.R_E = R_E;
        for (int m = 0; m < 4; ++m) {
            for (const char *bits : {"0111", "1011", "1101", "1110"}) {
                worst = std::min(worst, run_mpsk4(c, m, bits).fidelity);
                ++n;
            }
        }
    }
    return {worst >= 1.0 - 1e-9, fmt("%d runs (16 per R_E), min fidelity %.15f", n, worst)};
}

Verdict c5_quantum_vs_classical() {
    const double R_E = 0.8;
    ProtocolConfig c4;
    c4.M = 4;
    c4.R_E = R_E;
    c4.R_B = solve_rb_for_gain(3.0, 0.5, R_E);
    double best = 0.0, at = 0.0;
    for (int i = 1; i <= 150; ++i) {
        c4.alpha = 0.01 * i;
        const double ratio = success_prob_4psk_closed(c4) / usd_success(4, 0.01 * i, R_E);
        if (ratio > best) {
            best = ratio;
            at = 0.01 * i;
        }
    }
    c4.alpha = 1.5;
    const double ratio_end = success_prob_4psk_closed(c4) / usd_success(4, 1.5, R_E);
    // BPSK ordering on alpha <= 1 and the crossover above it.
    bool ordered = true;
    double crossover = 0.0;
    for (double g : {1.0, 2.0, 3.0}) {
        ProtocolConfig c2;
        c2.R_E = R_E;
        c2.R_B = solve_rb_for_gain(g, 0.5, R_E);
        for (int i = 1; i <= 150; ++i) {
            c2.alpha = 0.01 * i;
            const bool above = success_prob_binary_closed(c2) > usd_success(2, 0.01 * i, R_E);
            if (!above && i <= 100) {
                ordered = false;
            }
            if (!above && crossover == 0.0) {
                crossover = 0.01 * i;
            }
        }
    }
    const bool band = best >= 5.0 && best <= 15.0;
    return {band && ordered,
            fmt("sup P4/P_USD on (0,1.5] = %.3g at alpha=%.2f (ratio %.3g at 1.5; P4 -> (3/32)(R_B(1-R_E))^3 "
                "while P_USD ~ alpha^6, so the ratio diverges as alpha -> 0); P2 > P_USD for alpha <= 1 at g=1,2,3: "
                "%s, first crossover alpha=%.2f",
                best, at, ratio_end, ordered ? "yes" : "no", crossover)};
}

Verdict c6_qubit_anchor() {
    const QubitTeleporter tp(0.4, 0.6);
    const double a = fidelity_map(tp, fibonacci_grid(168)).average;
    const double integral = fidelity_map(tp, product_grid(32, 32)).average;
    return {std::abs(a - 0.77) <= 0.03 && tp.cutoff() <= 20,
            fmt("average %.4f (168-point Fibonacci), %.4f (32x32 integral), cutoff %zu, r=%.4f", a, integral,
                tp.cutoff(), tp.squeezing())};
}

Verdict c7_classical_bound() {
    double best = 0.0, ba = 0.0, bap = 0.0;
    std::string grid;
    for (double a : {0.3, 0.45, 0.6, 0.8}) {
        for (double ap : {0.45, 0.6, 0.75, 0.9}) {
            const double f = fidelity_map(a, ap, {}, fibonacci_grid(168)).average;
            grid += fmt(" %.3f", f);
            if (f > best) {
                best = f;
                ba = a;
                bap = ap;
            }
        }
        grid += " |";
    }
    return {best > 2.0 / 3.0, fmt("best %.4f at (alpha, alpha')=(%.2f, %.2f); grid rows alpha:%s", best, ba, bap,
                                  grid.c_str())};
}

Verdict c8_qkd() {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    double worst = 0.0;
    for (int i = 0; i < 1000; ++i) {
        const auto p = bb84_probabilities(3.0 * u(rng), 0.01 * u(rng), 0.01 + 0.99 * u(rng));
        worst = std::max(worst, std::abs(p.correct + p.error + p.inconclusive - 1.0));
    }
    QkdParams z;
    z.nu = 0.0;
    z.L = 40.0;
    const bool nu0 = key_rate(z, false).delta == 0.0;
    std::vector<double> L;
    for (double d = 0.0; d <= 500.0; d += 5.0) {
        L.push_back(d);
    }
    bool decreasing = true;
    for (double x : {0.2, 0.4}) {
        QkdParams p;
        p.alpha_in_sq = 0.2;
        p.x = x;
        const auto s = distance_scan(p, L);
        // Strictly decreasing until the dark-count floor (1 - e^{-nu})/2, which it then holds.
        const double floor = -0.5 * std::expm1(-p.nu);
        for (std::size_t i = 1; i < s.size(); ++i) {
            const bool above = s[i - 1].delta > floor * (1.0 + 1e-9);
            decreasing = decreasing && (above ? s[i].delta < s[i - 1].delta : s[i].delta <= s[i - 1].delta);
        }
    }
    QkdParams direct;
    direct.alpha_in_sq = 0.008;
    QkdParams relay;
    relay.alpha_in_sq = 0.05;
    relay.x = 0.2;
    const double Ld = max_secure_distance(distance_scan(direct, L));
    const double Lr = max_secure_distance(distance_scan(relay, L));
    return {worst <= 1e-12 && nu0 && decreasing && Lr > Ld,
            fmt("partition err %.2g; nu=0 => delta=0: %s; relay BER decreasing: %s; G>0 up to %.0f km (relay x=0.2) "
                "vs %.0f km (direct 0.008)",
                worst, nu0 ? "yes" : "no", decreasing ? "yes" : "no", Lr, Ld)};
}

Verdict c9_engines() {
    std::mt19937_64 rng(20260418);
    double worst = 1.0;
    for (int i = 0; i < 200; ++i) {
        worst = std::min(worst, testing::compare_engines(testing::random_pipeline(rng)).agreement);
    }
    return {worst >= 1.0 - 1e-7, fmt("200 random pipelines, min state agreement %.12f", worst)};
}

Verdict c10_context_table() {
    std::printf("      row  alpha  g_tg  F_exp    F_model_ideal  F_model_imperfect  P_model_imperfect\n");
    bool ok = true;
    for (const Table1Row &row : table1()) {
        const ProtocolConfig cfg = table1_config(row);
        const double ideal = run_binary(cfg, 1.0, 0.0).fidelity;
        std::string imperfect = "n/a";
        std::string prob = "n/a";
        if (row.re_design == row.re_channel) {
            ok = ok && ideal >= 1.0 - 1e-9;
            TeleportSettings s;
            s.R_E = row.re_channel;
            const QubitTeleporter tp(row.alpha, row.g_tg * row.alpha, {}, s);
            const CatQubit probe{row.alpha, 0.0, 0.0};
            const double theta = 2.0 * std::atan(probe.n_plus() / probe.n_minus());
            imperfect = fmt("%.3f", tp.fidelity(theta, 0.0));
            prob = fmt("%.3g%%", 100.0 * tp.success_probability(theta, 0.0));
        }
        std::printf("      %3d  %5.2f  %4.2f  %7.3f  %13.9f  %17s  %17s\n", row.id, row.alpha, row.g_tg,
                    row.fidelity_measured, ideal, imperfect.c_str(), prob.c_str());
    }
    std::printf("      measured success probabilities: 0.3-0.65%% (rows 1-10), 0.17%% (row 11), 0.11%% (row 12)\n");
    return {ok, "experimental values are context only; ideal model fidelity is 1 for matched rows"};
}

}  // namespace

int main(int argc, char **argv) {
    std::set<int> expect_red;
    for (int i = 1; i < argc; ++i) {
        if (std::strncmp(argv[i], "--expect-red=", 13) == 0) {
            std::stringstream ss(argv[i] + 13);
            std::string tok;
            while (std::getline(ss, tok, ',')) {
                expect_red.insert(std::stoi(tok));
            }
        }
    }
    struct Criterion {
        const char *name;
        std::function<Verdict()> run;
        double budget_s;
    };
    const std::vector<Criterion> criteria{
        {"Table I parameter consistency", c1_table_parameters, 1.0},
        {"Loss-tolerance theorem", c2_loss_tolerance, 30.0},
        {"Closed forms vs brute force", c3_closed_forms, 10.0},
        {"4-PSK dispatch table", c4_dispatch, 10.0},
        {"Quantum vs classical ratio", c5_quantum_vs_classical, 10.0},
        {"Qubit-model anchor", c6_qubit_anchor, 600.0},
        {"Classical-bound region", c7_classical_bound, 600.0},
        {"QKD identities and shapes", c8_qkd, 30.0},
        {"Engine cross-validation", c9_engines, 120.0},
        {"Experimental values side by side", c10_context_table, 600.0},
    };
    std::set<int> red;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        const auto t0 = std::chrono::steady_clock::now();
        Verdict o;
        try {
            o = criteria[i].run();
        } catch (const std::exception &e) {
            o = {false, std::string("threw: ") + e.what()};
        }
        const double dt = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        if (dt > criteria[i].budget_s) {
            o.pass = false;
            o.detail += fmt(" [over the %.0f s budget]", criteria[i].budget_s);
        }
        std::printf("%s  %2zu. %s (%.2f s): %s\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].name, dt,
                    o.detail.c_str());
        std::fflush(stdout);
        if (!o.pass) {
            red.insert(static_cast<int>(i + 1));
        }
    }
    return red == expect_red ? 0 : 1;
}
