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

// Command-line front end: runs protocols and scans and writes CSV or JSON tables.

#include <atomic>
#include <charconv>
#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <thread>
#include <variant>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "teleamp/teleamp.hpp"

namespace {

using teleamp::Complex;
using Cell = std::variant<double, long long, std::string>;
using Row = std::vector<Cell>;

constexpr int kExitConfig = 2;
constexpr int kExitDomain = 3;

struct Table {
    std::vector<std::string> columns;
    std::vector<Row> rows;
};

std::string format_double(double v) {
    if (std::isnan(v)) {
        return "nan";
    }
    if (std::isinf(v)) {
        return v > 0 ? "inf" : "-inf";
    }
    char buf[64];
    auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, end);
}

std::string csv_field(const Cell &c) {
    if (const double *d = std::get_if<double>(&c)) {
        return format_double(*d);
    }
    if (const long long *i = std::get_if<long long>(&c)) {
        return std::to_string(*i);
    }
    const std::string &s = std::get<std::string>(c);
    if (s.find_first_of(",\"\n") == std::string::npos) {
        return s;
    }
    std::string q = "\"";
    for (char ch : s) {
        q += ch;
        if (ch == '"') {
            q += '"';
        }
    }
    return q + "\"";
}

void write_csv(std::ostream &out, const Table &t) {
    for (std::size_t i = 0; i < t.columns.size(); ++i) {
        out << (i ? "," : "") << t.columns[i];
    }
    out << "\n";
    for (const Row &r : t.rows) {
        for (std::size_t i = 0; i < r.size(); ++i) {
            out << (i ? "," : "") << csv_field(r[i]);
        }
        out << "\n";
    }
}

nlohmann::ordered_json to_json(const Cell &c) {
    if (const double *d = std::get_if<double>(&c)) {
        return std::isfinite(*d) ? nlohmann::ordered_json(*d) : nlohmann::ordered_json(nullptr);
    }
    if (const long long *i = std::get_if<long long>(&c)) {
        return *i;
    }
    return std::get<std::string>(c);
}

struct Common {
    std::string out;
    std::string format = "csv";
    int jobs = 1;
    bool timing = false;
};

/// Runs f(i) for i in [0, n) on `jobs` workers; results stay in index order.
template <typename F>
std::vector<Row> run_rows(std::size_t n, int jobs, F f) {
    std::vector<Row> rows(n);
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < n; i = next++) {
            rows[i] = f(i);
        }
    };
    const int k = std::max(1, std::min<int>(jobs, static_cast<int>(n)));
    std::vector<std::thread> pool;
    for (int t = 1; t < k; ++t) {
        pool.emplace_back(worker);
    }
    worker();
    for (auto &th : pool) {
        th.join();
    }
    return rows;
}

/// Wraps a row computation, appending wall_time when requested.
template <typename F>
Row timed(bool timing, F f) {
    const auto t0 = std::chrono::steady_clock::now();
    Row r = f();
    if (timing) {
        r.emplace_back(std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
    }
    return r;
}

std::vector<double> grid(double lo, double hi, double step) {
    if (!(step > 0.0) || !(hi >= lo)) {
        throw teleamp::ConfigError("grid needs step > 0 and max >= min");
    }
    std::vector<double> g;
    const long long n = std::llround(std::floor((hi - lo) / step + 1e-9));
    for (long long i = 0; i <= n; ++i) {
        g.push_back(lo + static_cast<double>(i) * step);
    }
    return g;
}

nlohmann::ordered_json config_echo(const CLI::App &app, const CLI::App &sub) {
    nlohmann::ordered_json cfg;
    cfg["command"] = sub.get_name();
    for (const CLI::App *a : {&app, &sub}) {
        for (const CLI::Option *o : a->get_options()) {
            const std::string name = o->get_name(false, true);
            if (name.empty() || name == "--help" || name == "--config") {
                continue;
            }
            const std::string key = o->get_lnames().empty() ? name : o->get_lnames().front();
            if (o->count() > 0) {
                const auto &res = o->results();
                cfg[key] = res.size() == 1 ? nlohmann::ordered_json(res.front()) : nlohmann::ordered_json(res);
            } else if (!o->get_default_str().empty()) {
                cfg[key] = o->get_default_str();
            }
        }
    }
    return cfg;
}

void emit(const Common &c, const std::string &command, const Table &t, const nlohmann::ordered_json &config,
          const nlohmann::ordered_json &summary = {}) {
    std::filesystem::path path;
    if (!c.out.empty()) {
        path = c.out;
    } else if (const char *dir = std::getenv("TELEAMP_OUT_DIR"); dir && *dir) {
        path = std::filesystem::path(dir) / (command + "." + c.format);
    }
    std::ofstream file;
    if (!path.empty()) {
        if (path.has_parent_path()) {
            std::filesystem::create_directories(path.parent_path());
        }
        file.open(path);
        if (!file) {
            throw teleamp::ConfigError("cannot open output file " + path.string());
        }
    }
    std::ostream &out = path.empty() ? std::cout : file;
    if (c.format == "json") {
        nlohmann::ordered_json doc;
        doc["config"] = config;
        if (!summary.is_null()) {
            doc["summary"] = summary;
        }
        doc["rows"] = nlohmann::ordered_json::array();
        for (const Row &r : t.rows) {
            nlohmann::ordered_json o;
            for (std::size_t i = 0; i < t.columns.size(); ++i) {
                o[t.columns[i]] = to_json(r[i]);
            }
            doc["rows"].push_back(o);
        }
        out << doc.dump(2) << "\n";
    } else {
        write_csv(out, t);
    }
}

// ---------------------------------------------------------------------------
// teleamp

struct TeleampOptions {
    bool table1 = false;
    double alpha = 0.35;
    double gain = 3.0;
    double R_B = 0.1;
    double R_E = 0.0;
    std::string engine = "analytic";
    std::string detection = "ideal";
    double efficiency = 1.0;
    double dark_count = 0.0;
};

teleamp::BinaryDetection parse_detection(const std::string &s) {
    if (s == "ideal") return teleamp::BinaryDetection::IdealProjectors;
    if (s == "onoff") return teleamp::BinaryDetection::OnOff;
    if (s == "onoff-noc") return teleamp::BinaryDetection::OnOffWithoutC;
    throw teleamp::ConfigError("unknown detection '" + s + "'");
}

Table cmd_teleamp(const TeleampOptions &o, const Common &c) {
    struct Job {
        long long id;
        double alpha, g_tg;
        teleamp::ProtocolConfig cfg;
    };
    std::vector<Job> jobs;
    const teleamp::BinaryDetection det = parse_detection(o.detection);
    const teleamp::DetectorModel apd{o.dark_count, o.efficiency};
    apd.validate();
    if (o.table1) {
        for (const auto &row : teleamp::table1()) {
            teleamp::ProtocolConfig cfg = teleamp::table1_config(row, det);
            cfg.detector_A = cfg.detector_C = apd;
            jobs.push_back({row.id, row.alpha, row.g_tg, cfg});
        }
    } else {
        if (!(o.alpha > 0.0)) {
            throw teleamp::DegenerateCat("alpha must be positive");
        }
        teleamp::ProtocolConfig cfg;
        cfg.alpha = o.alpha;
        cfg.R_B = o.R_B;
        cfg.R_E = o.R_E;
        cfg.R_A = teleamp::solve_ra_for_gain(o.gain, o.R_B, o.R_E);
        cfg.detection = det;
        cfg.detector_A = cfg.detector_C = apd;
        cfg.validate();
        jobs.push_back({0, o.alpha, o.gain, cfg});
    }
    const bool analytic = o.engine == "analytic" || o.engine == "both";
    const bool fock = o.engine == "fock" || o.engine == "both";
    Table t;
    t.columns = {"id", "alpha", "g_tg", "beta", "R_A", "R_E", "success_prob", "ideal_fidelity"};
    if (o.engine == "both") {
        t.columns.insert(t.columns.end(), {"fock_fidelity", "engine_gap"});
    }
    t.columns.push_back("error");
    if (c.timing) {
        t.columns.push_back("wall_time");
    }
    t.rows = run_rows(jobs.size(), c.jobs, [&](std::size_t i) {
        const Job &j = jobs[i];
        return timed(c.timing, [&] {
            const double nan = std::numeric_limits<double>::quiet_NaN();
            Row r{j.id, j.alpha, j.g_tg, teleamp::prepared_beta(j.cfg), j.cfg.R_A, j.cfg.R_E};
            try {
                double p = nan, f = nan, ff = nan, gap = nan;
                std::optional<teleamp::TeleampResult> a;
                if (analytic) {
                    a = teleamp::run_binary(j.cfg, 1.0, 0.0);
                    p = a->probability;
                    f = a->fidelity;
                }
                if (fock) {
                    const auto fr = teleamp::run_binary_fock(j.cfg, 1.0, 0.0);
                    ff = fr.fidelity;
                    if (!analytic) {
                        p = fr.probability;
                        f = fr.fidelity;
                    } else {
                        gap = 1.0 - teleamp::state_agreement(teleamp::to_fock(a->output, {fr.cutoffs[1]}), fr.output);
                    }
                }
                r.insert(r.end(), {p, f});
                if (o.engine == "both") {
                    r.insert(r.end(), {ff, gap});
                }
                r.emplace_back(std::string());
            } catch (const teleamp::Error &e) {
                r.insert(r.end(), {nan, nan});
                if (o.engine == "both") {
                    r.insert(r.end(), {nan, nan});
                }
                r.emplace_back(std::string(e.what()));
            }
            return r;
        });
    });
    return t;
}

// ---------------------------------------------------------------------------
// success-scan

struct ScanOptions {
    std::string preset = "fig45";
    double R_E = 0.8;
    double alpha_min = 0.05;
    double alpha_max = 1.5;
    double alpha_step = 0.05;
    std::vector<double> gains{1.0, 2.0, 3.0};
    double gain4 = 3.0;
    double R_A = 0.5;
};

Table cmd_success_scan(ScanOptions o, const Common &c) {
    if (o.preset != "fig45" && o.preset != "none") {
        throw teleamp::ConfigError("unknown success-scan preset '" + o.preset + "'");
    }
    if (o.gains.empty()) {
        throw teleamp::ConfigError("need at least one BPSK gain");
    }
    const std::vector<double> alphas = grid(o.alpha_min, o.alpha_max, o.alpha_step);
    if (!(alphas.front() > 0.0)) {
        throw teleamp::DomainError("alpha grid must be positive");
    }
    auto name = [](double g) { return "g" + format_double(g); };
    Table t;
    t.columns.push_back("alpha");
    for (double g : o.gains) {
        t.columns.push_back("p2_" + name(g));
    }
    t.columns.insert(t.columns.end(), {"p4", "p_usd2", "p_usd4"});
    for (double g : o.gains) {
        t.columns.push_back("ratio2_" + name(g));
    }
    t.columns.push_back("ratio4");
    if (c.timing) {
        t.columns.push_back("wall_time");
    }
    std::vector<teleamp::ProtocolConfig> bpsk;
    for (double g : o.gains) {
        teleamp::ProtocolConfig cfg;
        cfg.R_A = o.R_A;
        cfg.R_E = o.R_E;
        cfg.R_B = teleamp::solve_rb_for_gain(g, o.R_A, o.R_E);
        bpsk.push_back(cfg);
    }
    teleamp::ProtocolConfig psk4;
    psk4.M = 4;
    psk4.R_A = 0.5;
    psk4.R_E = o.R_E;
    psk4.R_B = teleamp::solve_rb_for_gain(o.gain4, 0.5, o.R_E);
    t.rows = run_rows(alphas.size(), c.jobs, [&](std::size_t i) {
        return timed(c.timing, [&] {
            const double a = alphas[i];
            Row r{a};
            std::vector<double> p2;
            for (auto cfg : bpsk) {
                cfg.alpha = a;
                p2.push_back(teleamp::success_prob_binary_closed(cfg));
                r.emplace_back(p2.back());
            }
            teleamp::ProtocolConfig c4 = psk4;
            c4.alpha = a;
            const double p4 = teleamp::success_prob_4psk_closed(c4);
            const double u2 = teleamp::usd_success(2, a, o.R_E);
            const double u4 = teleamp::usd_success(4, a, o.R_E);
            r.insert(r.end(), {p4, u2, u4});
            for (double p : p2) {
                r.emplace_back(p / u2);
            }
            r.emplace_back(p4 / u4);
            return r;
        });
    });
    return t;
}

// ---------------------------------------------------------------------------
// qubit-map

struct QubitOptions {
    double alpha = 0.4;
    double alpha_out = 0.6;
    std::string grid = "fibonacci";
    std::size_t points = 168;
    std::size_t n_z = 16;
    std::size_t n_phi = 16;
    bool ideal = false;
    bool detect_c = false;
    double R_B = 0.1;
    double R_E = 0.0;
    std::size_t cutoff = 20;
    teleamp::ImperfectionModel model;
};

Table cmd_qubit_map(const QubitOptions &o, const Common &c, nlohmann::ordered_json &summary) {
    teleamp::TeleportSettings s;
    s.R_B = o.R_B;
    s.R_E = o.R_E;
    s.detect_port_c = o.detect_c;
    s.cutoff = o.cutoff;
    teleamp::ImperfectionModel model = o.model;
    if (o.ideal) {
        model = teleamp::ImperfectionModel::ideal();
        s.resource = teleamp::ResourceKind::IdealCat;
        s.herald = teleamp::HeraldKind::IdealProjectors;
    }
    std::vector<teleamp::BlochPoint> pts;
    if (o.grid == "fibonacci") {
        pts = teleamp::fibonacci_grid(o.points);
    } else if (o.grid == "product") {
        pts = teleamp::product_grid(o.n_z, o.n_phi);
    } else {
        throw teleamp::ConfigError("unknown grid '" + o.grid + "'");
    }
    const teleamp::QubitTeleporter tp(o.alpha, o.alpha_out, model, s);
    Table t;
    t.columns = {"index", "theta", "phi", "weight", "fidelity", "success_prob"};
    if (c.timing) {
        t.columns.push_back("wall_time");
    }
    t.rows = run_rows(pts.size(), c.jobs, [&](std::size_t i) {
        return timed(c.timing, [&] {
            const auto &p = pts[i];
            return Row{static_cast<long long>(i), p.theta, p.phi, p.weight, tp.fidelity(p.theta, p.phi),
                       tp.success_probability(p.theta, p.phi)};
        });
    });
    double avg = 0.0;
    for (std::size_t i = 0; i < pts.size(); ++i) {
        avg += pts[i].weight * std::get<double>(t.rows[i][4]);
    }
    const double integral = teleamp::fidelity_map(tp, teleamp::product_grid(32, 32)).average;
    summary = {{"average", avg},
               {"grid", o.grid},
               {"points", pts.size()},
               {"integral_32x32", integral},
               {"R_A", tp.R_A()},
               {"beta", tp.beta()},
               {"squeezing", tp.squeezing()},
               {"cutoff", tp.cutoff()}};
    std::cerr << "average fidelity " << format_double(avg) << " over " << pts.size() << " " << o.grid
              << " points; 32x32 integral " << format_double(integral) << "\n";
    return t;
}

// ---------------------------------------------------------------------------
// qkd

struct QkdOptions {
    std::string preset = "all";
    std::optional<double> alpha_in_sq;
    std::optional<double> x;
    double xi = 0.2;
    double R_B = 0.2;
    double nu = 1e-6;
    double eta_B = 0.2;
    double L_min = 0.0;
    double L_max = 400.0;
    double L_step = 5.0;
};

Table cmd_qkd(const QkdOptions &o, const Common &c) {
    std::vector<teleamp::QkdPreset> curves;
    if (o.preset == "all") {
        curves = teleamp::qkd_presets();
    } else if (o.preset == "custom") {
        curves.push_back({"custom", o.x, o.alpha_in_sq.value_or(0.008)});
    } else {
        curves.push_back(teleamp::qkd_preset(o.preset));
    }
    if (o.preset != "custom") {
        for (auto &cv : curves) {
            if (o.alpha_in_sq) cv.alpha_in_sq = *o.alpha_in_sq;
            if (o.x) cv.x = *o.x;
        }
    }
    const std::vector<double> Ls = grid(o.L_min, o.L_max, o.L_step);
    struct Job {
        const teleamp::QkdPreset *curve;
        double L;
    };
    std::vector<Job> jobs;
    for (const auto &cv : curves) {
        for (double L : Ls) {
            jobs.push_back({&cv, L});
        }
    }
    Table t;
    t.columns = {"preset", "L", "Q", "delta", "delta_ph", "delta_ph_raw", "Delta_prime", "G", "p_suc", "g",
                 "transmittance", "cat_photons"};
    if (c.timing) {
        t.columns.push_back("wall_time");
    }
    t.rows = run_rows(jobs.size(), c.jobs, [&](std::size_t i) {
        return timed(c.timing, [&] {
            teleamp::QkdParams p;
            p.alpha_in_sq = jobs[i].curve->alpha_in_sq;
            p.x = jobs[i].curve->x;
            p.xi = o.xi;
            p.R_B = o.R_B;
            p.nu = o.nu;
            p.eta_B = o.eta_B;
            p.L = jobs[i].L;
            const auto r = teleamp::key_rate(p, p.x.has_value());
            return Row{jobs[i].curve->name, r.L, r.Q, r.delta, r.delta_ph, r.delta_ph_raw, r.Delta_prime, r.G,
                       r.P_suc, r.g_relay, r.transmittance, r.beta_cat_mean_photons};
        });
    });
    return t;
}

// ---------------------------------------------------------------------------
// usd

struct UsdOptions {
    int M = 4;
    double R_E = 0.8;
    double alpha_min = 0.05;
    double alpha_max = 1.5;
    double alpha_step = 0.05;
};

Table cmd_usd(const UsdOptions &o, const Common &c) {
    if (o.M < 2 || o.M > 16) {
        throw teleamp::ConfigError("M must lie in [2, 16]");
    }
    const std::vector<double> alphas = grid(o.alpha_min, o.alpha_max, o.alpha_step);
    Table t;
    t.columns = {"alpha", "gamma"};
    for (int k = 0; k < o.M; ++k) {
        t.columns.push_back("lambda" + std::to_string(k));
    }
    t.columns.insert(t.columns.end(), {"p_usd", "p_usd_dense"});
    if (c.timing) {
        t.columns.push_back("wall_time");
    }
    t.rows = run_rows(alphas.size(), c.jobs, [&](std::size_t i) {
        return timed(c.timing, [&] {
            const auto ens = teleamp::PskEnsemble::after_loss(o.M, alphas[i], o.R_E);
            Row r{alphas[i], std::abs(ens.gamma)};
            for (double l : teleamp::psk_eigenvalues(ens)) {
                r.emplace_back(l);
            }
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(teleamp::psk_gram(ens));
            r.insert(r.end(), {teleamp::usd_success(ens), std::max(0.0, es.eigenvalues().minCoeff())});
            return r;
        });
    });
    return t;
}

void add_common(CLI::App *app, Common &c) {
    app->add_option("--out", c.out, "Output file (default stdout, or $TELEAMP_OUT_DIR/<command>.<format>)");
    app->add_option("--format", c.format, "Output format")->check(CLI::IsMember({"csv", "json"}))->capture_default_str();
    app->add_option("--jobs", c.jobs, "Worker threads")->check(CLI::Range(1, 256))->capture_default_str();
    app->add_flag("--timing", c.timing, "Append a wall_time column (makes output nondeterministic)");
}

}  // namespace

int main(int argc, char **argv) {
    CLI::App app{"teleamp: coherent-state tele-amplification models and scans"};
    app.require_subcommand(1);
    app.set_config("--config", "", "INI config file; [section] per subcommand, flags override it");
    app.allow_config_extras(CLI::config_extras_mode::error);
    Common common;

    TeleampOptions tel;
    CLI::App *s_tel = app.add_subcommand("teleamp", "Binary tele-amplification runs (Table I settings)");
    add_common(s_tel, common);
    s_tel->add_flag("--table1", tel.table1, "Run the twelve experimental settings");
    s_tel->add_option("--alpha", tel.alpha, "Input amplitude")->capture_default_str();
    s_tel->add_option("--gain", tel.gain, "Target gain")->capture_default_str();
    s_tel->add_option("--R_B", tel.R_B, "Resource splitter reflectivity")->capture_default_str();
    s_tel->add_option("--R_E", tel.R_E, "Channel loss")->capture_default_str();
    s_tel->add_option("--engine", tel.engine)->check(CLI::IsMember({"analytic", "fock", "both"}))->capture_default_str();
    s_tel->add_option("--detection", tel.detection)
        ->check(CLI::IsMember({"ideal", "onoff", "onoff-noc"}))
        ->capture_default_str();
    s_tel->add_option("--efficiency", tel.efficiency, "On/off detector efficiency")->capture_default_str();
    s_tel->add_option("--dark-count", tel.dark_count, "On/off detector dark-count probability")->capture_default_str();

    ScanOptions scan;
    CLI::App *s_scan = app.add_subcommand("success-scan", "Relay vs measure-resend success probabilities");
    add_common(s_scan, common);
    s_scan->add_option("--preset", scan.preset, "fig45 or none")->capture_default_str();
    s_scan->add_option("--R_E", scan.R_E)->capture_default_str();
    s_scan->add_option("--R_A", scan.R_A, "BPSK mixing reflectivity")->capture_default_str();
    s_scan->add_option("--alpha-min", scan.alpha_min)->capture_default_str();
    s_scan->add_option("--alpha-max", scan.alpha_max)->capture_default_str();
    s_scan->add_option("--alpha-step", scan.alpha_step)->capture_default_str();
    s_scan->add_option("--gains", scan.gains, "BPSK gains")->delimiter(',')->capture_default_str();
    s_scan->add_option("--gain4", scan.gain4, "4PSK gain")->capture_default_str();

    QubitOptions qb;
    CLI::App *s_qb = app.add_subcommand("qubit-map", "Cat-qubit teleportation fidelity over the Bloch sphere");
    add_common(s_qb, common);
    s_qb->add_option("--alpha", qb.alpha)->capture_default_str();
    s_qb->add_option("--alpha-out", qb.alpha_out)->capture_default_str();
    s_qb->add_option("--grid", qb.grid)->check(CLI::IsMember({"fibonacci", "product"}))->capture_default_str();
    s_qb->add_option("--points", qb.points, "Fibonacci points")->capture_default_str();
    s_qb->add_option("--n-z", qb.n_z, "Product grid cos(theta) cells")->capture_default_str();
    s_qb->add_option("--n-phi", qb.n_phi, "Product grid phi cells")->capture_default_str();
    s_qb->add_flag("--ideal", qb.ideal, "Ideal cat resource and projectors, no imperfections");
    s_qb->add_flag("--detect-c", qb.detect_c, "Read port C with an on/off detector");
    s_qb->add_option("--R_B", qb.R_B)->capture_default_str();
    s_qb->add_option("--R_E", qb.R_E)->capture_default_str();
    s_qb->add_option("--cutoff", qb.cutoff, "Minimum levels per mode")->capture_default_str();
    s_qb->add_option("--sv-transmission", qb.model.sv_purity_transmission)->capture_default_str();
    s_qb->add_option("--opo-escape", qb.model.opo_escape)->capture_default_str();
    s_qb->add_option("--tap", qb.model.tap_ratio)->capture_default_str();
    s_qb->add_option("--propagation", qb.model.propagation)->capture_default_str();
    s_qb->add_option("--apd-efficiency", qb.model.apd_efficiency)->capture_default_str();
    s_qb->add_option("--dark-count", qb.model.dark_count)->capture_default_str();

    QkdOptions qk;
    CLI::App *s_qk = app.add_subcommand("qkd", "Key generation probability vs distance");
    add_common(s_qk, common);
    s_qk->add_option("--preset", qk.preset, "all, custom, or a named curve")->capture_default_str();
    s_qk->add_option("--alpha-in-sq", qk.alpha_in_sq, "|alpha_in|^2");
    s_qk->add_option("--x", qk.x, "Relay position as a fraction of L");
    s_qk->add_option("--xi", qk.xi, "Fiber loss, dB/km")->capture_default_str();
    s_qk->add_option("--R_B", qk.R_B)->capture_default_str();
    s_qk->add_option("--nu", qk.nu, "Dark-count probability")->capture_default_str();
    s_qk->add_option("--eta-B", qk.eta_B, "Bob's detector efficiency")->capture_default_str();
    s_qk->add_option("--L-min", qk.L_min)->capture_default_str();
    s_qk->add_option("--L-max", qk.L_max)->capture_default_str();
    s_qk->add_option("--L-step", qk.L_step)->capture_default_str();

    UsdOptions us;
    CLI::App *s_us = app.add_subcommand("usd", "Unambiguous discrimination of M-PSK states");
    add_common(s_us, common);
    s_us->add_option("--M", us.M)->capture_default_str();
    s_us->add_option("--R_E", us.R_E)->capture_default_str();
    s_us->add_option("--alpha-min", us.alpha_min)->capture_default_str();
    s_us->add_option("--alpha-max", us.alpha_max)->capture_default_str();
    s_us->add_option("--alpha-step", us.alpha_step)->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp &e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp &e) {
        return app.exit(e);
    } catch (const CLI::ParseError &e) {
        app.exit(e);
        return kExitConfig;
    }

    try {
        const CLI::App *sub = app.get_subcommands().front();
        const nlohmann::ordered_json cfg = config_echo(app, *sub);
        nlohmann::ordered_json summary;
        Table t;
        if (sub == s_tel) {
            t = cmd_teleamp(tel, common);
        } else if (sub == s_scan) {
            t = cmd_success_scan(scan, common);
        } else if (sub == s_qb) {
            t = cmd_qubit_map(qb, common, summary);
        } else if (sub == s_qk) {
            t = cmd_qkd(qk, common);
        } else {
            t = cmd_usd(us, common);
        }
        emit(common, sub->get_name(), t, cfg, summary);
    } catch (const teleamp::ConfigError &e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const teleamp::NoFeasibleRA &e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const teleamp::Error &e) {
        std::cerr << "numerical error: " << e.what() << "\n";
        return kExitDomain;
    }
    return 0;
}
