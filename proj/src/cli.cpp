#include "afrelay/cli.hpp"

#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <iostream>
#include <numbers>
#include <set>
#include <sstream>

#include "json.hpp"

namespace afrelay::cli {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

double parse_double(const std::string& v, const std::string& key, int line) {
    errno = 0;
    char* end = nullptr;
    const double x = std::strtod(v.c_str(), &end);
    if (v.empty() || end != v.c_str() + v.size() || errno == ERANGE || !std::isfinite(x)) {
        throw config_error("invalid number '" + v + "' for " + key, line);
    }
    return x;
}

long long parse_integer(const std::string& v, const std::string& key, int line) {
    errno = 0;
    char* end = nullptr;
    const long long x = std::strtoll(v.c_str(), &end, 10);
    if (v.empty() || end != v.c_str() + v.size() || errno == ERANGE) {
        throw config_error("invalid integer '" + v + "' for " + key, line);
    }
    return x;
}

void with_output(const RunManifest& m, const std::function<void(std::ostream&)>& write) {
    if (m.output_path.empty()) {
        write(std::cout);
        std::cout.flush();
        return;
    }
    std::ofstream f(m.output_path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open output file '" + m.output_path + "'");
    write(f);
    f.flush();
    if (!f) throw std::runtime_error("write failed for '" + m.output_path + "'");
}

SweepConfig load_config(const RunManifest& m) {
    SweepConfig cfg = m.config_path.empty() ? parse_config_text("") : parse_config(m.config_path);
    if (m.seed_override) cfg.master_seed = *m.seed_override;
    return cfg;
}

template <class F>
int guarded(std::ostream& err, F&& body) {
    try {
        body();
        return 0;
    } catch (const config_error& e) {
        err << "config error: " << e.what() << '\n';
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
    }
    return 1;
}

}  // namespace

SweepConfig parse_config_text(const std::string& text) {
    SweepConfig cfg = SweepConfig::defaults();
    double snr_min = 0.0, snr_max = 30.0, snr_step = 1.0;
    std::set<std::string> seen;

    std::istringstream in(text);
    std::string raw;
    int line = 0;
    while (std::getline(in, raw)) {
        ++line;
        if (const auto hash = raw.find('#'); hash != std::string::npos) raw.erase(hash);
        const std::string s = trim(raw);
        if (s.empty()) continue;
        const auto eq = s.find('=');
        if (eq == std::string::npos) throw config_error("expected key=value", line);
        const std::string key = trim(s.substr(0, eq));
        const std::string val = trim(s.substr(eq + 1));
        if (!seen.insert(key).second) throw config_error("duplicate key " + key, line);

        if (key == "n_relays") {
            const long long n = parse_integer(val, key, line);
            if (n < 1 || n > 1000000) throw config_error("n_relays must be >= 1", line);
            cfg.n_relays = static_cast<int>(n);
        } else if (key == "p_source") {
            cfg.p_source = parse_double(val, key, line);
            if (!(cfg.p_source > 0.0)) throw config_error("p_source must be > 0", line);
        } else if (key == "n0_db") {
            cfg.n0_db = parse_double(val, key, line);
        } else if (key == "a_sat") {
            cfg.a_sat = parse_double(val, key, line);
            if (!(cfg.a_sat > 0.0)) throw config_error("a_sat must be > 0", line);
        } else if (key == "snr_db_min") {
            snr_min = parse_double(val, key, line);
        } else if (key == "snr_db_max") {
            snr_max = parse_double(val, key, line);
        } else if (key == "snr_db_step") {
            snr_step = parse_double(val, key, line);
            if (!(snr_step > 0.0)) throw config_error("snr_db_step must be > 0", line);
        } else if (key == "schemes") {
            cfg.schemes.clear();
            std::istringstream list(val);
            std::string item;
            while (std::getline(list, item, ',')) {
                const auto s_opt = parse_scheme(trim(item));
                if (!s_opt) throw config_error("unknown scheme '" + trim(item) + "'", line);
                cfg.schemes.push_back(*s_opt);
            }
            if (cfg.schemes.empty()) throw config_error("schemes must not be empty", line);
        } else if (key == "variance_model") {
            if (val == "symmetric" || val == "symmetric-unit") {
                cfg.variance_model = VarianceModel::symmetric_unit;
            } else if (val == "uniform") {
                cfg.variance_model = VarianceModel::uniform;
            } else {
                throw config_error("variance_model must be symmetric or uniform", line);
            }
        } else if (key == "variance_lo") {
            cfg.variance_lo = parse_double(val, key, line);
        } else if (key == "variance_hi") {
            cfg.variance_hi = parse_double(val, key, line);
        } else if (key == "n_realizations") {
            const long long n = parse_integer(val, key, line);
            if (n < 1 || n > 100000000) throw config_error("n_realizations must be >= 1", line);
            cfg.n_realizations = static_cast<int>(n);
        } else if (key == "master_seed") {
            const long long n = parse_integer(val, key, line);
            if (n < 0) throw config_error("master_seed must be >= 0", line);
            cfg.master_seed = static_cast<std::uint64_t>(n);
        } else {
            throw config_error("unknown key " + key, line);
        }
    }
    if (snr_max < snr_min) throw config_error("snr_db_max must be >= snr_db_min");
    cfg.snr_db_grid = SweepConfig::grid(snr_min, snr_max, snr_step);
    cfg.validate();
    return cfg;
}

SweepConfig parse_config(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw config_error("cannot open config file '" + path + "'");
    std::ostringstream ss;
    ss << f.rdbuf();
    return parse_config_text(ss.str());
}

std::string format_number(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

void write_sweep_csv(std::ostream& os, const SweepResult& result) {
    os << "snr_db,scheme,capacity_mean,capacity_std,n_realizations\n";
    for (const auto& r : result.rows) {
        os << format_number(r.snr_db) << ',' << scheme_name(r.scheme) << ','
           << format_number(r.capacity_mean) << ',' << format_number(r.capacity_std) << ','
           << r.n_realizations << '\n';
    }
}

void write_sweep_json(std::ostream& os, const SweepResult& result) {
    nlohmann::ordered_json j;
    j["rows"] = nlohmann::ordered_json::array();
    for (const auto& r : result.rows) {
        j["rows"].push_back({{"snr_db", r.snr_db},
                             {"scheme", std::string(scheme_name(r.scheme))},
                             {"capacity_mean", r.capacity_mean},
                             {"capacity_std", r.capacity_std},
                             {"n_realizations", r.n_realizations}});
    }
    j["metadata"] = {{"gamma_opt_db", result.metadata.gamma_opt_db},
                     {"capacity_formula_id", result.metadata.capacity_formula_id},
                     {"averaging", result.metadata.averaging},
                     {"seed", result.metadata.seed},
                     {"version", kVersion}};
    os << j.dump(2) << '\n';
}

std::vector<SweepRow> read_sweep_csv(std::istream& is) {
    std::vector<SweepRow> rows;
    std::string line;
    if (!std::getline(is, line) || line != "snr_db,scheme,capacity_mean,capacity_std,n_realizations") {
        throw config_error("unexpected sweep CSV header");
    }
    int n = 1;
    while (std::getline(is, line)) {
        ++n;
        if (line.empty()) continue;
        std::istringstream ls(line);
        std::string f[5];
        for (auto& field : f) {
            if (!std::getline(ls, field, ',')) throw config_error("short CSV row", n);
        }
        const auto s = parse_scheme(f[1]);
        if (!s) throw config_error("unknown scheme in CSV", n);
        rows.push_back({parse_double(f[0], "snr_db", n), *s, parse_double(f[2], "capacity_mean", n),
                        parse_double(f[3], "capacity_std", n),
                        static_cast<int>(parse_integer(f[4], "n_realizations", n))});
    }
    return rows;
}

GammaOptRecord gamma_opt_record(double mu_db) {
    if (!std::isfinite(mu_db)) throw domain_error("gamma-opt: mu_db must be finite");
    const double mu = db_to_linear(mu_db);
    const double g = gamma_opt(mu);
    const double t = 1.0 / std::sqrt(g);
    const double residual = t - std::sqrt(std::numbers::pi) / (2.0 * mu) * erfc(t);
    return {mu_db, g, linear_to_db(g), residual};
}

int cmd_gamma_opt(double mu_db, std::ostream& out, std::ostream& err) {
    return guarded(err, [&] {
        const GammaOptRecord r = gamma_opt_record(mu_db);
        out << "mu_db=" << format_number(r.mu_db) << " gamma_opt=" << format_number(r.gamma_opt)
            << " gamma_opt_db=" << format_number(r.gamma_opt_db)
            << " residual=" << format_number(r.residual) << '\n';
    });
}

int cmd_allocate(const RunManifest& m, double snr_db, std::ostream& err) {
    return guarded(err, [&] {
        const SweepConfig cfg = load_config(m);
        const NetworkStats net = draw_network(cfg, 0);
        const double mu = cfg.mu();
        const double lid = gamma_opt(mu);
        const PowerBudget budget{cfg.gamma_r(snr_db), mu};

        struct Entry {
            Scheme scheme;
            Allocation alloc;
            double snr;
        };
        std::vector<Entry> entries;
        for (Scheme s : cfg.schemes) {
            Allocation a = allocate_scheme(s, net, budget, lid);
            const double snr = scheme_snr(s, net, a);
            entries.push_back({s, std::move(a), snr});
        }

        with_output(m, [&](std::ostream& os) {
            if (m.format == Format::csv) {
                os << "scheme,relay,var_sr,var_rd,gamma,tx_power,lambda,budget_active,snr_total,capacity\n";
                for (const auto& e : entries) {
                    for (std::size_t i = 0; i < net.size(); ++i) {
                        const double g = e.alloc.gammas[i];
                        os << scheme_name(e.scheme) << ',' << i << ','
                           << format_number(net.links[i].var_sr) << ','
                           << format_number(net.links[i].var_rd) << ',' << format_number(g) << ','
                           << format_number(g_constraint(g)) << ','
                           << format_number(e.alloc.lambda_level) << ','
                           << (e.alloc.budget_active ? 1 : 0) << ',' << format_number(e.snr)
                           << ',' << format_number(capacity(e.snr, net.size())) << '\n';
                    }
                }
            } else {
                nlohmann::ordered_json j;
                j["snr_db"] = snr_db;
                j["gamma_r"] = budget.gamma_r;
                j["mu"] = mu;
                j["gamma_opt"] = lid;
                j["allocations"] = nlohmann::ordered_json::array();
                for (const auto& e : entries) {
                    std::vector<double> tx;
                    for (double g : e.alloc.gammas) tx.push_back(g_constraint(g));
                    j["allocations"].push_back({{"scheme", std::string(scheme_name(e.scheme))},
                                                {"gammas", e.alloc.gammas},
                                                {"tx_power", tx},
                                                {"lambda", e.alloc.lambda_level},
                                                {"budget_active", e.alloc.budget_active},
                                                {"snr_total", e.snr},
                                                {"capacity", capacity(e.snr, net.size())}});
                }
                j["metadata"] = {{"capacity_formula_id", std::string(kCapacityFormulaId)},
                                 {"seed", cfg.master_seed},
                                 {"version", kVersion}};
                os << j.dump(2) << '\n';
            }
        });
    });
}

int cmd_sweep(const RunManifest& m, std::ostream& err) {
    return guarded(err, [&] {
        const SweepConfig cfg = load_config(m);
        const SweepResult res = run_sweep(cfg, m.jobs);
        with_output(m, [&](std::ostream& os) {
            if (m.format == Format::csv) {
                write_sweep_csv(os, res);
            } else {
                write_sweep_json(os, res);
            }
        });
    });
}

int cmd_bussgang(const RunManifest& m, const std::vector<double>& gammas, int n_samples,
                 std::ostream& err) {
    return guarded(err, [&] {
        const SweepConfig cfg = load_config(m);
        if (gammas.empty()) throw config_error("bussgang: empty gamma grid");
        const auto rows = run_bussgang_validation(gammas, cfg.mu(), n_samples,
                                                  RngStream(cfg.master_seed, 0), cfg.a_sat);
        with_output(m, [&](std::ostream& os) {
            if (m.format == Format::csv) {
                os << "gamma,alpha_closed,alpha_empirical,alpha_stderr,sigma_d_sq_closed,"
                      "sigma_d_sq_empirical,sigma_d_sq_stderr,rho_closed,rho_empirical,"
                      "orthogonality,orthogonality_stderr,alpha_stderr_model,sigma_d_sq_stderr_model,"
                      "orthogonality_stderr_model,within_3sigma\n";
                for (const auto& r : rows) {
                    os << format_number(r.gamma) << ',' << format_number(r.alpha_closed) << ','
                       << format_number(r.alpha_empirical) << ',' << format_number(r.alpha_stderr)
                       << ',' << format_number(r.sigma_d_sq_closed) << ','
                       << format_number(r.sigma_d_sq_empirical) << ','
                       << format_number(r.sigma_d_sq_stderr) << ',' << format_number(r.rho_closed)
                       << ',' << format_number(r.rho_empirical) << ','
                       << format_number(r.orthogonality) << ','
                       << format_number(r.orthogonality_stderr) << ','
                       << format_number(r.alpha_stderr_model) << ','
                       << format_number(r.sigma_d_sq_stderr_model) << ','
                       << format_number(r.orthogonality_stderr_model) << ',' << (r.within_3sigma ? 1 : 0)
                       << '\n';
                }
            } else {
                nlohmann::ordered_json j;
                j["rows"] = nlohmann::ordered_json::array();
                for (const auto& r : rows) {
                    j["rows"].push_back({{"gamma", r.gamma},
                                         {"alpha_closed", r.alpha_closed},
                                         {"alpha_empirical", r.alpha_empirical},
                                         {"alpha_stderr", r.alpha_stderr},
                                         {"sigma_d_sq_closed", r.sigma_d_sq_closed},
                                         {"sigma_d_sq_empirical", r.sigma_d_sq_empirical},
                                         {"sigma_d_sq_stderr", r.sigma_d_sq_stderr},
                                         {"rho_closed", r.rho_closed},
                                         {"rho_empirical", r.rho_empirical},
                                         {"orthogonality", r.orthogonality},
                                         {"orthogonality_stderr", r.orthogonality_stderr},
                                         {"alpha_stderr_model", r.alpha_stderr_model},
                                         {"sigma_d_sq_stderr_model", r.sigma_d_sq_stderr_model},
                                         {"orthogonality_stderr_model", r.orthogonality_stderr_model},
                                         {"within_3sigma", r.within_3sigma}});
                }
                j["metadata"] = {{"mu", cfg.mu()},
                                 {"n_samples", n_samples},
                                 {"seed", cfg.master_seed},
                                 {"version", kVersion}};
                os << j.dump(2) << '\n';
            }
        });
    });
}

int cmd_ser(const RunManifest& m, long long n_symbols, Estimation estimation, std::ostream& err) {
    return guarded(err, [&] {
        const SweepConfig cfg = load_config(m);
        ReceiverOptions opts;
        opts.estimation = estimation;
        const auto rows = run_ser_study(cfg, n_symbols, opts);
        with_output(m, [&](std::ostream& os) {
            if (m.format == Format::csv) {
                os << "snr_db,ser_aware,ser_naive,symbols\n";
                for (const auto& r : rows) {
                    os << format_number(r.snr_db) << ',' << format_number(r.ser_aware) << ','
                       << format_number(r.ser_naive) << ',' << r.symbols << '\n';
                }
            } else {
                nlohmann::ordered_json j;
                j["rows"] = nlohmann::ordered_json::array();
                for (const auto& r : rows) {
                    j["rows"].push_back({{"snr_db", r.snr_db},
                                         {"ser_aware", r.ser_aware},
                                         {"ser_naive", r.ser_naive},
                                         {"symbols", r.symbols}});
                }
                j["metadata"] = {{"estimation", estimation == Estimation::pilot ? "pilot" : "ideal"},
                                 {"seed", cfg.master_seed},
                                 {"version", kVersion}};
                os << j.dump(2) << '\n';
            }
        });
    });
}

}  // namespace afrelay::cli
