#include "afrelay/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <stdexcept>
#include <thread>

namespace afrelay {

std::string_view scheme_name(Scheme s) {
    switch (s) {
        case Scheme::lpa_twf: return "LPA-TWF";
        case Scheme::nlpa_twf: return "NLPA-TWF";
        case Scheme::nlpa_epa: return "NLPA-EPA";
        case Scheme::nlpa_proposed: return "NLPA-Proposed";
    }
    return "?";
}

std::optional<Scheme> parse_scheme(std::string_view name) {
    for (Scheme s : kAllSchemes) {
        if (scheme_name(s) == name) return s;
    }
    return std::nullopt;
}

SweepConfig SweepConfig::defaults() {
    SweepConfig cfg;
    cfg.snr_db_grid = grid(0.0, 30.0, 1.0);
    return cfg;
}

std::vector<double> SweepConfig::grid(double lo, double hi, double step) {
    if (!(step > 0.0) || !(hi >= lo)) throw config_error("snr grid requires step > 0 and max >= min");
    std::vector<double> g;
    const auto n = static_cast<long long>(std::floor((hi - lo) / step + 1e-9));
    for (long long k = 0; k <= n; ++k) g.push_back(lo + static_cast<double>(k) * step);
    return g;
}

void SweepConfig::validate() const {
    if (n_relays < 1) throw config_error("n_relays must be >= 1");
    if (!(p_source > 0.0)) throw config_error("p_source must be > 0");
    if (!std::isfinite(n0_db)) throw config_error("n0_db must be finite");
    if (!(a_sat > 0.0)) throw config_error("a_sat must be > 0");
    if (snr_db_grid.empty()) throw config_error("snr grid must not be empty");
    if (schemes.empty()) throw config_error("at least one scheme is required");
    if (n_realizations < 1) throw config_error("n_realizations must be >= 1");
    if (variance_model == VarianceModel::uniform && !(variance_lo < variance_hi && variance_lo >= 0.0)) {
        throw config_error("uniform variance model requires 0 <= variance_lo < variance_hi");
    }
}

const SweepRow& SweepResult::at(double snr_db, Scheme scheme) const {
    for (const auto& r : rows) {
        if (r.snr_db == snr_db && r.scheme == scheme) return r;
    }
    throw std::out_of_range("SweepResult: no row for requested point");
}

NetworkStats draw_network(const SweepConfig& cfg, int realization) {
    const double n0 = cfg.n0();
    if (cfg.variance_model == VarianceModel::symmetric_unit) {
        return NetworkStats::symmetric(static_cast<std::size_t>(cfg.n_relays), 1.0, cfg.p_source,
                                       n0, cfg.a_sat);
    }
    RngStream rng(cfg.master_seed, static_cast<std::uint64_t>(realization));
    NetworkStats net;
    net.a_sat = cfg.a_sat;
    for (int i = 0; i < cfg.n_relays; ++i) {
        LinkStats l;
        l.var_sr = rng.uniform(cfg.variance_lo, cfg.variance_hi);
        l.var_rd = rng.uniform(cfg.variance_lo, cfg.variance_hi);
        l.p_source = cfg.p_source;
        l.n0 = n0;
        net.links.push_back(l);
    }
    net.validate();
    return net;
}

Allocation allocate_scheme(Scheme s, const NetworkStats& net, const PowerBudget& budget,
                           double lid) {
    switch (s) {
        case Scheme::lpa_twf:
        case Scheme::nlpa_twf: return allocate_twf_linear(net, budget);
        case Scheme::nlpa_epa: return allocate_equal(net, budget);
        case Scheme::nlpa_proposed: return allocate_proposed(net, budget, lid);
    }
    throw std::logic_error("allocate_scheme: unknown scheme");
}

double scheme_snr(Scheme s, const NetworkStats& net, const Allocation& alloc) {
    return evaluate_scheme(net, alloc, s == Scheme::lpa_twf);
}

SweepResult run_sweep(const SweepConfig& cfg, int jobs) {
    cfg.validate();
    const double mu = cfg.mu();
    const double lid = gamma_opt(mu);
    const int n_real = cfg.variance_model == VarianceModel::symmetric_unit ? 1 : cfg.n_realizations;
    const std::size_t n_snr = cfg.snr_db_grid.size();
    const std::size_t n_sch = cfg.schemes.size();
    const std::size_t per_real = n_snr * n_sch;

    std::vector<double> caps(static_cast<std::size_t>(n_real) * per_real);

    const auto work = [&](int r) {
        const NetworkStats net = draw_network(cfg, r);
        double* out = caps.data() + static_cast<std::size_t>(r) * per_real;
        for (std::size_t k = 0; k < n_snr; ++k) {
            const PowerBudget budget{cfg.gamma_r(cfg.snr_db_grid[k]), mu};
            for (std::size_t j = 0; j < n_sch; ++j) {
                const Scheme s = cfg.schemes[j];
                const Allocation alloc = allocate_scheme(s, net, budget, lid);
                out[k * n_sch + j] = capacity(scheme_snr(s, net, alloc), net.size());
            }
        }
    };

    const int workers = std::clamp(jobs, 1, n_real);
    if (workers == 1) {
        for (int r = 0; r < n_real; ++r) work(r);
    } else {
        std::atomic<int> next{0};
        std::vector<std::exception_ptr> failures(static_cast<std::size_t>(workers));
        {
            std::vector<std::jthread> pool;
            for (int w = 0; w < workers; ++w) {
                pool.emplace_back([&, w] {
                    try {
                        for (int r = next++; r < n_real; r = next++) work(r);
                    } catch (...) {
                        failures[static_cast<std::size_t>(w)] = std::current_exception();
                        next = n_real;
                    }
                });
            }
        }
        for (const auto& f : failures) {
            if (f) std::rethrow_exception(f);
        }
    }

    SweepResult res;
    res.metadata.gamma_opt_db = linear_to_db(lid);
    res.metadata.seed = cfg.master_seed;
    for (std::size_t k = 0; k < n_snr; ++k) {
        for (std::size_t j = 0; j < n_sch; ++j) {
            double sum = 0.0;
            for (int r = 0; r < n_real; ++r) sum += caps[static_cast<std::size_t>(r) * per_real + k * n_sch + j];
            const double mean = sum / n_real;
            double ss = 0.0;
            for (int r = 0; r < n_real; ++r) {
                const double d = caps[static_cast<std::size_t>(r) * per_real + k * n_sch + j] - mean;
                ss += d * d;
            }
            const double sd = n_real > 1 ? std::sqrt(ss / (n_real - 1)) : 0.0;
            res.rows.push_back({cfg.snr_db_grid[k], cfg.schemes[j], mean, sd, n_real});
        }
    }
    return res;
}

std::vector<BussgangRow> run_bussgang_validation(const std::vector<double>& gamma_grid,
                                                 double mu, int n_samples, const RngStream& rng,
                                                 double a_sat) {
    if (n_samples < 100000) throw domain_error("run_bussgang_validation: need >= 10^5 samples");
    if (!(mu > 0.0)) throw domain_error("run_bussgang_validation: mu must be > 0");
    const PaParams pa = PaParams::normalized(a_sat);
    const double n0 = mu * a_sat * a_sat;

    std::vector<BussgangRow> rows;
    for (std::size_t idx = 0; idx < gamma_grid.size(); ++idx) {
        const double gamma = gamma_grid[idx];
        const NormalizedPoint pt{gamma, mu};
        const double power = gamma * a_sat * a_sat;
        const BussgangParams closed = bussgang_params(pt, pa);

        RngStream stream(rng.master_seed(), idx);
        RngStream replay = stream;
        const EmpiricalBussgang emp = empirical_bussgang(pa, power, stream, n_samples);

        // Decorrelation of the closed-form alpha on the same draws.
        std::complex<long double> sum_z = 0.0L;
        long double sum_z2 = 0.0L;
        for (int k = 0; k < n_samples; ++k) {
            const complex x = sample_complex_gaussian(replay, power);
            const complex z = std::conj(x) * (apply_pa(pa, x) - closed.alpha * x);
            sum_z += std::complex<long double>(z);
            sum_z2 += std::norm(z);
        }
        const long double n = n_samples;
        const std::complex<long double> mean_z = sum_z / n;
        const double orth = static_cast<double>(std::abs(mean_z));
        const double orth_se = std::sqrt(
            std::max(0.0, static_cast<double>(sum_z2 / n - std::norm(mean_z))) / n_samples);

        BussgangRow row;
        row.gamma = gamma;
        row.alpha_closed = closed.alpha.real();
        row.alpha_empirical = emp.params.alpha.real();
        row.alpha_stderr = emp.alpha_stderr;
        row.sigma_d_sq_closed = closed.sigma_d_sq;
        row.sigma_d_sq_empirical = emp.params.sigma_d_sq;
        row.sigma_d_sq_stderr = emp.sigma_d_sq_stderr;
        row.rho_closed = rho(pt);
        row.rho_empirical = rho_from_moments(emp.mean_input_power, n0,
                                             emp.params.alpha.real() * emp.mean_input_power,
                                             emp.mean_output_power);
        row.orthogonality = orth;
        row.orthogonality_stderr = orth_se;
        // The sample standard errors move with the estimates when few
        // samples clip, so the test uses the spread the closed form implies.
        const BussgangSpread spread = bussgang_spread(pt, pa);
        row.orthogonality_stderr_model = std::sqrt(spread.score_var / n_samples);
        row.alpha_stderr_model = row.orthogonality_stderr_model / power;
        row.sigma_d_sq_stderr_model = std::sqrt(spread.distortion_power_var / n_samples);
        // Deep in the linear region no sample clips and every spread is
        // exponentially small; the floor absorbs roundoff.
        const double floor = 1e-12;
        row.within_3sigma =
            std::abs(row.alpha_empirical - row.alpha_closed) <= 3.0 * row.alpha_stderr_model + floor &&
            std::abs(row.sigma_d_sq_empirical - row.sigma_d_sq_closed) <=
                3.0 * row.sigma_d_sq_stderr_model + floor * power &&
            orth <= 3.0 * row.orthogonality_stderr_model + floor * power;
        rows.push_back(row);
    }
    return rows;
}

std::vector<SerRow> run_ser_study(const SweepConfig& cfg, long long n_symbols,
                                  const ReceiverOptions& options) {
    cfg.validate();
    if (n_symbols < 10000) throw domain_error("run_ser_study: need >= 10^4 symbols");
    const double mu = cfg.mu();
    const double lid = gamma_opt(mu);
    const NetworkStats net = draw_network(cfg, 0);
    const PaParams pa = PaParams::normalized(cfg.a_sat);

    ReceiverOptions aware = options;
    aware.distortion_aware = true;
    ReceiverOptions naive = options;
    naive.distortion_aware = false;

    std::vector<SerRow> rows;
    for (std::size_t k = 0; k < cfg.snr_db_grid.size(); ++k) {
        const double snr_db = cfg.snr_db_grid[k];
        const Allocation alloc = allocate_proposed(net, PowerBudget{cfg.gamma_r(snr_db), mu}, lid);
        const RngStream base(cfg.master_seed, (1ULL << 32) + k);
        RngStream ra = base;
        RngStream rn = base;
        const double ser_a = receiver_pipeline(net, alloc, pa, n_symbols, ra, aware);
        const double ser_n = receiver_pipeline(net, alloc, pa, n_symbols, rn, naive);
        rows.push_back({snr_db, ser_a, ser_n, n_symbols});
    }
    return rows;
}

}  // namespace afrelay
