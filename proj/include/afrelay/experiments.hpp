#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "afrelay/allocator.hpp"
#include "afrelay/receiver.hpp"

namespace afrelay {

enum class Scheme { lpa_twf, nlpa_twf, nlpa_epa, nlpa_proposed };

inline constexpr Scheme kAllSchemes[] = {Scheme::lpa_twf, Scheme::nlpa_twf, Scheme::nlpa_epa,
                                         Scheme::nlpa_proposed};

std::string_view scheme_name(Scheme s);
std::optional<Scheme> parse_scheme(std::string_view name);

enum class VarianceModel { symmetric_unit, uniform };

class config_error : public std::runtime_error {
public:
    config_error(const std::string& what, int line = 0)
        : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ": " + what : what),
          line_(line) {}
    int line() const { return line_; }

private:
    int line_;
};

struct SweepConfig {
    int n_relays = 4;
    double p_source = 1.0;
    double n0_db = -15.0;
    double a_sat = 1.0;
    std::vector<double> snr_db_grid;  // relay network SNR P_r / N0 in dB
    std::vector<Scheme> schemes{std::begin(kAllSchemes), std::end(kAllSchemes)};
    VarianceModel variance_model = VarianceModel::symmetric_unit;
    double variance_lo = 0.5;
    double variance_hi = 1.5;
    int n_realizations = 1000;
    std::uint64_t master_seed = 1;

    /// Defaults with the 0:1:30 dB grid.
    static SweepConfig defaults();
    static std::vector<double> grid(double lo, double hi, double step);

    double n0() const { return db_to_linear(n0_db); }
    double mu() const { return n0() / (a_sat * a_sat); }
    /// gamma_r = P_r / A_sat^2 with P_r = N0 10^(snr_db / 10).
    double gamma_r(double snr_db) const { return mu() * db_to_linear(snr_db); }

    /// Throws config_error on an invariant violation.
    void validate() const;
};

struct SweepRow {
    double snr_db;
    Scheme scheme;
    double capacity_mean;
    double capacity_std;
    int n_realizations;

    bool operator==(const SweepRow&) const = default;
};

struct SweepMetadata {
    double gamma_opt_db = 0.0;
    std::string capacity_formula_id{kCapacityFormulaId};
    std::string averaging = "mean of per-realization capacity";
    std::uint64_t seed = 0;
};

struct SweepResult {
    std::vector<SweepRow> rows;  // grid-major, schemes in configured order
    SweepMetadata metadata;

    /// Row for (snr_db, scheme); throws std::out_of_range when absent.
    const SweepRow& at(double snr_db, Scheme scheme) const;
};

/// Channel variances of one realization: symmetric networks are all ones,
/// uniform networks draw var_sr then var_rd for each relay from its own
/// RngStream(master_seed, realization).
NetworkStats draw_network(const SweepConfig& cfg, int realization);

/// Allocation of one scheme, and the SNR under that scheme's amplifier physics.
Allocation allocate_scheme(Scheme s, const NetworkStats& net, const PowerBudget& budget,
                           double lid);
double scheme_snr(Scheme s, const NetworkStats& net, const Allocation& alloc);

/// Four-scheme capacity sweep.  Realizations are shared out over `jobs`
/// worker threads; results are reduced in realization order so the output
/// does not depend on the thread count.
SweepResult run_sweep(const SweepConfig& cfg, int jobs = 1);

struct BussgangRow {
    double gamma;
    double alpha_closed;
    double alpha_empirical;
    double alpha_stderr;
    double sigma_d_sq_closed;
    double sigma_d_sq_empirical;
    double sigma_d_sq_stderr;
    double rho_closed;
    double rho_empirical;  // from sample moments
    double orthogonality;  // |mean(x^* (F_A(x) - alpha_closed x))|
    double orthogonality_stderr;
    // Standard errors implied by the closed-form model; within_3sigma tests
    // against these.
    double alpha_stderr_model;
    double sigma_d_sq_stderr_model;
    double orthogonality_stderr_model;
    bool within_3sigma;
};

/// Empirical against closed-form Bussgang parameters on a grid of drive
/// powers.  Each grid point draws from RngStream(rng.master_seed(), index).
std::vector<BussgangRow> run_bussgang_validation(const std::vector<double>& gamma_grid,
                                                 double mu, int n_samples, const RngStream& rng,
                                                 double a_sat = 1.0);

struct SerRow {
    double snr_db;
    double ser_aware;
    double ser_naive;
    long long symbols;
};

/// SER of the distortion-aware and naive (alpha = 1, sigma_d^2 = 0)
/// receivers under the proposed allocation.  Both receivers of a grid point
/// replay the same RngStream, so the comparison uses common random numbers.
/// The network is realization 0 of the configured variance model.
std::vector<SerRow> run_ser_study(const SweepConfig& cfg, long long n_symbols,
                                  const ReceiverOptions& options = {});

}  // namespace afrelay
