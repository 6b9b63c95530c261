#pragma once

// Relay power allocation under a total relay power budget.
//
// The proposed scheme maximizes sum_i Gamma_i(gamma_i) subject to
// sum_i g(gamma_i) <= gamma_r and 0 <= gamma_i <= gamma_opt(mu), where g is
// the limiter's actual output power.  Its solution is a water-filling with
// a floor at zero and a lid at gamma_opt: gamma_i = clip(Phi_i^-1(lambda)),
// Phi_i being the marginal SNR per unit of actual transmit power.

#include <limits>
#include <map>
#include <mutex>
#include <vector>

#include "afrelay/link_model.hpp"

namespace afrelay {

struct PowerBudget {
    double gamma_r;  // P_r / A_sat^2
    double mu;       // N0 / A_sat^2

    void validate() const;
};

struct Allocation {
    std::vector<double> gammas;
    double lambda_level = 0.0;
    bool budget_active = false;
    /// Upper bound applied to every gamma_i; +inf for the baselines, which
    /// ignore the distortion lid.
    double gamma_opt_used = std::numeric_limits<double>::infinity();
};

/// Drive power that maximizes the single-hop SNR: the unique root of
///   2 mu = sqrt(pi gamma) erfc(1 / sqrt(gamma)).
/// Independent of channel statistics.
double gamma_opt(double mu);

/// Memoized gamma_opt keyed on mu.  Results are identical to gamma_opt;
/// the table only saves the root solve.
class GammaOptTable {
public:
    double lookup(double mu);

private:
    std::mutex mutex_;
    std::map<double, double> cache_;
};

/// Marginal value dGamma_i/dg at drive power gamma in (0, gamma_opt(mu)).
double phi(double gamma, const LinkStats& link, double mu);

/// Phi without range checks, defined on [0, gamma_opt] with its limit
/// A / (mu C) at gamma = 0.
double phi_unchecked(double gamma, const SnrCoefficients& k, double mu);

/// Inverse of phi, clipped to [0, lid]: 0 when lambda_level >= Phi(0),
/// lid when lambda_level is at or below Phi(lid).
double phi_inverse(double lambda_level, const LinkStats& link, double mu);
double phi_inverse(double lambda_level, const SnrCoefficients& k, double mu, double lid);

/// Distortion-aware allocation with the gamma_opt lid.
Allocation allocate_proposed(const NetworkStats& net, const PowerBudget& budget);
/// Same, with a precomputed lid (must equal gamma_opt(budget.mu)).
Allocation allocate_proposed(const NetworkStats& net, const PowerBudget& budget, double lid);

/// Equal split of the input power, gamma_i = gamma_r / N.
Allocation allocate_equal(const NetworkStats& net, const PowerBudget& budget);

/// Classical water-filling for a linear amplifier (rho = mu / gamma) with
/// sum_i gamma_i = gamma_r.  Solved exactly on the active set.
Allocation allocate_twf_linear(const NetworkStats& net, const PowerBudget& budget);

/// Total SNR of an allocation under the soft limiter (pa_linear = false) or
/// an ideal linear amplifier (pa_linear = true).
double evaluate_scheme(const NetworkStats& net, const Allocation& alloc, bool pa_linear);

}  // namespace afrelay
