#pragma once

#include <span>
#include <string_view>
#include <vector>

#include "afrelay/pa_model.hpp"

namespace afrelay {

/// Statistical description of one source -> relay -> destination hop.
struct LinkStats {
    double var_sr = 1.0;    // source -> relay channel variance
    double var_rd = 1.0;    // relay -> destination channel variance
    double p_source = 1.0;  // source transmit power
    double n0 = 1.0;        // receiver noise power (relays and destination)

    /// Variances may be zero (the relay then never forwards); p_source and
    /// n0 must be positive.
    void validate() const;
    /// True when var_sr * var_rd > 0.
    bool has_gain() const { return var_sr * var_rd > 0.0; }
};

/// Coefficients of Gamma = A / (B + rho * C).
struct SnrCoefficients {
    double a;  // P_s var_sr var_rd
    double b;  // var_rd N0
    double c;  // P_s var_sr + N0

    static SnrCoefficients of(const LinkStats& link);
};

struct NetworkStats {
    std::vector<LinkStats> links;
    double a_sat = 1.0;

    std::size_t size() const { return links.size(); }
    /// Normalized noise power N0 / A_sat^2.
    double mu() const;
    /// Non-empty; every link valid; links share p_source and n0.
    void validate() const;

    /// N identical links with the given variances.
    static NetworkStats symmetric(std::size_t n, double var, double p_source, double n0,
                                  double a_sat);
};

/// Average SNR of one hop, P_s var_sr var_rd / (var_rd N0 + rho (P_s var_sr + N0)).
double snr_link(const LinkStats& link, double rho_val);

/// MRC SNR: sum of per-hop SNRs under the soft-limiter distortion.  A relay
/// with gamma = 0 does not forward and contributes nothing.
double snr_total(const NetworkStats& net, std::span<const double> gammas);

/// Same sum with an ideal linear amplifier, rho = mu / gamma.
double snr_total_linear(const NetworkStats& net, std::span<const double> gammas);

/// Capacity in bit/s/Hz over the N+1 slot frame (one broadcast slot plus one
/// slot per relay): log2(1 + snr) / (N + 1).
double capacity(double snr_total, std::size_t n_relays);

inline constexpr std::string_view kCapacityFormulaId = "log2(1+snr_total)/(n_relays+1)";

}  // namespace afrelay
