#pragma once

// Ideal soft-limiter amplifier (ISLA) and its Bussgang linearization.
//
// Normalized quantities throughout: gamma = P / A_sat^2 is the drive power
// of the amplifier input, mu = N0 / A_sat^2 the noise power on the same
// scale.  Closed-form moments assume a zero-mean circular complex Gaussian
// input, which holds for the relay's scaled received signal.

#include "afrelay/numerics.hpp"

namespace afrelay {

struct PaParams {
    double a_sat = 1.0;     // input saturation amplitude
    double a_out = 1.0;     // output saturation amplitude
    double gain_b = 1.0;    // linear-region slope
    double offset_c = 0.0;  // linear-region offset

    /// Unit-slope, zero-offset limiter with A_0 = A_sat.
    static PaParams normalized(double a_sat = 1.0);
    /// General ISLA; a_sat is derived as (a_out - offset_c) / gain_b.
    static PaParams general(double a_out, double gain_b, double offset_c);

    /// Throws domain_error unless a_sat > 0 and a_sat = (a_out - c) / b.
    void validate() const;
    /// True for the parameterization that the closed forms cover.
    bool is_normalized() const;
};

struct BussgangParams {
    complex alpha;      // linear scale factor
    double sigma_d_sq;  // distortion variance
};

struct NormalizedPoint {
    double gamma;
    double mu;
};

/// AM/AM characteristic: b*|x| + c below A_sat, A_0 above.
double am_am(const PaParams& pa, double amplitude);

/// Memoryless amplifier output; the ISLA has no AM/PM term so the phase of
/// the input is preserved.
complex apply_pa(const PaParams& pa, complex sample);

/// E{x* F_A(x)} for x ~ CN(0, gamma * A_sat^2).
double moment_cross(const NormalizedPoint& pt, const PaParams& pa);

/// Mean output power E{|F_A(x)|^2} for x ~ CN(0, gamma * A_sat^2).
double moment_out(const NormalizedPoint& pt, const PaParams& pa);

/// g(gamma) = gamma * (1 - exp(-1/gamma)), with g(0) = 0.  This is the
/// actual transmit power in units of A_sat^2.
double g_constraint(double gamma);

/// Derivative of g_constraint.
double g_constraint_derivative(double gamma);

/// Closed-form Bussgang parameters (alpha, sigma_d^2).
BussgangParams bussgang_params(const NormalizedPoint& pt, const PaParams& pa);

struct EmpiricalBussgang {
    BussgangParams params;
    double alpha_stderr = 0.0;       // delta-method standard error of alpha
    double sigma_d_sq_stderr = 0.0;  // standard error of the residual power
    double mean_input_power = 0.0;   // sample E{|x|^2}
    double mean_output_power = 0.0;  // sample E{|F_A(x)|^2}
    int n_samples = 0;
};

/// Sample-based Bussgang parameters from n_samples draws of
/// x ~ CN(0, power) pushed through apply_pa.
EmpiricalBussgang empirical_bussgang(const PaParams& pa, double power, RngStream& rng,
                                     int n_samples);

/// Per-sample variances of the statistics behind empirical_bussgang, under
/// the closed-form model: z = Re(x^* F_A(x)) - alpha |x|^2 (whose mean
/// gives alpha and the orthogonality residual) and |d|^2 with
/// d = F_A(x) - alpha x.  Dividing by n gives the sampling variance of a
/// mean over n draws.
struct BussgangSpread {
    double score_var;
    double distortion_power_var;
};

BussgangSpread bussgang_spread(const NormalizedPoint& pt, const PaParams& pa);

/// Per-point quantities shared by rho, phi and the Bussgang parameters.
/// All values are normalized by A_sat^2.
struct LimiterTerms {
    double gamma;
    double e;           // 1 - exp(-1/gamma)
    double tail;        // sqrt(pi*gamma)/2 * erfc(1/sqrt(gamma))
    double cross;       // gamma*e + tail, normalized E{x* F_A}
    double distortion;  // normalized sigma_d^2, always >= 0
    double q;           // gamma / cross, clamped to >= 1

    static LimiterTerms at(double gamma);
};

/// Normalized distortion-to-signal ratio rho(gamma, mu):
///   rho + 1 = [g(gamma) + mu] / [sqrt(gamma)(1-e^{-1/gamma}) + sqrt(pi)/2 erfc(1/sqrt(gamma))]^2
/// Computed as q^2 (mu + distortion) / gamma, which never drops below the
/// linear-amplifier value mu / gamma, even after rounding.
double rho(const NormalizedPoint& pt);

/// rho from unnormalized moments: P (E{|F_A|^2} + N0) / |E{x* F_A}|^2 - 1.
double rho_from_moments(double power, double n0, double cross, double out);

/// rho for an ideal linear amplifier, N0 / P = mu / gamma.
inline double rho_linear(const NormalizedPoint& pt) { return pt.mu / pt.gamma; }

}  // namespace afrelay
