#include "afrelay/pa_model.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace afrelay {

PaParams PaParams::normalized(double a_sat) {
    PaParams pa{a_sat, a_sat, 1.0, 0.0};
    pa.validate();
    return pa;
}

PaParams PaParams::general(double a_out, double gain_b, double offset_c) {
    if (!(gain_b > 0.0)) throw domain_error("PaParams: gain_b must be positive");
    PaParams pa{(a_out - offset_c) / gain_b, a_out, gain_b, offset_c};
    pa.validate();
    return pa;
}

void PaParams::validate() const {
    if (!(a_sat > 0.0) || !std::isfinite(a_sat)) {
        throw domain_error("PaParams: a_sat must be positive and finite");
    }
    if (!(gain_b > 0.0)) throw domain_error("PaParams: gain_b must be positive");
    const double knee = (a_out - offset_c) / gain_b;
    if (std::abs(knee - a_sat) > 1e-12 * std::max(1.0, a_sat)) {
        throw domain_error("PaParams: a_sat must equal (a_out - offset_c) / gain_b");
    }
}

bool PaParams::is_normalized() const {
    return gain_b == 1.0 && offset_c == 0.0 && a_out == a_sat;
}

double am_am(const PaParams& pa, double amplitude) {
    if (!(amplitude >= 0.0)) throw domain_error("am_am: amplitude must be >= 0");
    if (amplitude <= pa.a_sat) return pa.gain_b * amplitude + pa.offset_c;
    return pa.a_out;
}

complex apply_pa(const PaParams& pa, complex sample) {
    const double mag = std::abs(sample);
    if (mag == 0.0) {
        // arg(0) is undefined; a nonzero offset_c still produces output
        return {am_am(pa, 0.0), 0.0};
    }
    if (mag <= pa.a_sat && pa.gain_b == 1.0 && pa.offset_c == 0.0) return sample;
    return sample * (am_am(pa, mag) / mag);
}

namespace {

void require_closed_form(const NormalizedPoint& pt, const PaParams& pa, const char* who) {
    if (!(pt.gamma > 0.0)) throw domain_error(std::string(who) + ": gamma must be > 0");
    pa.validate();
    if (!pa.is_normalized()) {
        throw domain_error(std::string(who) +
                           ": closed form covers b = 1, c = 0, A_0 = A_sat only; "
                           "use empirical_bussgang for other amplifiers");
    }
}

}  // namespace

LimiterTerms LimiterTerms::at(double gamma) {
    if (gamma == 0.0) return {0.0, 1.0, 0.0, 0.0, 0.0, 1.0};
    const double u = 1.0 / gamma;
    const double e = -std::expm1(-u);
    const double tail = 0.5 * std::sqrt(std::numbers::pi * gamma) * erfc(std::sqrt(u));
    const double cross = gamma * e + tail;
    // g - cross^2/gamma expanded so that the exponentially small terms of
    // the linear region do not cancel against O(gamma) terms.
    const double distortion =
        std::max(0.0, gamma * e * std::exp(-u) - 2.0 * e * tail - tail * tail / gamma);
    const double q = std::max(1.0, gamma / cross);
    return {gamma, e, tail, cross, distortion, q};
}

double moment_cross(const NormalizedPoint& pt, const PaParams& pa) {
    require_closed_form(pt, pa, "moment_cross");
    return pa.a_sat * pa.a_sat * LimiterTerms::at(pt.gamma).cross;
}

double moment_out(const NormalizedPoint& pt, const PaParams& pa) {
    require_closed_form(pt, pa, "moment_out");
    return pa.a_sat * pa.a_sat * g_constraint(pt.gamma);
}

double g_constraint(double gamma) {
    if (!(gamma >= 0.0)) throw domain_error("g_constraint: gamma must be >= 0");
    if (gamma == 0.0) return 0.0;
    return -gamma * std::expm1(-1.0 / gamma);
}

double g_constraint_derivative(double gamma) {
    if (!(gamma >= 0.0)) throw domain_error("g_constraint_derivative: gamma must be >= 0");
    if (gamma == 0.0) return 1.0;
    const double u = 1.0 / gamma;
    return -std::expm1(-u) - u * std::exp(-u);
}

BussgangParams bussgang_params(const NormalizedPoint& pt, const PaParams& pa) {
    require_closed_form(pt, pa, "bussgang_params");
    const LimiterTerms t = LimiterTerms::at(pt.gamma);
    const double alpha = t.cross / t.gamma;
    return {complex(alpha, 0.0), pa.a_sat * pa.a_sat * t.distortion};
}

EmpiricalBussgang empirical_bussgang(const PaParams& pa, double power, RngStream& rng,
                                     int n_samples) {
    if (!(power > 0.0)) throw domain_error("empirical_bussgang: power must be > 0");
    if (n_samples < 10000) throw domain_error("empirical_bussgang: need at least 10^4 samples");
    pa.validate();

    RngStream replay = rng;

    std::complex<long double> sum_cross = 0.0L;
    long double sum_in = 0.0L;
    long double sum_out = 0.0L;
    for (int k = 0; k < n_samples; ++k) {
        const complex x = sample_complex_gaussian(rng, power);
        const complex y = apply_pa(pa, x);
        sum_cross += std::complex<long double>(std::conj(x) * y);
        sum_in += std::norm(x);
        sum_out += std::norm(y);
    }
    const complex alpha(static_cast<double>(sum_cross.real() / sum_in),
                        static_cast<double>(sum_cross.imag() / sum_in));

    // Second pass over the same draws for the residual statistics.
    const double ratio = alpha.real();
    long double sum_d = 0.0L;
    long double sum_d_sq = 0.0L;
    long double sum_ratio_resid_sq = 0.0L;
    for (int k = 0; k < n_samples; ++k) {
        const complex x = sample_complex_gaussian(replay, power);
        const complex y = apply_pa(pa, x);
        const double d = std::norm(y - alpha * x);
        sum_d += d;
        sum_d_sq += static_cast<long double>(d) * d;
        const double r = (std::conj(x) * y).real() - ratio * std::norm(x);
        sum_ratio_resid_sq += static_cast<long double>(r) * r;
    }

    const long double n = n_samples;
    const double mean_in = static_cast<double>(sum_in / n);
    const double mean_d = static_cast<double>(sum_d / n);
    const double var_d = std::max(0.0, static_cast<double>(sum_d_sq / n) - mean_d * mean_d);

    EmpiricalBussgang out;
    out.params = {alpha, mean_d};
    out.alpha_stderr = std::sqrt(static_cast<double>(sum_ratio_resid_sq / n) / n) / mean_in;
    out.sigma_d_sq_stderr = std::sqrt(var_d / n_samples);
    out.mean_input_power = mean_in;
    out.mean_output_power = static_cast<double>(sum_out / n);
    out.n_samples = n_samples;
    return out;
}

namespace {

// Truncated moments of the Rayleigh amplitude r with E{r^2} = gamma:
// below(m) = E{r^m; r < 1}, above(m) = E{r^m; r >= 1}, for m = 0..4.
// E{r^m; r >= 1} = gamma^(m/2) Gamma(m/2 + 1, 1/gamma), built from
// Gamma(1, x) = e^-x and Gamma(1/2, x) = sqrt(pi) erfc(sqrt(x)).
struct RayleighTruncated {
    double below[5];
    double above[5];
};

RayleighTruncated rayleigh_truncated(double gamma) {
    const double x = 1.0 / gamma;
    const double ex = std::exp(-x);
    double up_half = std::sqrt(std::numbers::pi) * erfc(std::sqrt(x));  // Gamma(1/2, x)
    double lo_half = std::sqrt(std::numbers::pi) * std::erf(std::sqrt(x));
    double up_int = ex;                                                // Gamma(1, x)
    double lo_int = -std::expm1(-x);

    // Upper and lower incomplete gamma for s = 1, 1.5, 2, 2.5, 3.
    double up[5], lo[5];
    up[0] = up_int;
    lo[0] = lo_int;
    up_half = 0.5 * up_half + std::sqrt(x) * ex;  // s = 3/2
    lo_half = 0.5 * lo_half - std::sqrt(x) * ex;
    up[1] = up_half;
    lo[1] = lo_half;
    for (int m = 2; m <= 4; ++m) {
        const double s = m / 2.0;  // step from s to s + 1
        const double xs = std::pow(x, s);
        up[m] = s * up[m - 2] + xs * ex;
        lo[m] = s * lo[m - 2] - xs * ex;
    }
    RayleighTruncated t{};
    for (int m = 0; m <= 4; ++m) {
        const double scale = std::pow(gamma, m / 2.0);
        t.above[m] = scale * up[m];
        t.below[m] = scale * std::max(0.0, lo[m]);
    }
    return t;
}

}  // namespace

BussgangSpread bussgang_spread(const NormalizedPoint& pt, const PaParams& pa) {
    require_closed_form(pt, pa, "bussgang_spread");
    const LimiterTerms lt = LimiterTerms::at(pt.gamma);
    const double a = lt.cross / lt.gamma;
    const RayleighTruncated t = rayleigh_truncated(pt.gamma);
    const double c = 1.0 - a;

    // Below saturation the residual is (1 - alpha) r; above it is 1 - alpha r.
    const double e_z2 = c * c * t.below[4] +
                        (t.above[2] - 2.0 * a * t.above[3] + a * a * t.above[4]);
    const double e_d4 = c * c * c * c * t.below[4] +
                        (t.above[0] - 4.0 * a * t.above[1] + 6.0 * a * a * t.above[2] -
                         4.0 * a * a * a * t.above[3] + a * a * a * a * t.above[4]);
    const double s2 = pa.a_sat * pa.a_sat;
    return {std::max(0.0, e_z2) * s2 * s2,
            std::max(0.0, e_d4 - lt.distortion * lt.distortion) * s2 * s2};
}

double rho(const NormalizedPoint& pt) {
    if (!(pt.gamma > 0.0)) throw domain_error("rho: gamma must be > 0");
    if (!(pt.mu > 0.0)) throw domain_error("rho: mu must be > 0");
    const LimiterTerms t = LimiterTerms::at(pt.gamma);
    return t.q * t.q * (pt.mu + t.distortion) / pt.gamma;
}

double rho_from_moments(double power, double n0, double cross, double out) {
    if (!(power > 0.0) || !(cross > 0.0)) {
        throw domain_error("rho_from_moments: power and cross moment must be > 0");
    }
    return power * (out + n0) / (cross * cross) - 1.0;
}

}  // namespace afrelay
