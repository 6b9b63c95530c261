#pragma once

// Reference computations for the test suites.  Nothing here calls into the
// allocator or the closed-form moments; the oracles only share the model
// definitions (soft-limiter curve, per-hop SNR) with the code under test.

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <vector>

#include "afrelay/link_model.hpp"
#include "afrelay/pa_model.hpp"

namespace oracle {

namespace detail {

inline double simpson_step(const std::function<double(double)>& f, double a, double b, double fa,
                           double fm, double fb, double whole, double tol, int depth) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m);
    const double rm = 0.5 * (m + b);
    const double flm = f(lm);
    const double frm = f(rm);
    const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    const double delta = left + right - whole;
    if (depth <= 0 || std::abs(delta) <= 15.0 * tol) return left + right + delta / 15.0;
    return simpson_step(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
           simpson_step(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

}  // namespace detail

/// Adaptive Simpson quadrature with Richardson correction.
inline double integrate(const std::function<double(double)>& f, double a, double b, double tol,
                        int max_depth = 50) {
    // Pre-split into panels so narrow features are not skipped.
    constexpr int panels = 64;
    const double h = (b - a) / panels;
    double total = 0.0;
    for (int k = 0; k < panels; ++k) {
        const double lo = a + k * h;
        const double hi = (k == panels - 1) ? b : lo + h;
        const double fa = f(lo), fb = f(hi), fm = f(0.5 * (lo + hi));
        const double whole = (hi - lo) / 6.0 * (fa + 4.0 * fm + fb);
        total += detail::simpson_step(f, lo, hi, fa, fm, fb, whole, tol / panels, max_depth);
    }
    return total;
}

/// erfc from its defining integral; the tail beyond t + 12 is below 1e-60.
inline double erfc_quadrature(double t) {
    const double v = integrate([](double x) { return std::exp(-x * x); }, t, t + 12.0, 1e-17);
    return 2.0 / std::sqrt(std::numbers::pi) * v;
}

struct RayleighMoments {
    double cross;  // E{x^* F_A(x)}
    double out;    // E{|F_A(x)|^2}
};

/// Moments of the soft limiter for x ~ CN(0, power) by integrating over the
/// Rayleigh amplitude density 2r/P exp(-r^2/P).
inline RayleighMoments rayleigh_moments(double power, double a_sat) {
    const auto pdf = [power](double r) { return 2.0 * r / power * std::exp(-r * r / power); };
    const auto limiter = [a_sat](double r) { return std::min(r, a_sat); };
    const double r_max = std::sqrt(power * 800.0);
    const auto cross_f = [&](double r) { return r * limiter(r) * pdf(r); };
    const auto out_f = [&](double r) { return limiter(r) * limiter(r) * pdf(r); };
    const double tol = 1e-14 * std::max(power, 1e-300);
    RayleighMoments m{};
    if (r_max <= a_sat) {
        m.cross = integrate(cross_f, 0.0, r_max, tol);
        m.out = integrate(out_f, 0.0, r_max, tol);
    } else {
        m.cross = integrate(cross_f, 0.0, a_sat, tol) + integrate(cross_f, a_sat, r_max, tol);
        m.out = integrate(out_f, 0.0, a_sat, tol) + integrate(out_f, a_sat, r_max, tol);
    }
    return m;
}

/// Plain bisection for an increasing function.
inline double bisect_increasing(const std::function<double(double)>& f, double target, double lo,
                                double hi) {
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        if (f(mid) < target) lo = mid; else hi = mid;
    }
    return 0.5 * (lo + hi);
}

/// Single-hop SNR under the soft limiter, gamma = 0 silent.
inline double hop_snr(const afrelay::LinkStats& link, double gamma, double mu) {
    if (gamma <= 0.0) return 0.0;
    return afrelay::snr_link(link, afrelay::rho(afrelay::NormalizedPoint{gamma, mu}));
}

/// Drive power whose limiter output power is p (p < 1 in A_sat^2 units).
inline double drive_for_power(double p, double lid) {
    if (p <= 0.0) return 0.0;
    return bisect_increasing([](double g) { return afrelay::g_constraint(g); }, p, 0.0,
                             std::max(lid, 1.0) * 4.0);
}

/// Brute-force maximum of sum Gamma_i over {sum g(gamma_i) <= gamma_r,
/// 0 <= gamma_i <= lid} for two relays: grid gamma_1 with `step` and give
/// relay 2 the remaining budget (capped at the lid).  The objective is
/// non-decreasing below the lid, so the best point of each grid column sits
/// on the budget boundary.
struct GridResult {
    double best;
    double gamma1;
    double gamma2;
};

inline GridResult grid_search_two(const afrelay::NetworkStats& net, double gamma_r, double mu,
                                  double lid, double step) {
    GridResult res{-1.0, 0.0, 0.0};
    const double cap2 = afrelay::g_constraint(lid);
    for (long k = 0;; ++k) {
        const double g1 = std::min(lid, k * step);
        const double rem = gamma_r - afrelay::g_constraint(g1);
        if (rem < 0.0) break;
        const double g2 = rem >= cap2 ? lid : drive_for_power(rem, lid);
        const double v = hop_snr(net.links[0], g1, mu) + hop_snr(net.links[1], g2, mu);
        if (v > res.best) res = {v, g1, g2};
        if (g1 >= lid) break;
    }
    return res;
}

/// Golden-section maximum of a unimodal function on [a, b].
inline double golden_max(const std::function<double(double)>& f, double a, double b,
                         double* arg = nullptr) {
    const double r = (std::sqrt(5.0) - 1.0) / 2.0;
    double x1 = b - r * (b - a), x2 = a + r * (b - a);
    double f1 = f(x1), f2 = f(x2);
    for (int it = 0; it < 200 && b - a > 1e-15; ++it) {
        if (f1 < f2) {
            a = x1; x1 = x2; f1 = f2; x2 = a + r * (b - a); f2 = f(x2);
        } else {
            b = x2; x2 = x1; f2 = f1; x1 = b - r * (b - a); f1 = f(x1);
        }
    }
    const double x = 0.5 * (a + b);
    if (arg) *arg = x;
    return std::max({f(x), f1, f2});
}

/// Refined brute-force optimum in actual-power coordinates p_i = g(gamma_i),
/// where every per-relay SNR is concave.  Recursive over relays with a
/// grid bracket then golden-section refinement; for 1..3 relays.
inline double best_total_snr(const afrelay::NetworkStats& net, std::size_t first, double budget,
                             double mu, double lid) {
    const double cap = afrelay::g_constraint(lid);
    const std::size_t n = net.size() - first;
    if (n == 0) return 0.0;
    if (n == 1) return hop_snr(net.links[first], drive_for_power(std::min(budget, cap), lid), mu);
    const double hi = std::min(budget, cap);
    const auto value = [&](double p) {
        const double g = p >= cap ? lid : drive_for_power(p, lid);
        return hop_snr(net.links[first], g, mu) +
               best_total_snr(net, first + 1, budget - p, mu, lid);
    };
    // coarse grid to find the bracket, then refine
    constexpr int coarse = 40;
    int best_k = 0;
    double best_v = -1.0;
    for (int k = 0; k <= coarse; ++k) {
        const double v = value(hi * k / coarse);
        if (v > best_v) { best_v = v; best_k = k; }
    }
    const double a = hi * std::max(0, best_k - 1) / coarse;
    const double b = hi * std::min(coarse, best_k + 1) / coarse;
    return std::max(best_v, golden_max(value, a, b));
}

}  // namespace oracle
