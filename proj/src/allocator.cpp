#include "afrelay/allocator.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace afrelay {

namespace {
// Bracket width below any representable spacing: iterate to adjacent doubles.
constexpr double kFullPrecision = std::numeric_limits<double>::denorm_min();
}  // namespace

void PowerBudget::validate() const {
    if (!(gamma_r > 0.0) || !std::isfinite(gamma_r)) {
        throw domain_error("PowerBudget: gamma_r must be positive and finite");
    }
    if (!(mu > 0.0) || !std::isfinite(mu)) {
        throw domain_error("PowerBudget: mu must be positive and finite");
    }
}

double gamma_opt(double mu) {
    if (!(mu > 0.0) || !std::isfinite(mu)) throw domain_error("gamma_opt: mu must be > 0");
    // 2 mu - sqrt(pi gamma) erfc(1/sqrt(gamma)) falls strictly from 2 mu at
    // gamma = 0 to -infinity.
    const auto stationarity = [mu](double gamma) {
        return 2.0 * (mu - LimiterTerms::at(gamma).tail);
    };
    double hi = 1.0;
    while (stationarity(hi) >= 0.0) {
        hi *= 2.0;
        if (hi > 1e300) throw convergence_error("gamma_opt: no bracketed root");
    }
    return solve_monotone(stationarity, 0.0, Bracket{0.0, hi, 1e-16, 400});
}

double GammaOptTable::lookup(double mu) {
    std::lock_guard lock(mutex_);
    if (auto it = cache_.find(mu); it != cache_.end()) return it->second;
    const double v = gamma_opt(mu);
    cache_.emplace(mu, v);
    return v;
}

double phi_unchecked(double gamma, const SnrCoefficients& k, double mu) {
    if (k.a == 0.0) return 0.0;
    // Phi = A C / (B + rho C)^2 * (-drho/dgamma) / g'(gamma), multiplied
    // through by gamma^2 so that gamma = 0 evaluates to the limit A / (mu C).
    const LimiterTerms t = LimiterTerms::at(gamma);
    const double q3 = t.q * t.q * t.q;
    const double denom = k.b * gamma + t.q * t.q * (mu + t.distortion) * k.c;
    return k.a * k.c * q3 * (mu - t.tail) / (denom * denom);
}

double phi(double gamma, const LinkStats& link, double mu) {
    link.validate();
    if (!(mu > 0.0)) throw domain_error("phi: mu must be > 0");
    const double lid = gamma_opt(mu);
    if (!(gamma > 0.0 && gamma < lid)) {
        throw domain_error("phi: gamma must lie strictly inside (0, gamma_opt(mu))");
    }
    return phi_unchecked(gamma, SnrCoefficients::of(link), mu);
}

double phi_inverse(double lambda_level, const SnrCoefficients& k, double mu, double lid) {
    if (k.a == 0.0) return 0.0;
    const double top = phi_unchecked(0.0, k, mu);
    if (lambda_level >= top) return 0.0;
    if (lambda_level <= phi_unchecked(lid, k, mu)) return lid;
    const auto f = [&](double gamma) { return phi_unchecked(gamma, k, mu); };
    return solve_monotone(f, lambda_level, Bracket{0.0, lid, kFullPrecision, 400});
}

double phi_inverse(double lambda_level, const LinkStats& link, double mu) {
    link.validate();
    if (!(lambda_level > 0.0)) throw domain_error("phi_inverse: lambda must be > 0");
    return phi_inverse(lambda_level, SnrCoefficients::of(link), mu, gamma_opt(mu));
}

namespace {

void check_inputs(const NetworkStats& net, const PowerBudget& budget) {
    net.validate();
    budget.validate();
    if (std::abs(budget.mu - net.mu()) > 1e-12 * net.mu()) {
        throw domain_error("allocation: budget.mu does not match the network's N0 / A_sat^2");
    }
}

std::vector<SnrCoefficients> coefficients(const NetworkStats& net) {
    std::vector<SnrCoefficients> ks;
    ks.reserve(net.size());
    for (const auto& l : net.links) ks.push_back(SnrCoefficients::of(l));
    return ks;
}

}  // namespace

Allocation allocate_proposed(const NetworkStats& net, const PowerBudget& budget) {
    check_inputs(net, budget);
    return allocate_proposed(net, budget, gamma_opt(budget.mu));
}

Allocation allocate_proposed(const NetworkStats& net, const PowerBudget& budget, double lid) {
    check_inputs(net, budget);
    const auto ks = coefficients(net);
    const double mu = budget.mu;

    Allocation out;
    out.gamma_opt_used = lid;
    out.gammas.assign(net.size(), 0.0);

    double lid_power = 0.0;
    double lambda_max = 0.0;
    for (const auto& k : ks) {
        if (k.a == 0.0) continue;
        lid_power += g_constraint(lid);
        lambda_max = std::max(lambda_max, phi_unchecked(0.0, k, mu));
    }
    if (lid_power == 0.0) return out;  // no relay can forward anything

    if (lid_power <= budget.gamma_r) {
        for (std::size_t i = 0; i < ks.size(); ++i) {
            if (ks[i].a > 0.0) out.gammas[i] = lid;
        }
        out.lambda_level = 0.0;
        out.budget_active = false;
        return out;
    }

    const bool all_identical = std::all_of(ks.begin(), ks.end(), [&](const SnrCoefficients& k) {
        return k.a > 0.0 && k.a == ks[0].a && k.b == ks[0].b && k.c == ks[0].c;
    });
    if (all_identical) {
        // Symmetric concave program: every relay spends gamma_r / N.
        const double share = budget.gamma_r / static_cast<double>(ks.size());
        const double g = solve_monotone([](double x) { return g_constraint(x); }, share,
                                        Bracket{0.0, lid, kFullPrecision, 400});
        out.gammas.assign(ks.size(), g);
        out.lambda_level = phi_unchecked(g, ks[0], mu);
        out.budget_active = true;
        return out;
    }

    const auto spent = [&](double lambda) {
        double s = 0.0;
        for (const auto& k : ks) s += g_constraint(phi_inverse(lambda, k, mu, lid));
        return s;
    };
    // spent() falls from lid_power > gamma_r at lambda = 0 to 0 at lambda_max.
    const RootResult r =
        solve_monotone_bracket(spent, budget.gamma_r, Bracket{0.0, lambda_max, kFullPrecision, 600});
    // The upper end of the final bracket always satisfies the budget.
    const double lambda = r.hi;

    for (std::size_t i = 0; i < ks.size(); ++i) {
        out.gammas[i] = phi_inverse(lambda, ks[i], mu, lid);
    }
    out.lambda_level = lambda;
    out.budget_active = true;
    return out;
}

Allocation allocate_equal(const NetworkStats& net, const PowerBudget& budget) {
    check_inputs(net, budget);
    Allocation out;
    out.gammas.assign(net.size(), budget.gamma_r / static_cast<double>(net.size()));
    out.budget_active = true;
    return out;
}

Allocation allocate_twf_linear(const NetworkStats& net, const PowerBudget& budget) {
    check_inputs(net, budget);
    const auto ks = coefficients(net);
    const double mu = budget.mu;
    const std::size_t n = ks.size();

    Allocation out;
    out.budget_active = true;
    out.gammas.assign(n, 0.0);

    const bool all_identical = std::all_of(ks.begin(), ks.end(), [&](const SnrCoefficients& k) {
        return k.a > 0.0 && k.a == ks[0].a && k.b == ks[0].b && k.c == ks[0].c;
    });
    if (all_identical) {
        // Symmetric concave program: equal split is the solution.
        const double each = budget.gamma_r / static_cast<double>(n);
        out.gammas.assign(n, each);
        const double d = ks[0].b * each + mu * ks[0].c;
        out.lambda_level = ks[0].a * mu * ks[0].c / (d * d);
        return out;
    }

    // Stationarity of A gamma / (B gamma + mu C) gives
    //   gamma_i = s_i W - k_i,  s_i = sqrt(A_i mu C_i) / B_i,  k_i = mu C_i / B_i,
    // with water level W = 1 / sqrt(lambda).  Relays enter in order of s/k.
    struct Entry {
        std::size_t index;
        double s;
        double k;
    };
    std::vector<Entry> order;
    for (std::size_t i = 0; i < n; ++i) {
        if (ks[i].a == 0.0) continue;
        order.push_back({i, std::sqrt(ks[i].a * mu * ks[i].c) / ks[i].b, mu * ks[i].c / ks[i].b});
    }
    if (order.empty()) return out;
    std::stable_sort(order.begin(), order.end(),
                     [](const Entry& x, const Entry& y) { return x.s / x.k > y.s / y.k; });

    std::size_t m = order.size();
    double level = 0.0;
    for (; m >= 1; --m) {
        double sum_s = 0.0;
        double sum_k = 0.0;
        for (std::size_t j = 0; j < m; ++j) {
            sum_s += order[j].s;
            sum_k += order[j].k;
        }
        level = (budget.gamma_r + sum_k) / sum_s;
        if (order[m - 1].s * level > order[m - 1].k) break;
    }
    for (std::size_t j = 0; j < m; ++j) {
        out.gammas[order[j].index] = std::max(0.0, order[j].s * level - order[j].k);
    }
    out.lambda_level = 1.0 / (level * level);
    return out;
}

double evaluate_scheme(const NetworkStats& net, const Allocation& alloc, bool pa_linear) {
    return pa_linear ? snr_total_linear(net, alloc.gammas) : snr_total(net, alloc.gammas);
}

}  // namespace afrelay
