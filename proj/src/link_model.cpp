#include "afrelay/link_model.hpp"

#include <cmath>
#include <limits>
#include <numbers>

namespace afrelay {

void LinkStats::validate() const {
    if (!(var_sr >= 0.0) || !(var_rd >= 0.0) || !std::isfinite(var_sr) ||
        !std::isfinite(var_rd)) {
        throw domain_error("LinkStats: channel variances must be finite and >= 0");
    }
    if (!(p_source > 0.0) || !(n0 > 0.0)) {
        throw domain_error("LinkStats: p_source and n0 must be > 0");
    }
}

SnrCoefficients SnrCoefficients::of(const LinkStats& link) {
    return {link.p_source * link.var_sr * link.var_rd, link.var_rd * link.n0,
            link.p_source * link.var_sr + link.n0};
}

double NetworkStats::mu() const { return links.front().n0 / (a_sat * a_sat); }

void NetworkStats::validate() const {
    if (links.empty()) throw domain_error("NetworkStats: need at least one relay");
    if (!(a_sat > 0.0)) throw domain_error("NetworkStats: a_sat must be > 0");
    for (const auto& l : links) {
        l.validate();
        if (l.p_source != links.front().p_source || l.n0 != links.front().n0) {
            throw domain_error("NetworkStats: all links must share p_source and n0");
        }
    }
}

NetworkStats NetworkStats::symmetric(std::size_t n, double var, double p_source, double n0,
                                     double a_sat) {
    NetworkStats net;
    net.links.assign(n, LinkStats{var, var, p_source, n0});
    net.a_sat = a_sat;
    net.validate();
    return net;
}

double snr_link(const LinkStats& link, double rho_val) {
    if (!(rho_val >= 0.0)) throw domain_error("snr_link: rho must be >= 0");
    const auto k = SnrCoefficients::of(link);
    if (k.a == 0.0) return 0.0;
    if (std::isinf(rho_val)) return 0.0;
    return k.a / (k.b + rho_val * k.c);
}

namespace {

template <class Rho>
double sum_links(const NetworkStats& net, std::span<const double> gammas, Rho rho_of) {
    if (gammas.size() != net.size()) {
        throw domain_error("snr_total: allocation length does not match relay count");
    }
    const double mu = net.mu();
    double total = 0.0;
    for (std::size_t i = 0; i < gammas.size(); ++i) {
        if (!(gammas[i] >= 0.0)) throw domain_error("snr_total: gamma must be >= 0");
        if (gammas[i] == 0.0) continue;
        total += snr_link(net.links[i], rho_of(NormalizedPoint{gammas[i], mu}));
    }
    return total;
}

}  // namespace

double snr_total(const NetworkStats& net, std::span<const double> gammas) {
    return sum_links(net, gammas, [](const NormalizedPoint& p) { return rho(p); });
}

double snr_total_linear(const NetworkStats& net, std::span<const double> gammas) {
    return sum_links(net, gammas, [](const NormalizedPoint& p) { return rho_linear(p); });
}

double capacity(double snr_total, std::size_t n_relays) {
    if (!(snr_total >= 0.0)) throw domain_error("capacity: snr must be >= 0");
    return std::log1p(snr_total) / std::numbers::ln2 / static_cast<double>(n_relays + 1);
}

}  // namespace afrelay
