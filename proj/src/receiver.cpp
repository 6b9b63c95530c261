#include "afrelay/receiver.hpp"

#include <cmath>
#include <limits>

namespace afrelay {

Constellation::Constellation(std::string name, std::vector<complex> points, int label_bits)
    : name_(std::move(name)), points_(std::move(points)), label_bits_(label_bits) {
    if (points_.empty()) throw domain_error("Constellation: no points");
    double energy = 0.0;
    for (const auto& p : points_) energy += std::norm(p);
    energy /= static_cast<double>(points_.size());
    if (std::abs(energy - 1.0) > 1e-12) {
        throw domain_error("Constellation: average symbol energy must be 1");
    }
}

Constellation Constellation::qpsk() {
    const double a = std::sqrt(0.5);
    // Gray order: adjacent quadrants differ in one label bit.
    return {"qpsk", {{a, a}, {-a, a}, {a, -a}, {-a, -a}}, 2};
}

Constellation Constellation::qam16() {
    const double levels[4] = {-3.0, -1.0, 3.0, 1.0};  // Gray: 00 01 10 11
    const double scale = 1.0 / std::sqrt(10.0);
    std::vector<complex> pts;
    for (int i = 0; i < 4; ++i) {
        for (int q = 0; q < 4; ++q) pts.emplace_back(levels[i] * scale, levels[q] * scale);
    }
    return {"qam16", std::move(pts), 4};
}

std::size_t Constellation::nearest(complex z) const {
    std::size_t best = 0;
    double best_d = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < points_.size(); ++k) {
        const double d = std::norm(z - points_[k]);
        if (d < best_d) {
            best_d = d;
            best = k;
        }
    }
    return best;
}

void validate_waveform_link(const LinkStats& link) {
    if (!(link.var_sr >= 0.0) || !(link.var_rd >= 0.0)) {
        throw domain_error("waveform link: channel variances must be >= 0");
    }
    if (!(link.p_source > 0.0) || !(link.n0 >= 0.0)) {
        throw domain_error("waveform link: p_source must be > 0 and n0 >= 0");
    }
}

double relay_scale(const LinkStats& link, double power) {
    return std::sqrt(power / (link.p_source * link.var_sr + link.n0));
}

double equivalent_amplitude(const LinkStats& link, double power) {
    return std::sqrt(link.p_source * power / (link.p_source * link.var_sr + link.n0));
}

SlotSignal transmit_slot(const LinkStats& link, double gamma, const PaParams& pa,
                         complex symbol, complex fade_sr, complex fade_rd, RngStream& rng) {
    if (!(gamma >= 0.0)) throw domain_error("transmit_slot: gamma must be >= 0");
    SlotSignal s{};
    s.source_symbol = symbol;
    s.fade_sr = fade_sr;
    s.fade_rd = fade_rd;
    const complex n = sample_complex_gaussian(rng, link.n0);
    const complex v = sample_complex_gaussian(rng, link.n0);
    s.relay_rx = std::sqrt(link.p_source) * fade_sr * symbol + n;
    if (gamma == 0.0) {
        s.relay_tx = 0.0;
        s.dest_rx = v;
        return s;
    }
    const double power = gamma * pa.a_sat * pa.a_sat;
    s.relay_tx = relay_scale(link, power) * s.relay_rx;
    s.dest_rx = fade_rd * apply_pa(pa, s.relay_tx) + v;
    return s;
}

SlotSignal simulate_slot(const LinkStats& link, double gamma, const PaParams& pa,
                         complex symbol, RngStream& rng) {
    validate_waveform_link(link);
    const complex f = sample_complex_gaussian(rng, link.var_sr);
    const complex g = sample_complex_gaussian(rng, link.var_rd);
    return transmit_slot(link, gamma, pa, symbol, f, g, rng);
}

EquivalentLink equivalent_link(const LinkStats& link, double gamma, const PaParams& pa,
                               complex fade_sr, complex fade_rd, bool distortion_aware) {
    if (!(gamma > 0.0)) throw domain_error("equivalent_link: gamma must be > 0");
    const double power = gamma * pa.a_sat * pa.a_sat;
    BussgangParams bp{complex(1.0, 0.0), 0.0};
    if (distortion_aware) bp = bussgang_params(NormalizedPoint{gamma, 0.0}, pa);
    const double a2 = std::norm(bp.alpha);
    EquivalentLink eq;
    eq.h = bp.alpha * fade_sr * fade_rd;
    eq.var_h = a2 * link.var_sr * link.var_rd;
    eq.var_w = a2 * power * link.var_rd * link.n0 / (link.p_source * link.var_sr + link.n0) +
               bp.sigma_d_sq + link.n0;
    return eq;
}

complex estimate_channel(complex pilot, complex y_pilot, const EquivalentLink& eq) {
    if (!(eq.var_w > 0.0) || !(eq.var_h > 0.0)) {
        throw domain_error("estimate_channel: var_w and var_h must be > 0");
    }
    if (pilot == complex(0.0, 0.0)) throw domain_error("estimate_channel: zero pilot");
    const double precision = std::norm(pilot) / eq.var_w + 1.0 / eq.var_h;
    return std::conj(pilot) * y_pilot / (eq.var_w * precision);
}

complex mrc_combine(std::span<const complex> y, std::span<const complex> h_hat) {
    if (y.size() != h_hat.size() || y.empty()) {
        throw domain_error("mrc_combine: need equal-length, non-empty branch sequences");
    }
    complex num = 0.0;
    double den = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) {
        num += y[i] * std::conj(h_hat[i]);
        den += std::norm(h_hat[i]);
    }
    if (den == 0.0) throw detection_error("mrc_combine: all channel estimates are zero");
    return num / den;
}

complex mrc_detect(std::span<const complex> y, std::span<const complex> h_hat,
                   const Constellation& constellation) {
    return constellation.points()[constellation.nearest(mrc_combine(y, h_hat))];
}

ReceiverStats run_receiver(const NetworkStats& net, const Allocation& alloc, const PaParams& pa,
                           long long n_symbols, RngStream& rng, const ReceiverOptions& options) {
    if (n_symbols < 1) throw domain_error("run_receiver: n_symbols must be >= 1");
    if (options.block_length < 1) throw domain_error("run_receiver: block_length must be >= 1");
    if (alloc.gammas.size() != net.size()) {
        throw domain_error("run_receiver: allocation length does not match relay count");
    }
    if (net.links.empty()) throw domain_error("run_receiver: no relays");
    for (const auto& l : net.links) validate_waveform_link(l);
    pa.validate();

    struct Branch {
        const LinkStats* link;
        double gamma;
        double amplitude;
    };
    std::vector<Branch> branches;
    for (std::size_t i = 0; i < net.size(); ++i) {
        if (alloc.gammas[i] > 0.0 && net.links[i].has_gain()) {
            const double power = alloc.gammas[i] * pa.a_sat * pa.a_sat;
            branches.push_back({&net.links[i], alloc.gammas[i], equivalent_amplitude(net.links[i], power)});
        }
    }
    if (branches.empty()) throw domain_error("run_receiver: no relay forwards");

    const auto points = options.constellation.points();
    const std::size_t nb = branches.size();
    std::vector<complex> fade_sr(nb), fade_rd(nb), h_hat(nb), y(nb);

    ReceiverStats stats;
    while (stats.symbols < n_symbols) {
        for (std::size_t b = 0; b < nb; ++b) {
            fade_sr[b] = sample_complex_gaussian(rng, branches[b].link->var_sr);
            fade_rd[b] = sample_complex_gaussian(rng, branches[b].link->var_rd);
        }
        for (std::size_t b = 0; b < nb; ++b) {
            const auto& br = branches[b];
            const SlotSignal pilot_slot =
                transmit_slot(*br.link, br.gamma, pa, options.pilot, fade_sr[b], fade_rd[b], rng);
            if (options.estimation == Estimation::ideal) {
                const EquivalentLink truth =
                    equivalent_link(*br.link, br.gamma, pa, fade_sr[b], fade_rd[b], true);
                h_hat[b] = br.amplitude * truth.h;
            } else {
                EquivalentLink model = equivalent_link(*br.link, br.gamma, pa, fade_sr[b],
                                                       fade_rd[b], options.distortion_aware);
                // Fold the known amplitude into the channel the detector sees.
                model.h *= br.amplitude;
                model.var_h *= br.amplitude * br.amplitude;
                h_hat[b] = estimate_channel(options.pilot, pilot_slot.dest_rx, model);
            }
        }
        const long long in_block =
            std::min<long long>(options.block_length, n_symbols - stats.symbols);
        for (long long k = 0; k < in_block; ++k) {
            const std::size_t sent = static_cast<std::size_t>(rng.index(points.size()));
            for (std::size_t b = 0; b < nb; ++b) {
                const auto& br = branches[b];
                y[b] = transmit_slot(*br.link, br.gamma, pa, points[sent], fade_sr[b],
                                     fade_rd[b], rng)
                           .dest_rx;
            }
            bool error = true;
            bool have_estimate = false;
            for (const auto& h : h_hat) have_estimate = have_estimate || h != complex(0.0, 0.0);
            if (have_estimate) {
                error = options.constellation.nearest(mrc_combine(y, h_hat)) != sent;
            }
            stats.errors += error ? 1 : 0;
            ++stats.symbols;
        }
    }
    return stats;
}

double receiver_pipeline(const NetworkStats& net, const Allocation& alloc, const PaParams& pa,
                         long long n_symbols, RngStream& rng, const ReceiverOptions& options) {
    return run_receiver(net, alloc, pa, n_symbols, rng, options).ser();
}

}  // namespace afrelay
