#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <vector>

#include "afrelay/receiver.hpp"

using namespace afrelay;
using doctest::Approx;

namespace {

const double kMu = std::pow(10.0, -1.5);
const PaParams kPa = PaParams::normalized(1.0);

Allocation uniform_alloc(std::size_t n, double gamma) {
    Allocation a;
    a.gammas.assign(n, gamma);
    return a;
}

}  // namespace

TEST_CASE("constellations") {
    const auto q = Constellation::qpsk();
    CHECK(q.points().size() == 4);
    CHECK(q.label_bits() == 2);
    // Gray: neighbouring quadrants differ in one label bit
    for (std::size_t a = 0; a < 4; ++a) {
        for (std::size_t b = 0; b < 4; ++b) {
            const double d = std::abs(q.points()[a] - q.points()[b]);
            if (a != b && d < 1.5) CHECK(std::popcount(a ^ b) == 1);
        }
    }
    const auto m = Constellation::qam16();
    CHECK(m.points().size() == 16);
    for (std::size_t a = 0; a < 16; ++a) {
        for (std::size_t b = 0; b < 16; ++b) {
            const double d = std::abs(m.points()[a] - m.points()[b]);
            if (a != b && d < 2.0 / std::sqrt(10.0) + 1e-9) CHECK(std::popcount(a ^ b) == 1);
        }
        CHECK(m.nearest(m.points()[a]) == a);
    }
    // tie on the boundary between points 0 and 1 of QPSK goes to the lower index
    CHECK(q.nearest({0.0, 0.5}) == 0);
    CHECK_THROWS_AS(Constellation("bad", {{2.0, 0.0}}, 0), afrelay::domain_error);
    CHECK_THROWS_AS(Constellation("empty", {}, 0), afrelay::domain_error);
}

TEST_CASE("estimate_channel") {
    const EquivalentLink unit{0.0, 1.0, 1.0};
    CHECK(estimate_channel(1.0, 1.0, unit) == complex(0.5, 0.0));
    CHECK(std::abs(estimate_channel({0.0, 1.0}, {0.3, 0.7}, EquivalentLink{0.0, 1.0, 1e-12}) -
                   complex(0.3, 0.7) / complex(0.0, 1.0)) < 1e-9);
    CHECK(std::abs(estimate_channel(1.0, 5.0, EquivalentLink{0.0, 1e-12, 1.0})) < 1e-10);
    CHECK_THROWS_AS(estimate_channel(0.0, 1.0, unit), afrelay::domain_error);
    CHECK_THROWS_AS(estimate_channel(1.0, 1.0, EquivalentLink{0.0, 0.0, 1.0}), afrelay::domain_error);
    CHECK_THROWS_AS(estimate_channel(1.0, 1.0, EquivalentLink{0.0, 1.0, 0.0}), afrelay::domain_error);
}

TEST_CASE("estimator beats perturbed coefficients") {
    RngStream rng(31, 0);
    const EquivalentLink model{0.0, 0.8, 0.3};
    const complex pilot{std::sqrt(0.5), std::sqrt(0.5)};
    double mse = 0.0, mse_lo = 0.0, mse_hi = 0.0;
    constexpr int n = 100000;
    for (int k = 0; k < n; ++k) {
        const complex h = sample_complex_gaussian(rng, model.var_h);
        const complex y = pilot * h + sample_complex_gaussian(rng, model.var_w);
        const complex est = estimate_channel(pilot, y, model);
        mse += std::norm(est - h);
        mse_lo += std::norm(0.9 * est - h);
        mse_hi += std::norm(1.1 * est - h);
    }
    CHECK(mse < mse_lo);
    CHECK(mse < mse_hi);
    // theoretical MMSE
    CHECK(mse / n == Approx(1.0 / (1.0 / model.var_w + 1.0 / model.var_h)).epsilon(0.02));
}

TEST_CASE("mrc") {
    const auto q = Constellation::qpsk();
    const std::vector<complex> h{{0.3, 0.4}, {-1.0, 0.2}};
    for (const auto& s : q.points()) {
        const std::vector<complex> y{h[0] * s, h[1] * s};
        CHECK(std::abs(mrc_combine(y, h) - s) < 1e-15);
        CHECK(mrc_detect(y, h, q) == s);
    }
    const std::vector<complex> one{{2.0, 0.0}};
    CHECK(mrc_detect(std::vector<complex>{{-0.5, 0.1}}, one, q) == q.points()[q.nearest({-0.25, 0.05})]);
    CHECK_THROWS_AS(mrc_combine(std::vector<complex>{1.0}, std::vector<complex>{0.0}), detection_error);
    CHECK_THROWS_AS(mrc_combine(std::vector<complex>{1.0}, h), afrelay::domain_error);
    CHECK_THROWS_AS(mrc_combine(std::vector<complex>{}, std::vector<complex>{}), afrelay::domain_error);
}

TEST_CASE("noiseless linear slot scales exactly") {
    RngStream rng(1, 0);
    const LinkStats link{1.0, 1.0, 2.0, 0.0};
    const double gamma = 0.01;
    const complex s{0.6, -0.8};
    const auto slot = transmit_slot(link, gamma, kPa, s, 1.0, 1.0, rng);
    CHECK(std::abs(slot.dest_rx - std::sqrt(2.0 * gamma / 2.0) * s) < 1e-15);
    CHECK(std::abs(slot.dest_rx - equivalent_amplitude(link, gamma) * s) < 1e-15);
    const auto silent = transmit_slot(link, 0.0, kPa, s, 1.0, 1.0, rng);
    CHECK(silent.dest_rx == complex(0.0, 0.0));
    CHECK(silent.relay_tx == complex(0.0, 0.0));
    CHECK_THROWS_AS(transmit_slot(link, -1.0, kPa, s, 1.0, 1.0, rng), afrelay::domain_error);
}

TEST_CASE("slot powers") {
    RngStream rng(8, 0);
    const LinkStats link{0.7, 1.3, 1.0, kMu};
    const double gamma = 1.5;
    constexpr int n = 100000;
    double px = 0.0, px2 = 0.0, pf = 0.0, pf2 = 0.0;
    double pm = 0.0, pm2 = 0.0;
    for (int k = 0; k < n; ++k) {
        const auto slot = simulate_slot(link, gamma, kPa, sample_complex_gaussian(rng, 1.0), rng);
        const double a = std::norm(slot.relay_tx);
        px += a; px2 += a * a;
        // With |f|^2 at its mean the relay drive is exactly CN(0, gamma).
        const complex f = std::polar(std::sqrt(link.var_sr), rng.uniform(0.0, 6.283185307179586));
        const auto fixed = transmit_slot(link, gamma, kPa, sample_complex_gaussian(rng, 1.0), f, 1.0, rng);
        const double b = std::norm(apply_pa(kPa, fixed.relay_tx));
        pf += b; pf2 += b * b;
        const double c = std::norm(apply_pa(kPa, slot.relay_tx));
        pm += c; pm2 += c * c;
    }
    const auto stderr_of = [](double s, double s2) {
        const double m = s / n;
        return std::sqrt((s2 / n - m * m) / n);
    };
    CHECK(std::abs(px / n - gamma) <= 3.0 * stderr_of(px, px2));
    CHECK(std::abs(pf / n - moment_out({gamma, kMu}, kPa)) <= 3.0 * stderr_of(pf, pf2));
    // Rayleigh f makes the drive a Gaussian scale mixture; output power is
    // concave in drive power, so the mixture falls short of the closed form
    CHECK(pm / n < moment_out({gamma, kMu}, kPa) - 3.0 * stderr_of(pm, pm2));
}

TEST_CASE("equivalent-noise model matches the nonlinear chain at the mean drive") {
    RngStream rng(12, 0);
    const LinkStats link{0.8, 1.0, 1.0, kMu};
    for (double gamma : {0.2, 1.0, 4.0}) {
        const double amp = equivalent_amplitude(link, gamma);
        constexpr int n = 200000;
        double s1 = 0.0, s2 = 0.0;
        for (int k = 0; k < n; ++k) {
            const complex s = sample_complex_gaussian(rng, 1.0);
            const complex f = std::polar(std::sqrt(link.var_sr), rng.uniform(0.0, 6.283185307179586));
            const complex g = sample_complex_gaussian(rng, link.var_rd);
            const auto slot = transmit_slot(link, gamma, kPa, s, f, g, rng);
            const auto eq = equivalent_link(link, gamma, kPa, f, g);
            const double e = std::norm(slot.dest_rx - amp * eq.h * s);
            s1 += e;
            s2 += e * e;
        }
        const double mean = s1 / n;
        const double se = std::sqrt((s2 / n - mean * mean) / n);
        const double var_w = equivalent_link(link, gamma, kPa, 1.0, 1.0).var_w;
        CHECK(std::abs(mean - var_w) <= 3.0 * se);
    }
}

TEST_CASE("equivalent_link") {
    const LinkStats link{0.5, 2.0, 1.0, kMu};
    const auto aware = equivalent_link(link, 1.0, kPa, 1.0, {0.0, 1.0});
    const auto b = bussgang_params({1.0, kMu}, kPa);
    CHECK(std::abs(aware.h - b.alpha * complex(0.0, 1.0)) < 1e-15);
    CHECK(aware.var_h == Approx(std::norm(b.alpha) * 1.0));
    const auto naive = equivalent_link(link, 1.0, kPa, 1.0, {0.0, 1.0}, false);
    CHECK(naive.h == complex(0.0, 1.0));
    CHECK(naive.var_w < aware.var_w + 1.0);
    CHECK(naive.var_w == Approx(2.0 * kMu / (0.5 + kMu) + kMu));
    CHECK_THROWS_AS(equivalent_link(link, 0.0, kPa, 1.0, 1.0), afrelay::domain_error);
}

TEST_CASE("zero-noise ideal pipeline is error free") {
    const auto net = NetworkStats{{LinkStats{1.0, 1.0, 1.0, 0.0}, LinkStats{0.7, 1.2, 1.0, 0.0}}, 1.0};
    ReceiverOptions opt;
    opt.estimation = Estimation::ideal;
    for (double gamma : {0.05, 0.5, 5.0}) {
        RngStream rng(4, 0);
        CHECK(receiver_pipeline(net, uniform_alloc(2, gamma), kPa, 20000, rng, opt) == 0.0);
    }
    opt.constellation = Constellation::qam16();
    RngStream rng(4, 1);
    CHECK(receiver_pipeline(net, uniform_alloc(2, 0.05), kPa, 20000, rng, opt) == 0.0);
}

TEST_CASE("receiver determinism and silent relays") {
    const auto net = NetworkStats::symmetric(3, 1.0, 1.0, 0.3, 1.0);
    const Allocation a = uniform_alloc(3, 0.4);
    RngStream r1(50, 2), r2(50, 2);
    const auto s1 = run_receiver(net, a, kPa, 5000, r1);
    const auto s2 = run_receiver(net, a, kPa, 5000, r2);
    CHECK(s1.errors == s2.errors);
    CHECK(s1.symbols == 5000);

    // a zero-power relay consumes no draws, so the pipeline equals the
    // two-relay pipeline exactly
    Allocation with_silent{{0.4, 0.0, 0.4}};
    const auto two = NetworkStats::symmetric(2, 1.0, 1.0, 0.3, 1.0);
    RngStream r3(50, 3), r4(50, 3);
    CHECK(run_receiver(net, with_silent, kPa, 5000, r3).errors ==
          run_receiver(two, uniform_alloc(2, 0.4), kPa, 5000, r4).errors);

    RngStream r5(1, 1);
    CHECK_THROWS_AS(run_receiver(net, uniform_alloc(3, 0.0), kPa, 100, r5), afrelay::domain_error);
    CHECK_THROWS_AS(run_receiver(net, uniform_alloc(2, 0.1), kPa, 100, r5), afrelay::domain_error);
    CHECK_THROWS_AS(run_receiver(net, a, kPa, 0, r5), afrelay::domain_error);
}

TEST_CASE("diversity: more relays, fewer errors") {
    const double n0 = 0.05;
    double prev = 1.0;
    for (std::size_t n : {1u, 2u, 4u}) {
        RngStream rng(60, n);
        const double ser = receiver_pipeline(NetworkStats::symmetric(n, 1.0, 1.0, n0, 1.0),
                                             uniform_alloc(n, 0.05), kPa, 40000, rng);
        CHECK(ser < prev);
        prev = ser;
    }
}

TEST_CASE("distortion-aware receiver at gamma_opt") {
    const auto net = NetworkStats::symmetric(4, 1.0, 1.0, kMu, 1.0);
    const Allocation a = uniform_alloc(4, gamma_opt(kMu));
    const RngStream seed(70, 0);
    RngStream ra = seed, rn = seed;
    ReceiverOptions naive;
    naive.distortion_aware = false;
    const auto aware_stats = run_receiver(net, a, kPa, 100000, ra);
    const auto naive_stats = run_receiver(net, a, kPa, 100000, rn, naive);
    CHECK(aware_stats.ser() <= naive_stats.ser());
}
