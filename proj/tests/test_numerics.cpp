#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <limits>

#include "afrelay/numerics.hpp"
#include "oracles.hpp"

using namespace afrelay;

TEST_CASE("erfc matches the defining integral") {
    CHECK(afrelay::erfc(0.0) == 1.0);
    CHECK(afrelay::erfc(10.0) <= 1e-40);
    // mpmath, 30 digits
    CHECK(afrelay::erfc(1.0) == doctest::Approx(0.15729920705028513).epsilon(1e-15));

    for (double t = 0.0; t <= 10.0; t += 0.25) {
        CHECK(std::abs(afrelay::erfc(t) - oracle::erfc_quadrature(t)) <= 1e-12);
    }
}

TEST_CASE("erfc symmetry and monotonicity") {
    for (int k = -5; k <= 5; ++k) {
        const double t = k;
        CHECK(std::abs(afrelay::erfc(t) + afrelay::erfc(-t) - 2.0) <= 1e-12);
    }
    double prev = afrelay::erfc(-5.0);
    for (double t = -4.9; t <= 6.0; t += 0.1) {
        const double v = afrelay::erfc(t);
        CHECK(v < prev);
        prev = v;
    }
}

TEST_CASE("erfc rejects non-finite input") {
    CHECK_THROWS_AS(afrelay::erfc(std::numeric_limits<double>::quiet_NaN()), afrelay::domain_error);
    CHECK_THROWS_AS(afrelay::erfc(std::numeric_limits<double>::infinity()), afrelay::domain_error);
}

TEST_CASE("solve_monotone") {
    SUBCASE("identity") {
        CHECK(solve_monotone([](double x) { return x; }, 0.5, {0.0, 1.0, 1e-14, 200}) ==
              doctest::Approx(0.5).epsilon(1e-14));
    }
    SUBCASE("square") {
        const double x = solve_monotone([](double x) { return x * x; }, 4.0, {0.0, 10.0, 1e-14, 200});
        CHECK(x == doctest::Approx(2.0).epsilon(1e-13));
    }
    SUBCASE("decreasing function") {
        const double x = solve_monotone([](double x) { return std::exp(-x); }, 0.25, {0.0, 5.0, 1e-14, 200});
        CHECK(x == doctest::Approx(std::log(4.0)).epsilon(1e-13));
    }
    SUBCASE("stationarity condition of the soft-limiter SNR") {
        const double mu = std::pow(10.0, -1.5);
        const auto f = [mu](double g) {
            const double t = 1.0 / std::sqrt(g);
            return t - std::sqrt(std::numbers::pi) / (2.0 * mu) * afrelay::erfc(t);
        };
        const double g = solve_monotone(f, 0.0, {0.1, 2.0, 1e-15, 200});
        CHECK(g == doctest::Approx(0.5186).epsilon(1e-3));
        CHECK(linear_to_db(g) == doctest::Approx(-2.8507).epsilon(0.005 / 2.85));
    }
    SUBCASE("root stays inside the bracket") {
        for (double target : {0.0, 1e-9, 0.3, 0.999999}) {
            const RootResult r = solve_monotone_bracket([](double x) { return std::pow(x, 7.0); },
                                                        target, {0.0, 1.0, 1e-15, 500});
            CHECK(r.x >= 0.0);
            CHECK(r.x <= 1.0);
            CHECK(r.lo <= r.x);
            CHECK(r.x <= r.hi);
        }
    }
    SUBCASE("errors") {
        CHECK_THROWS_AS(solve_monotone([](double x) { return x; }, 5.0, {0.0, 1.0, 1e-14, 200}),
                        bracket_error);
        CHECK_THROWS_AS(solve_monotone([](double x) { return x; }, 0.5, {1.0, 0.0, 1e-14, 200}),
                        afrelay::domain_error);
        CHECK_THROWS_AS(solve_monotone([](double x) { return x * x * x; }, 0.3, {0.0, 1.0, 1e-300, 3}),
                        convergence_error);
    }
}

TEST_CASE("RngStream reproducibility") {
    RngStream a(42, 7), b(42, 7), c(42, 8), d(43, 7);
    bool differs_index = false, differs_seed = false;
    for (int k = 0; k < 100; ++k) {
        const double x = a.normal();
        CHECK(x == b.normal());
        differs_index = differs_index || x != c.normal();
        differs_seed = differs_seed || x != d.normal();
    }
    CHECK(differs_index);
    CHECK(differs_seed);
}

TEST_CASE("distinct streams are uncorrelated") {
    constexpr int n = 200000;
    RngStream a(5, 0), b(5, 1);
    double sxy = 0.0;
    for (int k = 0; k < n; ++k) sxy += a.normal() * b.normal();
    // correlation estimate has standard deviation 1/sqrt(n)
    CHECK(std::abs(sxy / n) <= 4.0 / std::sqrt(static_cast<double>(n)));
}

TEST_CASE("sample_complex_gaussian moments") {
    RngStream rng(11, 0);
    CHECK(sample_complex_gaussian(rng, 0.0) == complex(0.0, 0.0));
    CHECK_THROWS_AS(sample_complex_gaussian(rng, -1.0), afrelay::domain_error);

    constexpr int n = 1000000;
    std::complex<double> sum = 0.0;
    double sum_re2 = 0.0, sum_im2 = 0.0, sum_reim = 0.0;
    for (int k = 0; k < n; ++k) {
        const complex z = sample_complex_gaussian(rng, 1.0);
        sum += z;
        sum_re2 += z.real() * z.real();
        sum_im2 += z.imag() * z.imag();
        sum_reim += z.real() * z.imag();
    }
    CHECK(std::abs(sum / double(n)) <= 3e-3);
    CHECK(sum_re2 / n == doctest::Approx(0.5).epsilon(0.01));
    CHECK(sum_im2 / n == doctest::Approx(0.5).epsilon(0.01));
    CHECK(std::abs(sum_reim / n) <= 3e-3);

    double power = 0.0;
    for (int k = 0; k < n; ++k) power += std::norm(sample_complex_gaussian(rng, 2.0));
    CHECK(std::abs(power / n - 2.0) <= 3.0 * 2.0 / 1000.0);
}
