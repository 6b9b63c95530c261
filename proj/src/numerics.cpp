#include "afrelay/numerics.hpp"

#include <cmath>
#include <limits>

namespace afrelay {

double erfc(double t) {
    if (!std::isfinite(t)) {
        throw domain_error("erfc: non-finite argument");
    }
    // glibc's erfc is accurate to about one ulp over the whole real line,
    // including the far tail that the allocation math depends on.
    return std::erfc(t);
}

RootResult solve_monotone_bracket(const std::function<double(double)>& f, double target,
                                  const Bracket& bracket) {
    if (!(bracket.lo < bracket.hi)) {
        throw domain_error("solve_monotone: bracket requires lo < hi");
    }
    if (!(bracket.tol_abs > 0.0) || bracket.max_iters <= 0) {
        throw domain_error("solve_monotone: tol_abs and max_iters must be positive");
    }

    double a = bracket.lo;
    double b = bracket.hi;
    double fa = f(a) - target;
    double fb = f(b) - target;
    if (std::isnan(fa) || std::isnan(fb)) {
        throw domain_error("solve_monotone: function is NaN at a bracket end");
    }
    if (fa == 0.0) return {a, a, a, 0};
    if (fb == 0.0) return {b, b, b, 0};
    if ((fa < 0.0) == (fb < 0.0)) {
        throw bracket_error("solve_monotone: no sign change in bracket");
    }

    // Illinois weights: when the same end is retained twice the stale
    // function value is halved.
    double wa = fa;
    double wb = fb;
    int retained_side = 0;
    double width_checkpoint = b - a;
    int since_checkpoint = 0;

    for (int it = 1; it <= bracket.max_iters; ++it) {
        double c;
        if (since_checkpoint >= 3) {
            c = 0.5 * (a + b);
        } else {
            c = b - wb * (b - a) / (wb - wa);
            if (!(c > a && c < b)) c = 0.5 * (a + b);
        }
        if (!(c > a && c < b)) {
            // a and b are adjacent doubles
            const double x = std::abs(fa) < std::abs(fb) ? a : b;
            return {x, a, b, it};
        }

        const double fc = f(c) - target;
        if (std::isnan(fc)) {
            throw domain_error("solve_monotone: function is NaN inside bracket");
        }
        if (fc == 0.0) return {c, c, c, it};

        if ((fc < 0.0) == (fa < 0.0)) {
            a = c;
            fa = fc;
            wa = fc;
            if (retained_side == 1) wb *= 0.5;
            retained_side = 1;
        } else {
            b = c;
            fb = fc;
            wb = fc;
            if (retained_side == -1) wa *= 0.5;
            retained_side = -1;
        }

        if (b - a <= 0.5 * width_checkpoint) {
            width_checkpoint = b - a;
            since_checkpoint = 0;
        } else {
            ++since_checkpoint;
        }

        if (b - a <= bracket.tol_abs) {
            const double x = std::abs(fa) < std::abs(fb) ? a : b;
            return {x, a, b, it};
        }
    }
    throw convergence_error("solve_monotone: max_iters exceeded");
}

double solve_monotone(const std::function<double(double)>& f, double target,
                      const Bracket& bracket) {
    return solve_monotone_bracket(f, target, bracket).x;
}

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

}  // namespace

RngStream::RngStream(std::uint64_t master_seed, std::uint64_t stream_index)
    : master_seed_(master_seed),
      stream_index_(stream_index),
      engine_(splitmix64(splitmix64(master_seed) ^ splitmix64(~stream_index))) {}

double RngStream::normal() { return normal_(engine_); }

double RngStream::uniform(double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(engine_);
}

std::uint64_t RngStream::index(std::uint64_t n) {
    return std::uniform_int_distribution<std::uint64_t>(0, n - 1)(engine_);
}

complex sample_complex_gaussian(RngStream& rng, double variance) {
    if (!(variance >= 0.0) || !std::isfinite(variance)) {
        throw domain_error("sample_complex_gaussian: variance must be finite and >= 0");
    }
    const double s = std::sqrt(0.5 * variance);
    const double re = rng.normal();
    const double im = rng.normal();
    return {s * re, s * im};
}

}  // namespace afrelay
