#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <functional>
#include <random>
#include <stdexcept>
#include <string>

namespace afrelay {

/// Thrown when an argument lies outside the domain of an operation.
class domain_error : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// The root-finder was handed an interval without a sign change.
class bracket_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class convergence_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

using complex = std::complex<double>;

/// Complementary error function, erfc(t) = 2/sqrt(pi) * int_t^inf exp(-x^2) dx.
/// Throws afrelay::domain_error for NaN or infinite input.
double erfc(double t);

struct Bracket {
    double lo = 0.0;
    double hi = 1.0;
    double tol_abs = 1e-14;
    int max_iters = 200;
};

/// Final state of a bracketed root search. `x` is the best iterate; [lo, hi]
/// still brackets the root and f(lo) - target, f(hi) - target keep their
/// starting signs.
struct RootResult {
    double x = 0.0;
    double lo = 0.0;
    double hi = 0.0;
    int iterations = 0;
};

/// Solves f(x) = target for f monotone on [bracket.lo, bracket.hi].
///
/// Illinois-modified regula falsi with a bisection step whenever the
/// interval fails to halve over three iterations, so the bracket always
/// shrinks at least as fast as plain bisection in the long run. Terminates
/// when the bracket is narrower than tol_abs, when f hits the target
/// exactly, or when no representable point remains strictly inside.
RootResult solve_monotone_bracket(const std::function<double(double)>& f, double target,
                                  const Bracket& bracket);

/// Convenience wrapper returning only the root.
double solve_monotone(const std::function<double(double)>& f, double target,
                      const Bracket& bracket);

/// Reproducible random stream keyed on (master_seed, stream_index).
///
/// The engine seed is a SplitMix64 mix of both keys, so every stream is an
/// independent value that can be created on any worker in any order.
class RngStream {
public:
    RngStream(std::uint64_t master_seed, std::uint64_t stream_index);

    std::uint64_t master_seed() const { return master_seed_; }
    std::uint64_t stream_index() const { return stream_index_; }

    /// Standard normal draw.
    double normal();
    /// Uniform draw on [lo, hi).
    double uniform(double lo, double hi);
    /// Uniform integer on [0, n).
    std::uint64_t index(std::uint64_t n);

private:
    std::uint64_t master_seed_;
    std::uint64_t stream_index_;
    std::mt19937_64 engine_;
    std::normal_distribution<double> normal_{0.0, 1.0};
};

/// Circularly-symmetric complex Gaussian sample with E{|z|^2} = variance.
complex sample_complex_gaussian(RngStream& rng, double variance);

inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }
inline double linear_to_db(double x) { return 10.0 * std::log10(x); }

}  // namespace afrelay
