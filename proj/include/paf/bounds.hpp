#pragma once

#include <cstdint>

namespace paf::bounds {

// Draws without replacement: population N, of which m successes, n draws.
struct HypergeomParams {
    std::int64_t N = 0;
    std::int64_t m = 0;
    std::int64_t n = 0;

    void validate() const;
    double mean() const noexcept { return static_cast<double>(n) * m / N; }
    std::int64_t support_min() const noexcept { return n - (N - m) > 0 ? n - (N - m) : 0; }
    std::int64_t support_max() const noexcept { return m < n ? m : n; }
};

double log_choose(std::int64_t n, std::int64_t k);

// Pr[X >= t] for X ~ Binomial(n, p), by log-space summation of the smaller side.
double binom_tail_exact(std::int64_t n, double p, std::int64_t t);

// 2^-t, valid only under the low-mean hypothesis t > 2e*n*p (checked).
double binom_tail_low_mean_bound(std::int64_t n, double p, double t);

double hypergeom_pmf(const HypergeomParams& hp, std::int64_t t);
double hypergeom_tail_exact(const HypergeomParams& hp, std::int64_t t);        // Pr[X >= t]
double hypergeom_lower_tail_exact(const HypergeomParams& hp, std::int64_t t);  // Pr[X <= t]

// Upper-tail bound on Pr[X >= (p+t)n], p = m/N, in the exponent-free printed
// form ((p/(p+t)) * ((1-p)/(1-p-t)))^n, clamped to 1. This form can exceed 1
// and does NOT dominate the exact tail everywhere; chvatal_upper_strict is
// the dominating version. Both are kept deliberately.
double chvatal_upper(const HypergeomParams& hp, double t);

// Exponentiated form ((p/(p+t))^(p+t) * ((1-p)/(1-p-t))^(1-p-t))^n; a valid
// upper bound for all t in [0, 1-p).
double chvatal_upper_strict(const HypergeomParams& hp, double t);

// Mirrors of the two forms for the lower tail Pr[X <= (p-t)n], t in [0, p).
double chvatal_lower(const HypergeomParams& hp, double t);
double chvatal_lower_strict(const HypergeomParams& hp, double t);

// Two-sided concentration bound min(1, 2exp(-E[X] delta^2 / 3)) on
// Pr[|X - E[X]| >= delta E[X]], for delta in [0, 1].
double simple_tail(const HypergeomParams& hp, double delta);

// Standard normal upper tail Q(t).
double moderate_deviation_q(double t);

}  // namespace paf::bounds
