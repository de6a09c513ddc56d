#include "paf/bounds.hpp"

#include <cmath>
#include <limits>

#include "paf/model.hpp"

namespace paf::bounds {

namespace {

// Sum of exp(log-term) over i in [lo, hi] for a binomial(n, p) pmf.
double binom_pmf_sum(std::int64_t n, double p, std::int64_t lo, std::int64_t hi) {
    const double lp = std::log(p);
    const double lq = std::log1p(-p);
    double sum = 0.0;
    for (std::int64_t i = lo; i <= hi; ++i) {
        const double lt = log_choose(n, i) + static_cast<double>(i) * lp +
                          static_cast<double>(n - i) * lq;
        sum += std::exp(lt);
    }
    return sum < 1.0 ? sum : 1.0;
}

double hypergeom_pmf_sum(const HypergeomParams& hp, std::int64_t lo, std::int64_t hi) {
    double sum = 0.0;
    for (std::int64_t t = lo; t <= hi; ++t) sum += hypergeom_pmf(hp, t);
    return sum < 1.0 ? sum : 1.0;
}

}  // namespace

void HypergeomParams::validate() const {
    if (N < 0 || m < 0 || m > N || n < 0 || n > N)
        throw domain_error("bounds: hypergeometric parameters need 0 <= m <= N and 0 <= n <= N");
    if (N == 0) throw domain_error("bounds: empty population");
}

double log_choose(std::int64_t n, std::int64_t k) {
    if (k < 0 || k > n) return -std::numeric_limits<double>::infinity();
    return std::lgamma(static_cast<double>(n) + 1.0) - std::lgamma(static_cast<double>(k) + 1.0) -
           std::lgamma(static_cast<double>(n - k) + 1.0);
}

double binom_tail_exact(std::int64_t n, double p, std::int64_t t) {
    if (n < 0 || p < 0.0 || p > 1.0) throw domain_error("bounds: invalid binomial parameters");
    if (t <= 0) return 1.0;
    if (t > n) return 0.0;
    if (p == 0.0) return 0.0;
    if (p == 1.0) return 1.0;
    // Sum the smaller side for accuracy.
    if (static_cast<double>(t) <= static_cast<double>(n) * p)
        return 1.0 - binom_pmf_sum(n, p, 0, t - 1);
    return binom_pmf_sum(n, p, t, n);
}

double binom_tail_low_mean_bound(std::int64_t n, double p, double t) {
    if (n < 0 || p < 0.0 || p > 1.0) throw domain_error("bounds: invalid binomial parameters");
    const double mean = static_cast<double>(n) * p;
    if (!(t > 2.0 * M_E * mean))
        throw domain_error("bounds: low-mean tail bound requires t > 2e*n*p");
    return std::exp2(-t);
}

double hypergeom_pmf(const HypergeomParams& hp, std::int64_t t) {
    hp.validate();
    if (t < hp.support_min() || t > hp.support_max()) return 0.0;
    return std::exp(log_choose(hp.m, t) + log_choose(hp.N - hp.m, hp.n - t) -
                    log_choose(hp.N, hp.n));
}

double hypergeom_tail_exact(const HypergeomParams& hp, std::int64_t t) {
    hp.validate();
    const std::int64_t lo = hp.support_min();
    const std::int64_t hi = hp.support_max();
    if (t <= lo) return 1.0;
    if (t > hi) return 0.0;
    if (t - lo <= hi - t + 1) return 1.0 - hypergeom_pmf_sum(hp, lo, t - 1);
    return hypergeom_pmf_sum(hp, t, hi);
}

double hypergeom_lower_tail_exact(const HypergeomParams& hp, std::int64_t t) {
    hp.validate();
    if (t >= hp.support_max()) return 1.0;
    return 1.0 - hypergeom_tail_exact(hp, t + 1);
}

double chvatal_upper(const HypergeomParams& hp, double t) {
    hp.validate();
    const double p = static_cast<double>(hp.m) / hp.N;
    if (t < 0.0 || t >= 1.0 - p)
        throw domain_error("bounds: chvatal upper form requires 0 <= t < 1 - m/N");
    if (t == 0.0) return 1.0;
    const double le = static_cast<double>(hp.n) *
                      (std::log(p / (p + t)) + std::log((1.0 - p) / (1.0 - p - t)));
    return le >= 0.0 ? 1.0 : std::exp(le);
}

double chvatal_upper_strict(const HypergeomParams& hp, double t) {
    hp.validate();
    const double p = static_cast<double>(hp.m) / hp.N;
    if (t < 0.0 || t >= 1.0 - p)
        throw domain_error("bounds: chvatal upper form requires 0 <= t < 1 - m/N");
    if (t == 0.0) return 1.0;
    const double le = static_cast<double>(hp.n) *
                      ((p + t) * std::log(p / (p + t)) +
                       (1.0 - p - t) * std::log((1.0 - p) / (1.0 - p - t)));
    return le >= 0.0 ? 1.0 : std::exp(le);
}

double chvatal_lower(const HypergeomParams& hp, double t) {
    hp.validate();
    const double p = static_cast<double>(hp.m) / hp.N;
    if (t < 0.0 || t >= p) throw domain_error("bounds: chvatal lower form requires 0 <= t < m/N");
    if (t == 0.0) return 1.0;
    const double le = static_cast<double>(hp.n) *
                      (std::log(p / (p - t)) + std::log((1.0 - p) / (1.0 - p + t)));
    return le >= 0.0 ? 1.0 : std::exp(le);
}

double chvatal_lower_strict(const HypergeomParams& hp, double t) {
    hp.validate();
    const double p = static_cast<double>(hp.m) / hp.N;
    if (t < 0.0 || t >= p) throw domain_error("bounds: chvatal lower form requires 0 <= t < m/N");
    if (t == 0.0) return 1.0;
    const double le = static_cast<double>(hp.n) *
                      ((p - t) * std::log(p / (p - t)) +
                       (1.0 - p + t) * std::log((1.0 - p) / (1.0 - p + t)));
    return le >= 0.0 ? 1.0 : std::exp(le);
}

double simple_tail(const HypergeomParams& hp, double delta) {
    hp.validate();
    if (delta < 0.0 || delta > 1.0)
        throw domain_error("bounds: simple tail bound requires delta in [0, 1]");
    const double b = 2.0 * std::exp(-hp.mean() * delta * delta / 3.0);
    return b < 1.0 ? b : 1.0;
}

double moderate_deviation_q(double t) { return 0.5 * std::erfc(t / std::sqrt(2.0)); }

}  // namespace paf::bounds
