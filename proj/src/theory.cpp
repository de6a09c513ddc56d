#include "paf/theory.hpp"

#include <cmath>
#include <limits>

#include "paf/model.hpp"

namespace paf::theory {

namespace {

constexpr double kIntegerTol = 1e-9;

// Rounds x to the nearest integer when within relative tolerance; otherwise
// returns NaN. Keeps 1/gamma = 2.9999999999 from classifying as 2.
double as_integer(double x) {
    const double r = std::round(x);
    if (std::abs(x - r) <= kIntegerTol * std::max(1.0, std::abs(x))) return r;
    return std::numeric_limits<double>::quiet_NaN();
}

void check_pg(double p, double gamma) {
    if (p < 0.0 || p >= 0.5) throw domain_error("theory: p must lie in [0, 1/2)");
    if (!(gamma > 0.0) || gamma > 1.0) throw domain_error("theory: gamma must lie in (0, 1]");
}

}  // namespace

std::string phase_name(Phase p) {
    switch (p) {
        case Phase::I: return "I";
        case Phase::II: return "II";
        case Phase::III: return "III";
        case Phase::Boundary: return "boundary";
    }
    return "?";
}

double gamma_of(int n, int k, double alpha) {
    if (n < 2) throw domain_error("theory: n must be >= 2");
    if (k < 1 || k > n) throw domain_error("theory: k must lie in [1, n]");
    return alpha - std::log(static_cast<double>(k)) / std::log(static_cast<double>(n));
}

Phase phase_classify(int n, int k, double alpha, double tol) {
    const double gamma = gamma_of(n, k, alpha);
    if (alpha > 0.5 + tol) return Phase::III;
    if (alpha < 0.5 - tol) return gamma <= tol ? Phase::I : Phase::II;
    return Phase::Boundary;
}

double ber_of_margin(double p, double x) {
    if (p <= 0.0) return x > 0.0 ? 0.0 : 0.5;
    // 1 / (1 + ((1-p)/p)^x); the ratio exceeds 1, so overflow saturates to 0.
    const double t = std::exp(x * (std::log1p(-p) - std::log(p)));
    return 1.0 / (1.0 + t);
}

BerPrediction paf_limit_ber(double p, double gamma) {
    check_pg(p, gamma);
    if (p == 0.0) return {0.0, 0.0, true};
    const double inv = 1.0 / gamma;
    const double whole = as_integer(inv);
    if (!std::isnan(whole))
        return {ber_of_margin(p, whole), ber_of_margin(p, whole - 1.0), false};
    const double fl = std::floor(inv);
    const double v = ber_of_margin(p, fl);
    return {v, v, true};
}

BerPrediction optimal_limit_ber(double p, double gamma) {
    check_pg(p, gamma);
    if (p == 0.0) return {0.0, 0.0, true};
    const double inv = 1.0 / gamma;
    const double whole = as_integer(inv);
    if (!std::isnan(whole))
        return {ber_of_margin(p, whole), ber_of_margin(p, whole - 1.0), false};
    // ceil(1/gamma - 1) == floor(1/gamma) off the integer lattice.
    const double v = ber_of_margin(p, std::floor(inv));
    return {v, v, true};
}

}  // namespace paf::theory
