#pragma once

#include <string>

namespace paf::theory {

enum class Phase { I, II, III, Boundary };

std::string phase_name(Phase p);

// Limiting bit-error-rate prediction; lower == upper unless the governing
// exponent ratio is an integer, in which case only an interval is known.
struct BerPrediction {
    double lower = 0.0;
    double upper = 0.0;
    bool exact = true;
};

// Exponent gap alpha - log_n(k); the finite-size correction is taken as 0.
double gamma_of(int n, int k, double alpha);

// Region of the (alpha, cluster-size) plane a parameter point falls in:
//   alpha > 1/2 + tol                 -> Phase III (limit BER 1/2)
//   alpha < 1/2 - tol, gamma <= tol   -> Phase I   (limit BER 0)
//   alpha < 1/2 - tol, gamma >  tol   -> Phase II  (limit BER in (0, 1/2))
//   otherwise                         -> Boundary
Phase phase_classify(int n, int k, double alpha, double tol = 1e-9);

// p^x / (p^x + (1-p)^x): probability that a column leading by x net 1-votes
// is actually disliked. Strictly decreasing in x for p < 1/2.
double ber_of_margin(double p, double x);

// Limiting BER of the neighborhood recommender run with T = k, as a function
// of p and gamma in (0, 1]. Exact value ber_of_margin(p, floor(1/gamma)) when
// 1/gamma is not an integer; the interval [f(1/gamma), f(1/gamma - 1)]
// otherwise. Integrality is decided with relative tolerance 1e-9.
BerPrediction paf_limit_ber(double p, double gamma);

// Limiting BER band for the cluster-pooling recommender, gamma defined via
// the squared cluster size: [f(floor(1/gamma)), f(ceil(1/gamma - 1))].
BerPrediction optimal_limit_ber(double p, double gamma);

}  // namespace paf::theory
