#pragma once

#include <functional>
#include <vector>

namespace hazard::quad {

struct Result {
    double value = 0.0;
    double error_estimate = 0.0;
    int panels = 0;
};

// Adaptive Gauss-Kronrod (7-15) bisection to an absolute tolerance.
// breakpoints are optional interior split points (peaks, kinks); points
// outside (a, b) are ignored. Throws hazard::numerical_error with the
// achieved tolerance when the panel budget is exhausted.
Result integrate_adaptive(const std::function<double(double)>& f, double a, double b,
                          double abs_tol, const std::vector<double>& breakpoints = {},
                          int max_panels = 4000);

// Fixed-order Gauss-Legendre on [a, b].
double integrate_gauss_legendre(const std::function<double(double)>& f, double a, double b,
                                int order = 64);

// Integral of g against the Beta(alpha, beta) density on (0, 1), by a fixed
// tanh-sinh rule. The double-exponential change of variable absorbs the
// algebraic endpoint weights for any alpha, beta > 0 (fixed-order Gauss rules
// do not: a fractional power survives at an endpoint under any single smooth
// substitution). n is the number of nodes per side.
double integrate_beta_weighted(const std::function<double(double)>& g, double alpha, double beta,
                               int n = 192);

// Nodes/weights for Gauss-Legendre on [-1, 1], cached per order.
const std::pair<std::vector<double>, std::vector<double>>& gauss_legendre_rule(int order);

} // namespace hazard::quad
