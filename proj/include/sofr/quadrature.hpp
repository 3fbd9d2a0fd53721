#pragma once

// Gaussian quadrature rules from the Golub-Welsch eigenvalue method.

#include <cstddef>
#include <vector>

namespace sofr {

struct QuadratureRule {
    std::vector<double> nodes;
    std::vector<double> weights;
};

/// Gauss-Legendre rule on [-1, 1].
QuadratureRule gauss_legendre(std::size_t n);

/// Gauss-Hermite rule for the standard normal weight: sum w_i f(z_i) ~ E f(Z).
QuadratureRule gauss_hermite_normal(std::size_t n);

/// Integral of f over [lo, hi] with an n-point Gauss-Legendre rule.
template <class F>
double integrate_legendre(const QuadratureRule& rule, double lo, double hi, F&& f) {
    const double half = 0.5 * (hi - lo), mid = 0.5 * (hi + lo);
    double acc = 0.0;
    for (std::size_t i = 0; i < rule.nodes.size(); ++i) acc += rule.weights[i] * f(mid + half * rule.nodes[i]);
    return acc * half;
}

}  // namespace sofr
