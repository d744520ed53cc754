#pragma once

#include <cmath>
#include <cstddef>
#include <numbers>
#include <vector>

namespace prunelab {

inline constexpr double kInvSqrt2Pi = 0.5 * std::numbers::inv_sqrtpi * std::numbers::sqrt2;

/// Standard normal density.
inline double normal_pdf(double x) { return kInvSqrt2Pi * std::exp(-0.5 * x * x); }

/// Standard normal CDF via erfc (accurate in both tails).
inline double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

/// Inverse of normal_cdf; u must lie in (0, 1).
double normal_quantile(double u);

/// A fixed quadrature rule: integral ~= sum_i weights[i] * f(nodes[i]).
struct QuadratureRule {
    std::vector<double> nodes;
    std::vector<double> weights;

    template <typename F>
    double apply(F&& f) const {
        double acc = 0.0;
        for (std::size_t i = 0; i < nodes.size(); ++i) acc += weights[i] * f(nodes[i]);
        return acc;
    }
};

/// Gauss-Hermite rule for E[f(G)], G ~ N(0,1): weights sum to 1.
QuadratureRule gauss_hermite_normal(std::size_t nodes);

/// Gauss-Legendre rule on [a, b] (weights integrate dx, not a density).
QuadratureRule gauss_legendre(std::size_t nodes, double a, double b);

}  // namespace prunelab
