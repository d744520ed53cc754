#include "prunelab/gaussian.hpp"

#include <cmath>
#include <memory>

#include <gsl/gsl_cdf.h>
#include <gsl/gsl_integration.h>

#include "prunelab/errors.hpp"

namespace prunelab {
namespace {

struct FixedWorkspaceDeleter {
    void operator()(gsl_integration_fixed_workspace* w) const { gsl_integration_fixed_free(w); }
};

QuadratureRule fixed_rule(const gsl_integration_fixed_type* type, std::size_t n, double a,
                          double b) {
    std::unique_ptr<gsl_integration_fixed_workspace, FixedWorkspaceDeleter> ws(
        gsl_integration_fixed_alloc(type, n, a, b, 0.0, 0.0));
    if (!ws) throw NumericalError("gsl_integration_fixed_alloc failed");
    const double* x = gsl_integration_fixed_nodes(ws.get());
    const double* w = gsl_integration_fixed_weights(ws.get());
    QuadratureRule rule;
    rule.nodes.assign(x, x + n);
    rule.weights.assign(w, w + n);
    return rule;
}

}  // namespace

double normal_quantile(double u) {
    if (!(u > 0.0 && u < 1.0)) throw InvalidArgument("normal_quantile: u must lie in (0, 1)");
    return gsl_cdf_ugaussian_Pinv(u);
}

QuadratureRule gauss_hermite_normal(std::size_t nodes) {
    if (nodes == 0) throw InvalidArgument("gauss_hermite_normal: need at least one node");
    // Weight exp(-b (x - a)^2) with a = 0, b = 1/2 is the N(0,1) kernel up to
    // sqrt(2 pi).
    QuadratureRule rule = fixed_rule(gsl_integration_fixed_hermite, nodes, 0.0, 0.5);
    for (double& w : rule.weights) w *= kInvSqrt2Pi;
    return rule;
}

QuadratureRule gauss_legendre(std::size_t nodes, double a, double b) {
    if (nodes == 0) throw InvalidArgument("gauss_legendre: need at least one node");
    if (!(b > a)) throw InvalidArgument("gauss_legendre: empty interval");
    return fixed_rule(gsl_integration_fixed_legendre, nodes, a, b);
}

}  // namespace prunelab
