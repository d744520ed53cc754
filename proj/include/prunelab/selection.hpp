#pragma once

// Selection (pruning) strategies q(t) and the one-dimensional Gaussian
// expectations that summarize them:
//
//   p      = E[q(G)]
//   gamma  = E[q(G) G^2]
//   beta   = 2 E[q(G) pdf(tau G)]
//   beta~  = 2 E[q(G) cdf(tau G) G],     tau = rho / sqrt(1 - rho^2)
//
// with G ~ N(0,1) and rho the cosine between the (unit) pruning direction and
// the labeling direction.

#include <string>
#include <string_view>

namespace prunelab {

enum class StrategyKind { KeepAll, KeepHard, KeepEasy, SigmoidPower };

class SelectionStrategy {
public:
    static SelectionStrategy keep_all();
    /// Keeps |t| <= xi. xi may be +inf (equivalent to keep_all).
    static SelectionStrategy keep_hard(double xi);
    /// Keeps |t| > xi.
    static SelectionStrategy keep_easy(double xi);
    /// q(t) = (4 sigmoid(t) (1 - sigmoid(t)))^exponent, so sup q = q(0) = 1.
    static SelectionStrategy sigmoid_power(double exponent);

    /// Parses `all`, `kh:xi=1.0`, `ke:xi=0.5`, `sig:w=2.0`.
    static SelectionStrategy parse(std::string_view text);
    std::string to_string() const;

    StrategyKind kind() const { return kind_; }
    double threshold() const { return param_; }
    double exponent() const { return param_; }

    bool is_binary() const { return kind_ != StrategyKind::SigmoidPower; }

    /// Keep probability at projection t.
    double operator()(double t) const;

    /// Short kind name used in CSV columns: all, kh, ke, sig.
    std::string_view kind_name() const;

    friend bool operator==(const SelectionStrategy&, const SelectionStrategy&) = default;

private:
    SelectionStrategy(StrategyKind kind, double param) : kind_(kind), param_(param) {}

    StrategyKind kind_;
    double param_;
};

inline double eval_q(const SelectionStrategy& s, double t) { return s(t); }

struct StrategyScalars {
    double p = 1.0;
    double rho = 0.0;
    double tau = 0.0;
    double gamma = 1.0;
    double beta = 0.0;
    double beta_tilde = 0.0;

    double omega() const;        // sqrt(1 - rho^2) * beta
    double omega_tilde() const;  // rho * beta_tilde
};

/// Validates rho: |rho| <= 1 and not within 1e-9 of +-1 unless exactly +-1.
void check_alignment(double rho);

/// Closed forms for KeepAll / KeepHard / KeepEasy. Throws NoClosedForm for
/// SigmoidPower. |rho| = 1 uses the parallel-direction branch (beta = 0).
StrategyScalars scalars_closed_form(const SelectionStrategy& s, double rho);

inline constexpr int kDefaultQuadratureNodes = 128;

/// Same scalars by quadrature. Binary strategies integrate Gauss-Legendre
/// panels split at the discontinuities; smooth ones use Gauss-Hermite.
StrategyScalars scalars_quadrature(const SelectionStrategy& s, double rho,
                                   int nodes = kDefaultQuadratureNodes);

/// Closed form where available, quadrature otherwise.
StrategyScalars compute_scalars(const SelectionStrategy& s, double rho);

/// Coefficients of c = E[q(x.w_s) y x] = beta_tilde * u + beta * v, where u is
/// the pruning direction and v completes span{w_s, w0}. At |rho| = 1 returns
/// (sign(rho) E[q(G)|G|], 0).
struct MeanVectorCoeffs {
    double beta_tilde;
    double beta;
};
MeanVectorCoeffs mean_vector_coeffs(const SelectionStrategy& s, double rho);

/// Threshold giving keep probability p for kh / ke, i.e. the inverse of p(xi).
double threshold_for_keep_probability(StrategyKind kind, double p);

}  // namespace prunelab
