#pragma once

// Asymptotic test error of the selectively-sampled ridge classifier in the
// proportional regime d/n -> phi, isotropic inputs. All functions take
// z = -lambda implicitly.

#include <optional>
#include <string_view>

#include "prunelab/selection.hpp"

namespace prunelab {

struct RegimeParams {
    double phi = 1.0;     // d / n
    double lambda = 0.0;  // ridge penalty
    double p = 1.0;       // keep probability

    void validate() const;
};

/// Positive root of phi z m^2 + (phi - p + z) m + 1 = 0 at z = -lambda.
/// Throws RidgelessRequired when lambda <= 0.
double stieltjes_m(const RegimeParams& params);


/// Solves t = p / (1 + phi / (t - z)) by damped iteration. Cross-check of
/// the closed form: t = z + 1/m.
double fixed_point_t(const RegimeParams& params);

struct SpectralState {
    double m = 0.0;
    double m_prime = 0.0;
    double s = 0.0;
    double m_tilde = 0.0;
    double m_tilde_prime = 0.0;
    double r_mean = 0.0;       // omega m + omega~ m~
    double r_var = 0.0;        // beta^2 m + beta~^2 m~
    double r_var_prime = 0.0;  // beta^2 m' + beta~^2 m~'
    double r_main_text = 0.0;  // omega^2 m + omega~^2 m~ (comparison only)
    double omega = 0.0;
    double omega_tilde = 0.0;
};

SpectralState spectral_state(const RegimeParams& params, const StrategyScalars& scalars);

/// Derivative identities, evaluated from independently supplied m, m'.
namespace identities {
double m_prime_from_m(double m, const RegimeParams& params);
double m_prime_from_inverse(double m, const RegimeParams& params);
double m_tilde_prime(double m, double m_prime, double m_tilde, double gamma, double phi);
}  // namespace identities

enum class Regime { Ridge, RidgelessUnder, RidgelessOver };
std::string_view regime_name(Regime r);

struct TheoryPrediction {
    double m0 = 0.0;
    double nu0 = 0.0;
    // m0 / sqrt(2 nu0 / pi): limiting cosine between w_hat and w0.
    double cosine = 0.0;
    // arccos(cosine) / pi, the exact isotropic error for that cosine.
    double test_error = 0.5;
    // Phi(-m0 / sqrt(nu0 - m0^2)), which treats the test margin as Gaussian.
    double test_error_gaussian = 0.5;
    Regime regime = Regime::Ridge;
};

/// Builds a prediction from the two margin moments. Throws NumericalError
/// when nu0 <= m0^2.
TheoryPrediction prediction_from_moments(double m0, double nu0, Regime regime);

struct TheoryReport {
    TheoryPrediction prediction;
    SpectralState state;
    double m0_main_text = 0.0;
};

TheoryReport theory_report(const RegimeParams& params, const StrategyScalars& scalars);

TheoryPrediction theory_test_error(const RegimeParams& params, const StrategyScalars& scalars);

struct RidgelessReport {
    // lambda -> 0+ limit of the theory_test_error chain (default).
    TheoryPrediction limit;
    // Closed-form (a, b) constants of the ridgeless limit; empty when b <= a^2.
    std::optional<TheoryPrediction> stated;
    double a_stated = 0.0;
    double b_stated = 0.0;
    double c0 = 0.0;  // 1 - p/phi (over-parametrized regime only)
};

inline constexpr double kThresholdExclusion = 1e-3;

RidgelessReport ridgeless_report(const StrategyScalars& scalars, double phi, double p);

TheoryPrediction ridgeless_test_error(const StrategyScalars& scalars, double phi, double p);

}  // namespace prunelab
