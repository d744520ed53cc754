#include "prunelab/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <string>

#include "prunelab/errors.hpp"
#include "prunelab/gaussian.hpp"

namespace prunelab {
namespace {

const double kSqrt2OverPi = std::sqrt(2.0 / std::numbers::pi);

constexpr double kDamping = 0.5;
constexpr int kMaxIterations = 10'000;
constexpr double kFixedPointTolerance = 1e-13;
constexpr double kConsistencyTolerance = 1e-9;

void check_consistent(const RegimeParams& params, const StrategyScalars& scalars) {
    if (std::abs(params.p - scalars.p) > kConsistencyTolerance) {
        std::ostringstream os;
        os << "keep probability mismatch: params.p=" << params.p << " scalars.p=" << scalars.p;
        throw InvalidArgument(os.str());
    }
}

}  // namespace

void RegimeParams::validate() const {
    if (!(phi > 0.0) || !std::isfinite(phi)) throw InvalidArgument("phi must be positive and finite");
    if (!(p > 0.0 && p <= 1.0)) throw InvalidArgument("keep probability p must lie in (0, 1]");
    if (!(lambda >= 0.0) || !std::isfinite(lambda))
        throw InvalidArgument("lambda must be finite and >= 0");
}

double stieltjes_m(const RegimeParams& params) {
    if (!(params.lambda > 0.0))
        throw RidgelessRequired("stieltjes_m needs lambda > 0; use the ridgeless path");
    params.validate();
    const double phi = params.phi, lambda = params.lambda;
    // z = -lambda: the discriminant (p - phi - z)^2 - 4 phi z is a sum of
    // squares. Pick the algebraic form without cancellation.
    const double a = params.p - phi + lambda;
    const double root = std::sqrt(a * a + 4.0 * phi * lambda);
    if (a >= 0.0) return 2.0 / (a + root);
    return (root - a) / (2.0 * phi * lambda);
}

double fixed_point_t(const RegimeParams& params) {
    if (!(params.lambda > 0.0))
        throw RidgelessRequired("fixed_point_t needs lambda > 0; use the ridgeless path");
    params.validate();
    const double p = params.p, phi = params.phi, lambda = params.lambda;
    auto map = [&](double t) { return p / (1.0 + phi / (t + lambda)); };
    double t = p;
    double residual = 0.0;
    for (int it = 0; it < kMaxIterations; ++it) {
        const double next = map(t);
        residual = std::abs(next - t);
        if (residual <= kFixedPointTolerance) return next;
        t = (1.0 - kDamping) * t + kDamping * next;
    }
    std::ostringstream os;
    os << "fixed_point_t did not converge in " << kMaxIterations
       << " iterations (residual " << residual << ", phi=" << phi << ", p=" << p
       << ", lambda=" << lambda << ")";
    throw NumericalError(os.str());
}

SpectralState spectral_state(const RegimeParams& params, const StrategyScalars& scalars) {
    SpectralState st;
    const double phi = params.phi, lambda = params.lambda, gamma = scalars.gamma;
    st.m = stieltjes_m(params);
    const double m = st.m;
    const double one_phi_m = 1.0 + phi * m;
    // d/dz of the positive root; the denominator (1 + phi lambda m^2) / m
    // equals p - phi - z - 2 phi z m, which is positive for z < 0.
    st.m_prime = m * m * one_phi_m / (1.0 + phi * lambda * m * m);
    st.s = gamma / one_phi_m;
    st.m_tilde = 1.0 / (st.s + lambda);
    const double s_prime = -gamma * phi * st.m_prime / (one_phi_m * one_phi_m);
    st.m_tilde_prime = st.m_tilde * st.m_tilde * (1.0 - s_prime);

    st.omega = scalars.omega();
    st.omega_tilde = scalars.omega_tilde();
    const double b2 = scalars.beta * scalars.beta;
    const double bt2 = scalars.beta_tilde * scalars.beta_tilde;
    st.r_mean = st.omega * st.m + st.omega_tilde * st.m_tilde;
    st.r_var = b2 * st.m + bt2 * st.m_tilde;
    st.r_var_prime = b2 * st.m_prime + bt2 * st.m_tilde_prime;
    st.r_main_text = st.omega * st.omega * st.m + st.omega_tilde * st.omega_tilde * st.m_tilde;
    return st;
}

namespace identities {

double m_prime_from_m(double m, const RegimeParams& params) {
    const double zm = -params.lambda * m;
    return m * m / (1.0 - (1.0 + zm) * (1.0 + zm) * params.phi / params.p);
}

double m_prime_from_inverse(double m, const RegimeParams& params) {
    const double a = params.phi + 1.0 / m;
    const double num = 1.0 + params.phi * m;
    return num * num / (a * a - params.p * params.phi);
}

double m_tilde_prime(double m, double m_prime, double m_tilde, double gamma, double phi) {
    const double one_phi_m = 1.0 + phi * m;
    return m_tilde * m_tilde * (gamma * phi * m_prime / (one_phi_m * one_phi_m) + 1.0);
}

}  // namespace identities

std::string_view regime_name(Regime r) {
    switch (r) {
        case Regime::Ridge: return "ridge";
        case Regime::RidgelessUnder: return "ridgeless_under";
        case Regime::RidgelessOver: return "ridgeless_over";
    }
    return "ridge";
}

TheoryPrediction prediction_from_moments(double m0, double nu0, Regime regime) {
    if (!std::isfinite(m0) || !std::isfinite(nu0) || !(nu0 > m0 * m0)) {
        std::ostringstream os;
        os.precision(17);
        os << "invalid prediction: nu0 <= m0^2 (m0=" << m0 << ", nu0=" << nu0 << ")";
        throw NumericalError(os.str());
    }
    TheoryPrediction out;
    out.m0 = m0;
    out.nu0 = nu0;
    out.regime = regime;
    const double cosine = m0 / std::sqrt(2.0 * nu0 / std::numbers::pi);
    if (std::abs(cosine) > 1.0 + 1e-9) {
        std::ostringstream os;
        os.precision(17);
        os << "invalid prediction: implied cosine " << cosine << " exceeds 1 (m0=" << m0
           << ", nu0=" << nu0 << ")";
        throw NumericalError(os.str());
    }
    out.cosine = std::clamp(cosine, -1.0, 1.0);
    out.test_error = std::acos(out.cosine) / std::numbers::pi;
    out.test_error_gaussian = normal_cdf(-m0 / std::sqrt(nu0 - m0 * m0));
    return out;
}

TheoryReport theory_report(const RegimeParams& params, const StrategyScalars& scalars) {
    check_consistent(params, scalars);
    TheoryReport rep;
    rep.state = spectral_state(params, scalars);
    const SpectralState& st = rep.state;
    const double phi = params.phi;
    const double m0 = kSqrt2OverPi * st.r_mean;
    const double nu0 = params.p * phi * st.m_prime + st.r_var_prime -
                       2.0 * phi * st.m_prime / (1.0 + phi * st.m) * st.r_var;
    rep.prediction = prediction_from_moments(m0, nu0, Regime::Ridge);
    rep.m0_main_text = kSqrt2OverPi * st.r_main_text;
    return rep;
}

TheoryPrediction theory_test_error(const RegimeParams& params, const StrategyScalars& scalars) {
    return theory_report(params, scalars).prediction;
}

RidgelessReport ridgeless_report(const StrategyScalars& scalars, double phi, double p) {
    RegimeParams{phi, 0.0, p}.validate();
    check_consistent(RegimeParams{phi, 0.0, p}, scalars);
    if (std::abs(phi - p) < kThresholdExclusion) {
        std::ostringstream os;
        os << "at interpolation threshold: |phi - p| = " << std::abs(phi - p) << " < "
           << kThresholdExclusion;
        throw InterpolationThreshold(os.str());
    }
    const double gamma = scalars.gamma, rho = scalars.rho;
    const double b2 = scalars.beta * scalars.beta;
    const double bt2 = scalars.beta_tilde * scalars.beta_tilde;
    const double omega = scalars.omega(), omega_t = scalars.omega_tilde();
    const double rho2 = rho * rho;

    RidgelessReport rep;
    double a_stated = 0.0, b_stated = 0.0;
    if (phi < p) {
        const double gap = p - phi;
        const double gap3 = gap * gap * gap;
        const double m = 1.0 / gap;
        const double m_t = (p / gamma) / gap;
        const double m_p = p / gap3;
        const double m_tp = p / gap3 * (gap * p / (gamma * gamma) + phi / gamma);
        const double k = 1.0 / (gap * gap);  // m' / (1 + phi m)
        const double m0 = kSqrt2OverPi * (omega * m + omega_t * m_t);
        const double r = b2 * m + bt2 * m_t;
        const double r_p = b2 * m_p + bt2 * m_tp;
        const double nu0 = p * phi * m_p + r_p - 2.0 * phi * k * r;
        rep.limit = prediction_from_moments(m0, nu0, Regime::RidgelessUnder);

        const double r0 = 1.0 - rho2 + rho2 * p / gamma;
        const double r0_p = p * (1.0 - rho2 + rho2 * (gap * p / (gamma * gamma) + phi / gamma));
        a_stated = scalars.beta * kSqrt2OverPi * r0 / gap;
        b_stated = (p * p * phi + b2 * (r0_p - 2.0 * phi * r0)) / gap3;
    } else {
        // Everything scaled by powers of -z, which cancel in m0 / sqrt(nu0).
        const double c0 = 1.0 - p / phi;
        rep.c0 = c0;
        const double m_t = c0 / (gamma / phi + c0);  // -z m~ and z^2 m~'
        const double a = kSqrt2OverPi * (omega * c0 + omega_t * m_t);
        const double r = b2 * c0 + bt2 * m_t;
        const double r_p = b2 * c0 + bt2 * m_t;
        const double b = p * phi * c0 + r_p - 2.0 * r;
        rep.limit = prediction_from_moments(a, b, Regime::RidgelessOver);

        const double r0 = 1.0 - rho2 + rho2 / (gamma / phi + c0);
        a_stated = scalars.beta * kSqrt2OverPi * c0 * r0;
        b_stated = c0 * (p * phi - b2 * r0);
    }
    rep.a_stated = a_stated;
    rep.b_stated = b_stated;
    try {
        rep.stated = prediction_from_moments(a_stated, b_stated, rep.limit.regime);
    } catch (const NumericalError&) {
        rep.stated.reset();
    }
    return rep;
}

TheoryPrediction ridgeless_test_error(const StrategyScalars& scalars, double phi, double p) {
    return ridgeless_report(scalars, phi, p).limit;
}

}  // namespace prunelab
