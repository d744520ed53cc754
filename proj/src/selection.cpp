#include "prunelab/selection.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>
#include <vector>

#include "prunelab/errors.hpp"
#include "prunelab/gaussian.hpp"

namespace prunelab {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kAlignmentGuard = 1e-9;
// Quadrature domain; pdf(40) underflows to ~1e-348.
constexpr double kTail = 40.0;
constexpr double kMaxPanelWidth = 4.0;

std::string format_real(double x) {
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, res.ptr);
}

double parse_real(std::string_view text) {
    if (text == "inf" || text == "+inf") return kInf;
    double v = 0.0;
    auto res = std::from_chars(text.data(), text.data() + text.size(), v);
    if (res.ec != std::errc() || res.ptr != text.data() + text.size())
        throw InvalidArgument("not a number: '" + std::string(text) + "'");
    return v;
}

// E[q(G) f(G)] pieces for the four scalars, given tau (possibly infinite).
struct Integrands {
    double tau;
    double sign_rho;

    double pdf_tau(double t) const {
        if (std::isinf(tau)) return 0.0;
        return normal_pdf(tau * t);
    }
    double cdf_tau(double t) const {
        if (std::isinf(tau)) return (sign_rho * t > 0.0) ? 1.0 : 0.0;
        return normal_cdf(tau * t);
    }
};

struct Accumulator {
    double p = 0.0, gamma = 0.0, beta = 0.0, beta_tilde = 0.0;
};

double tau_of(double rho) {
    if (std::abs(rho) == 1.0) return rho * kInf;
    return rho / std::sqrt(1.0 - rho * rho);
}

StrategyScalars finish(const Accumulator& acc, double rho) {
    StrategyScalars out;
    out.p = acc.p;
    out.rho = rho;
    out.tau = tau_of(rho);
    out.gamma = acc.gamma;
    out.beta = acc.beta;
    out.beta_tilde = acc.beta_tilde;
    return out;
}

}  // namespace

SelectionStrategy SelectionStrategy::keep_all() { return {StrategyKind::KeepAll, 0.0}; }

SelectionStrategy SelectionStrategy::keep_hard(double xi) {
    if (std::isnan(xi) || xi < 0.0) throw InvalidArgument("keep_hard: threshold must be >= 0");
    return {StrategyKind::KeepHard, xi};
}

SelectionStrategy SelectionStrategy::keep_easy(double xi) {
    if (std::isnan(xi) || xi < 0.0) throw InvalidArgument("keep_easy: threshold must be >= 0");
    return {StrategyKind::KeepEasy, xi};
}

SelectionStrategy SelectionStrategy::sigmoid_power(double exponent) {
    // sup_t q(t) is infinite for negative exponents, so q cannot be a
    // probability there.
    if (!std::isfinite(exponent) || exponent < 0.0)
        throw InvalidArgument("sigmoid_power: exponent must be finite and >= 0");
    return {StrategyKind::SigmoidPower, exponent};
}

SelectionStrategy SelectionStrategy::parse(std::string_view text) {
    if (text == "all") return keep_all();
    const auto colon = text.find(':');
    if (colon == std::string_view::npos)
        throw InvalidArgument("unknown strategy '" + std::string(text) + "'");
    const auto head = text.substr(0, colon);
    const auto rest = text.substr(colon + 1);
    const auto eq = rest.find('=');
    if (eq == std::string_view::npos)
        throw InvalidArgument("strategy parameter missing '=' in '" + std::string(text) + "'");
    const auto key = rest.substr(0, eq);
    const double value = parse_real(rest.substr(eq + 1));
    if (head == "kh" && key == "xi") return keep_hard(value);
    if (head == "ke" && key == "xi") return keep_easy(value);
    if (head == "sig" && key == "w") return sigmoid_power(value);
    throw InvalidArgument("unknown strategy '" + std::string(text) + "'");
}

std::string SelectionStrategy::to_string() const {
    switch (kind_) {
        case StrategyKind::KeepAll: return "all";
        case StrategyKind::KeepHard: return "kh:xi=" + format_real(param_);
        case StrategyKind::KeepEasy: return "ke:xi=" + format_real(param_);
        case StrategyKind::SigmoidPower: return "sig:w=" + format_real(param_);
    }
    return "all";
}

std::string_view SelectionStrategy::kind_name() const {
    switch (kind_) {
        case StrategyKind::KeepAll: return "all";
        case StrategyKind::KeepHard: return "kh";
        case StrategyKind::KeepEasy: return "ke";
        case StrategyKind::SigmoidPower: return "sig";
    }
    return "all";
}

double SelectionStrategy::operator()(double t) const {
    switch (kind_) {
        case StrategyKind::KeepAll: return 1.0;
        case StrategyKind::KeepHard: return std::abs(t) <= param_ ? 1.0 : 0.0;
        case StrategyKind::KeepEasy: return std::abs(t) > param_ ? 1.0 : 0.0;
        case StrategyKind::SigmoidPower: {
            if (param_ == 0.0) return 1.0;
            // 4 s (1 - s) = sech(t/2)^2 = (2 e^{-|t|/2} / (1 + e^{-|t|}))^2
            const double a = std::abs(t);
            const double log_sech = std::numbers::ln2 - 0.5 * a - std::log1p(std::exp(-a));
            return std::exp(2.0 * param_ * log_sech);
        }
    }
    return 1.0;
}

double StrategyScalars::omega() const { return std::sqrt(std::max(0.0, 1.0 - rho * rho)) * beta; }
double StrategyScalars::omega_tilde() const { return rho * beta_tilde; }

void check_alignment(double rho) {
    if (std::isnan(rho) || std::abs(rho) > 1.0)
        throw InvalidArgument("alignment rho must lie in [-1, 1]");
    const double a = std::abs(rho);
    if (a < 1.0 && a > 1.0 - kAlignmentGuard)
        throw InvalidArgument("alignment |rho| within 1e-9 of 1 is not supported; pass +-1 exactly");
}

StrategyScalars scalars_closed_form(const SelectionStrategy& s, double rho) {
    check_alignment(rho);
    const double phi0 = kInvSqrt2Pi;
    const bool parallel = std::abs(rho) == 1.0;
    const double sgn = rho < 0 ? -1.0 : 1.0;
    const double c = parallel ? 0.0 : std::sqrt(1.0 - rho * rho);
    const double tau = tau_of(rho);

    Accumulator acc;
    switch (s.kind()) {
        case StrategyKind::KeepAll:
            acc.p = 1.0;
            acc.gamma = 1.0;
            acc.beta = 2.0 * phi0 * c;
            acc.beta_tilde = 2.0 * rho * phi0;
            break;
        case StrategyKind::KeepHard:
        case StrategyKind::KeepEasy: {
            const double xi = s.threshold();
            const bool hard = s.kind() == StrategyKind::KeepHard;
            const double pdf_xi = std::isinf(xi) ? 0.0 : normal_pdf(xi);
            const double xi_pdf = std::isinf(xi) ? 0.0 : xi * pdf_xi;
            // Mass inside [-xi, xi] and outside, each computed without
            // subtracting from one.
            const double inside = std::isinf(xi) ? 1.0 : std::erf(xi / std::numbers::sqrt2);
            const double outside = 2.0 * normal_cdf(-xi);
            acc.p = hard ? inside : outside;
            acc.gamma = hard ? inside - 2.0 * xi_pdf : outside + 2.0 * xi_pdf;
            if (parallel) {
                // beta~ = sign(rho) E[q(G)|G|], beta = 0.
                acc.beta = 0.0;
                acc.beta_tilde = sgn * 2.0 * (hard ? phi0 - pdf_xi : pdf_xi);
            } else {
                const double scaled = xi / c;
                const double eps_in =
                    std::isinf(xi) ? 1.0 : std::erf(scaled / std::numbers::sqrt2);
                const double eps_out = 2.0 * normal_cdf(-scaled);
                const double eps2 = (pdf_xi == 0.0) ? 0.0 : 2.0 * normal_cdf(tau * xi) - 1.0;
                if (hard) {
                    acc.beta = 2.0 * phi0 * c * eps_in;
                    acc.beta_tilde = 2.0 * (rho * phi0 * eps_in - pdf_xi * eps2);
                } else {
                    acc.beta = 2.0 * phi0 * c * eps_out;
                    acc.beta_tilde = 2.0 * (rho * phi0 * eps_out + pdf_xi * eps2);
                }
            }
            break;
        }
        case StrategyKind::SigmoidPower:
            throw NoClosedForm("sigmoid-power strategy has no closed-form scalars; use quadrature");
    }
    return finish(acc, rho);
}

StrategyScalars scalars_quadrature(const SelectionStrategy& s, double rho, int nodes) {
    check_alignment(rho);
    if (nodes < 32) throw InvalidArgument("scalars_quadrature: need at least 32 nodes");
    const Integrands f{tau_of(rho), rho < 0 ? -1.0 : 1.0};

    Accumulator acc;
    auto add = [&](double t, double weight_density) {
        const double q = s(t);
        if (q == 0.0) return;
        const double w = weight_density * q;
        acc.p += w;
        acc.gamma += w * t * t;
        acc.beta += w * 2.0 * f.pdf_tau(t);
        acc.beta_tilde += w * 2.0 * f.cdf_tau(t) * t;
    };

    if (s.is_binary()) {
        // q is piecewise constant; split at its jumps (+-xi) and at 0 where
        // cdf(tau t) is steepest, then cover each piece with Legendre panels.
        std::vector<double> cuts{-kTail, 0.0, kTail};
        if (s.kind() != StrategyKind::KeepAll && s.threshold() > 0.0 && s.threshold() < kTail) {
            cuts.push_back(-s.threshold());
            cuts.push_back(s.threshold());
        }
        std::sort(cuts.begin(), cuts.end());
        const QuadratureRule unit = gauss_legendre(static_cast<std::size_t>(nodes), -1.0, 1.0);
        for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
            const double a = cuts[k], b = cuts[k + 1];
            const int panels = std::max(1, static_cast<int>(std::ceil((b - a) / kMaxPanelWidth)));
            const double h = (b - a) / panels;
            for (int j = 0; j < panels; ++j) {
                const double lo = a + j * h;
                const double mid = lo + 0.5 * h, half = 0.5 * h;
                for (std::size_t i = 0; i < unit.nodes.size(); ++i) {
                    const double t = mid + half * unit.nodes[i];
                    add(t, half * unit.weights[i] * normal_pdf(t));
                }
            }
        }
    } else {
        const QuadratureRule rule = gauss_hermite_normal(static_cast<std::size_t>(nodes));
        for (std::size_t i = 0; i < rule.nodes.size(); ++i) add(rule.nodes[i], rule.weights[i]);
    }
    return finish(acc, rho);
}

StrategyScalars compute_scalars(const SelectionStrategy& s, double rho) {
    if (s.is_binary()) return scalars_closed_form(s, rho);
    return scalars_quadrature(s, rho);
}

MeanVectorCoeffs mean_vector_coeffs(const SelectionStrategy& s, double rho) {
    const StrategyScalars sc = compute_scalars(s, rho);
    return {sc.beta_tilde, sc.beta};
}

double threshold_for_keep_probability(StrategyKind kind, double p) {
    switch (kind) {
        case StrategyKind::KeepHard:
            if (!(p > 0.0 && p <= 1.0)) throw InvalidArgument("keep probability must lie in (0, 1]");
            return p == 1.0 ? kInf : normal_quantile(0.5 * (1.0 + p));
        case StrategyKind::KeepEasy:
            if (!(p > 0.0 && p <= 1.0)) throw InvalidArgument("keep probability must lie in (0, 1]");
            return p == 1.0 ? 0.0 : -normal_quantile(0.5 * p);
        default:
            throw InvalidArgument("threshold_for_keep_probability: only kh/ke have a threshold");
    }
}

}  // namespace prunelab
