#include <doctest.h>

#include <cmath>
#include <limits>
#include <random>

#include <Eigen/Dense>

#include "oracles.hpp"
#include "prunelab/errors.hpp"
#include "prunelab/simulate.hpp"
#include "prunelab/spectral.hpp"

using namespace prunelab;

namespace {

double residual(double m, const RegimeParams& r) {
    const double z = -r.lambda;
    return r.phi * z * m * m + (r.phi - r.p + z) * m + 1.0;
}

// Keep-hard strategy with keep probability p (keep-all at p = 1).
SelectionStrategy kh_with_p(double p) {
    return SelectionStrategy::keep_hard(threshold_for_keep_probability(StrategyKind::KeepHard, p));
}

double m_tilde_at(double p, double phi, double lambda, const StrategyScalars& sc) {
    return spectral_state({phi, lambda, p}, sc).m_tilde;
}

}  // namespace

TEST_SUITE("spectral") {

TEST_CASE("stieltjes transform examples") {
    CHECK(stieltjes_m({1e-8, 1.0, 1.0}) == doctest::Approx(0.5).epsilon(1e-7));
    CHECK(stieltjes_m({1.0, 1.0, 1.0}) == doctest::Approx((std::sqrt(5.0) - 1) / 2).epsilon(1e-14));
    const double m = stieltjes_m({0.25, 0.01, 0.5});
    CHECK(m > 0.0);
    CHECK(oracle::rel_close(m, oracle::quadratic_positive_root(0.5, 0.25, 0.01), 1e-12));
    CHECK_THROWS_AS(stieltjes_m({1.0, 0.0, 1.0}), RidgelessRequired);
    CHECK_THROWS_AS(stieltjes_m({1.0, -1.0, 1.0}), RidgelessRequired);
    CHECK_THROWS_AS(stieltjes_m({0.0, 1.0, 1.0}), InvalidArgument);
    CHECK_THROWS_AS(stieltjes_m({1.0, 1.0, 1.5}), InvalidArgument);
}

TEST_CASE("positive root and quadratic residual over a random grid") {
    std::mt19937_64 eng(5);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int i = 0; i < 500; ++i) {
        const RegimeParams r{std::exp(std::log(0.01) + u(eng) * std::log(1000.0)),
                             std::exp(std::log(1e-4) + u(eng) * std::log(1e5)), 0.01 + 0.99 * u(eng)};
        const double m = stieltjes_m(r);
        CAPTURE(r.phi);
        CAPTURE(r.lambda);
        CAPTURE(r.p);
        CHECK(m > 0.0);
        CHECK(std::abs(residual(m, r)) <= 1e-10);
        CHECK(oracle::rel_close(m, oracle::quadratic_positive_root(r.p, r.phi, r.lambda), 1e-12));
    }
}

TEST_CASE("p = 1 reduces to the classical Marchenko-Pastur transform") {
    std::mt19937_64 eng(17);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int i = 0; i < 20; ++i) {
        const double phi = 0.05 + 4.0 * u(eng);
        const double lambda = std::exp(std::log(1e-3) + u(eng) * std::log(1e4));
        CHECK(oracle::rel_close(stieltjes_m({phi, lambda, 1.0}), oracle::classical_mp(phi, lambda), 1e-12));
    }
}

TEST_CASE("resolvent trace of simulated designs matches m at p = phi = lambda = 1") {
    const int d = 2000, reps = 20;
    RandomStream rs(99);
    double acc = 0.0;
    for (int r = 0; r < reps; ++r) {
        const Eigen::MatrixXd x = rs.normal_matrix(d, d);
        Eigen::MatrixXd a = Eigen::MatrixXd::Identity(d, d);
        a.selfadjointView<Eigen::Lower>().rankUpdate(x.transpose(), 1.0 / d);
        Eigen::LLT<Eigen::MatrixXd> llt(a.selfadjointView<Eigen::Lower>());
        REQUIRE(llt.info() == Eigen::Success);
        // trace(A^{-1}) = ||L^{-1}||_F^2
        Eigen::MatrixXd linv = Eigen::MatrixXd::Identity(d, d);
        llt.matrixL().solveInPlace(linv);
        acc += linv.squaredNorm() / d;
    }
    CHECK(std::abs(acc / reps - stieltjes_m({1.0, 1.0, 1.0})) <= 2e-3);
}

TEST_CASE("fixed point agrees with the closed form") {
    CHECK(fixed_point_t({1.0, 1.0, 1.0}) ==
          doctest::Approx(-1.0 + 2.0 / (std::sqrt(5.0) - 1.0)).epsilon(1e-11));
    const RegimeParams r{0.3, 0.1, 0.6};
    CHECK(std::abs(fixed_point_t(r) - (-r.lambda + 1.0 / stieltjes_m(r))) <= 1e-10);
    CHECK(fixed_point_t({1e-8, 1.0, 1.0}) == doctest::Approx(1.0).epsilon(1e-7));
    for (double p : {0.1, 0.5, 1.0})
        for (double phi : {0.2, 0.9, 1.0, 1.1, 4.0})
            for (double lambda : {1e-3, 1e-1, 10.0}) {
                const RegimeParams q{phi, lambda, p};
                CHECK(std::abs(fixed_point_t(q) - (-lambda + 1.0 / stieltjes_m(q))) <= 1e-10);
            }
    CHECK_THROWS_AS(fixed_point_t({1.0, 0.0, 1.0}), RidgelessRequired);
}

TEST_CASE("keep-all state: m~ = m and r_mean = (omega + omega~) m") {
    for (double rho : {0.0, 0.4, 0.9}) {
        const auto sc = scalars_closed_form(SelectionStrategy::keep_all(), rho);
        const auto st = spectral_state({0.7, 0.05, 1.0}, sc);
        CHECK(st.m_tilde == doctest::Approx(st.m).epsilon(1e-14));
        CHECK(st.m_tilde_prime == doctest::Approx(st.m_prime).epsilon(1e-13));
        CHECK(st.r_mean == doctest::Approx((st.omega + st.omega_tilde) * st.m).epsilon(1e-14));
        CHECK(st.m > 0.0);
    }
}

TEST_CASE("derivatives against finite differences and the identities") {
    const double h = 1e-6;
    int points = 0;
    for (double p : {0.2, 0.5, 0.8, 1.0}) {
        const auto sc = compute_scalars(kh_with_p(p), 0.9);
        for (double phi : {0.25, 0.5, 1.5, 3.0}) {
            for (double lambda : {1e-2, 1e-1, 1.0}) {
                const RegimeParams r{phi, lambda, p};
                const auto st = spectral_state(r, sc);
                // d/dz with z = -lambda.
                const double fd_m =
                    -(stieltjes_m({phi, lambda + h, p}) - stieltjes_m({phi, lambda - h, p})) / (2 * h);
                const double fd_mt =
                    -(m_tilde_at(p, phi, lambda + h, sc) - m_tilde_at(p, phi, lambda - h, sc)) / (2 * h);
                CAPTURE(p);
                CAPTURE(phi);
                CAPTURE(lambda);
                CHECK(oracle::rel_close(st.m_prime, fd_m, 1e-6));
                CHECK(oracle::rel_close(st.m_tilde_prime, fd_mt, 1e-6));
                CHECK(oracle::rel_close(st.m_prime, identities::m_prime_from_m(st.m, r), 1e-8));
                CHECK(oracle::rel_close(st.m_prime, identities::m_prime_from_inverse(st.m, r), 1e-8));
                CHECK(oracle::rel_close(
                    st.m_tilde_prime,
                    identities::m_tilde_prime(st.m, st.m_prime, st.m_tilde, sc.gamma, phi), 1e-10));
                ++points;
            }
        }
    }
    CHECK(points == 48);
}

TEST_CASE("point example: KeepHard(1), rho 0.9, p = phi = 0.5, lambda = 0.01") {
    // The spectral point uses p = 0.5 with the scalars of KeepHard(1).
    auto sc = compute_scalars(SelectionStrategy::keep_hard(1.0), 0.9);
    sc.p = 0.5;
    const RegimeParams r{0.5, 0.01, 0.5};
    const auto st = spectral_state(r, sc);
    const double h = 1e-6;
    const double fd = -(stieltjes_m({0.5, 0.01 + h, 0.5}) - stieltjes_m({0.5, 0.01 - h, 0.5})) / (2 * h);
    CHECK(oracle::rel_close(st.m_prime, fd, 1e-6));
    CHECK(oracle::rel_close(st.m_tilde_prime,
                            identities::m_tilde_prime(st.m, st.m_prime, st.m_tilde, sc.gamma, 0.5), 1e-10));
}

TEST_CASE("prediction links") {
    const auto pred = prediction_from_moments(1.0, 2.0, Regime::Ridge);
    CHECK(pred.cosine == doctest::Approx(1.0 / std::sqrt(4.0 / M_PI)).epsilon(1e-15));
    CHECK(pred.test_error == doctest::Approx(std::acos(pred.cosine) / M_PI).epsilon(1e-15));
    CHECK(pred.test_error_gaussian == doctest::Approx(oracle::cdf(-1.0)).epsilon(1e-15));
    CHECK_THROWS_AS(prediction_from_moments(1.0, 1.0, Regime::Ridge), NumericalError);
    CHECK_THROWS_AS(prediction_from_moments(2.0, 3.0, Regime::Ridge), NumericalError);
}

TEST_CASE("keep-all prediction does not depend on rho") {
    const RegimeParams r{0.6, 0.03, 1.0};
    const double ref = theory_test_error(r, scalars_closed_form(SelectionStrategy::keep_all(), 0.0)).test_error;
    for (double rho : {0.3, 0.7, 0.95})
        CHECK(theory_test_error(r, scalars_closed_form(SelectionStrategy::keep_all(), rho)).test_error ==
              doctest::Approx(ref).epsilon(1e-12));
}

TEST_CASE("prediction range and continuity in lambda") {
    for (double xi : {0.3, 1.0, 2.5}) {
        for (double rho : {0.0, 0.5, 1.0}) {
            const auto sc = compute_scalars(SelectionStrategy::keep_hard(xi), rho);
            for (double phi : {0.1, 0.5, 1.0, 2.0, 5.0}) {
                for (double lambda : {1e-4, 1e-2, 1.0}) {
                    const RegimeParams r{phi, lambda, sc.p};
                    const auto a = theory_test_error(r, sc);
                    const auto b = theory_test_error({phi, lambda * (1 + 1e-6), sc.p}, sc);
                    CHECK(a.test_error > 0.0);
                    CHECK(a.test_error <= 0.5);
                    CHECK(a.m0 >= 0.0);
                    CHECK(std::abs(a.test_error - b.test_error) <= 1e-4);
                }
            }
        }
    }
    CHECK_THROWS_AS(theory_test_error({1.0, 0.1, 0.5}, scalars_closed_form(SelectionStrategy::keep_all(), 1.0)),
                    InvalidArgument);
}

TEST_CASE("theory matches simulation at d = 350, KeepHard(1), rho = 1, lambda = 0.01") {
    ExperimentConfig c;
    c.d = 350;
    c.n = 1000;
    c.lambda = 1e-2;
    c.strategy = SelectionStrategy::keep_hard(1.0);
    c.rho = 1.0;
    c.trials = 200;
    c.seed = 4242;
    const auto sc = compute_scalars(c.strategy, 1.0);
    const double theory = theory_test_error({0.35, 1e-2, sc.p}, sc).test_error;
    const auto agg = run_cell(c);
    CHECK(std::abs(agg.mean_error - theory) <= 0.02);
}

TEST_CASE("excessive pruning degrades at fixed kept count") {
    const double d = 512, kept = 1024, lambda = 1e-2;
    auto err = [&](double p) {
        const auto sc = compute_scalars(kh_with_p(p), 1.0);
        return theory_test_error({d / (kept / p), lambda, sc.p}, sc).test_error;
    };
    CHECK(err(0.02) > err(0.5));
    CHECK(err(0.5) < err(1.0));
}

TEST_CASE("ridgeless limit agrees with a tiny ridge") {
    for (auto [phi, p] : {std::pair{0.3, 0.6}, std::pair{0.9, 0.5}}) {
        const auto sc = compute_scalars(kh_with_p(p), 0.8);
        const auto lim = ridgeless_test_error(sc, phi, sc.p);
        const auto ridge = theory_test_error({phi, 1e-8, sc.p}, sc);
        CHECK(std::abs(lim.test_error - ridge.test_error) <= 1e-3);
        CHECK(lim.regime == (phi < p ? Regime::RidgelessUnder : Regime::RidgelessOver));
    }
    const auto sc = compute_scalars(kh_with_p(0.4), 0.8);
    const auto rep = ridgeless_report(sc, 0.8, sc.p);
    CHECK(rep.limit.regime == Regime::RidgelessOver);
    CHECK(rep.c0 == doctest::Approx(0.5).epsilon(1e-12));
    CHECK_THROWS_AS(ridgeless_test_error(sc, sc.p + 5e-4, sc.p), InterpolationThreshold);
}

TEST_CASE("closed-form ridgeless constants coincide with the limit chain when beta~ = rho beta") {
    // Keep-all at rho = 0 has beta~ = 0 = rho beta.
    const auto sc = compute_scalars(SelectionStrategy::keep_all(), 0.0);
    const auto rep = ridgeless_report(sc, 0.3, 1.0);
    REQUIRE(rep.stated.has_value());
    CHECK(rep.stated->test_error == doctest::Approx(rep.limit.test_error).epsilon(1e-10));
}

TEST_CASE("ridgeless error peaks near the interpolation threshold") {
    const double d = 350;
    const auto sc = compute_scalars(SelectionStrategy::keep_hard(1.0), 1.0);
    const double n_star = d / sc.p;
    double best_n = 0, best = -1;
    for (int n = static_cast<int>(0.5 * n_star); n <= static_cast<int>(2 * n_star); ++n) {
        const double phi = d / n;
        if (std::abs(phi - sc.p) < kThresholdExclusion) continue;
        const double e = ridgeless_test_error(sc, phi, sc.p).test_error;
        if (e > best) {
            best = e;
            best_n = n;
        }
    }
    CHECK(std::abs(best_n - n_star) <= 0.1 * n_star);
}

}  // TEST_SUITE
