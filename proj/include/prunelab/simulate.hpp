#pragma once

// Finite-dimensional Monte Carlo ground truth: Gaussian data labeled by
// sign(w0.x), selection by q(x.w_s), closed-form weighted ridge fit.

#include <cstdint>
#include <optional>
#include <utility>

#include <Eigen/Dense>

#include "prunelab/rng.hpp"
#include "prunelab/selection.hpp"

namespace prunelab {

struct ExperimentConfig {
    int d = 2;
    int n = 1;
    double lambda = 1e-2;
    SelectionStrategy strategy = SelectionStrategy::keep_all();
    double rho = 1.0;
    int trials = 1;
    std::uint64_t seed = 0;
    // When > 0, each trial also estimates the test error from this many
    // fresh test points.
    int mc_test_points = 0;

    void validate() const;
};

struct Directions {
    Eigen::VectorXd w0;
    Eigen::VectorXd ws;
};

/// Unit w0 and w_s with w_s.w0 = rho (w_s = rho w0 + sqrt(1-rho^2) w0_perp).
Directions make_directions(int d, double rho, RandomStream& stream);

struct RidgeFit {
    Eigen::VectorXd w_hat;
    int kept_count = 0;
    bool min_norm_least_squares = false;  // lambda == 0 path
    bool rank_deficient = false;
};

/// Solves (X^T D X / n + lambda I) w = X^T D y / n with D = diag(keep).
/// Rows with keep == 0 are dropped before factorization.
RidgeFit fit_weighted_ridge(const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                            const Eigen::Array<bool, Eigen::Dynamic, 1>& keep, double lambda);

/// Exact isotropic test error of w_hat against unit w0: arccos(cos)/pi.
double exact_test_error(const Eigen::VectorXd& w_hat, const Eigen::VectorXd& w0);

struct FitResult {
    Eigen::VectorXd w_hat;
    Eigen::VectorXd w0;
    int kept_count = 0;
    double rho_hat = 0.0;
    double test_error_exact = 0.5;
    std::optional<double> test_error_mc;
    bool min_norm_least_squares = false;
    bool rank_deficient = false;
};

FitResult run_trial(const ExperimentConfig& config, std::uint64_t trial_index);

struct McEstimate {
    double error;
    double standard_error;
};

McEstimate mc_test_error(const Eigen::VectorXd& w_hat, const Eigen::VectorXd& w0, int n_test,
                         RandomStream& stream);

struct CellAggregate {
    double mean_error = 0.0;
    double std_error = 0.0;  // sample standard deviation across trials
    double kept_mean = 0.0;
    int trials = 0;
    int failures = 0;
};

/// Runs config.trials trials on up to `workers` threads. Trials write into
/// per-index slots and are reduced in index order, so the result does not
/// depend on the worker count.
CellAggregate run_cell(const ExperimentConfig& config, int workers = 1);

/// Monte Carlo estimate of E[q(x.w_s) sign(x.w0) x]. Probabilistic
/// strategies contribute their keep probability as a weight.
Eigen::VectorXd estimate_mean_vectors(const SelectionStrategy& strategy, const Eigen::VectorXd& ws,
                                      const Eigen::VectorXd& w0, long n_samples,
                                      RandomStream& stream);

}  // namespace prunelab
