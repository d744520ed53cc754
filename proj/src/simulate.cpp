#include "prunelab/simulate.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <numbers>
#include <sstream>
#include <thread>
#include <vector>

#include "prunelab/errors.hpp"

namespace prunelab {
namespace {

constexpr double kUnitTolerance = 1e-9;

void check_unit(const Eigen::VectorXd& v, const char* name) {
    if (std::abs(v.norm() - 1.0) > kUnitTolerance)
        throw InvalidArgument(std::string(name) + " must be a unit vector");
}

double label(double projection) { return projection >= 0.0 ? 1.0 : -1.0; }

}  // namespace

void ExperimentConfig::validate() const {
    if (d < 1) throw InvalidArgument("d must be >= 1");
    if (n < 1) throw InvalidArgument("n must be >= 1");
    if (!(lambda >= 0.0) || !std::isfinite(lambda)) throw InvalidArgument("lambda must be >= 0");
    if (trials < 1) throw InvalidArgument("trials must be >= 1");
    if (mc_test_points < 0) throw InvalidArgument("mc_test_points must be >= 0");
    check_alignment(rho);
    if (d < 2 && std::abs(rho) < 1.0)
        throw InvalidArgument("d >= 2 is required when |rho| < 1");
}

Directions make_directions(int d, double rho, RandomStream& stream) {
    check_alignment(rho);
    if (d < 1) throw InvalidArgument("make_directions: d must be >= 1");
    if (d < 2 && std::abs(rho) < 1.0)
        throw InvalidArgument("make_directions: d >= 2 is required when |rho| < 1");
    Directions out;
    out.w0 = stream.normal_vector(d);
    out.w0.normalize();
    if (std::abs(rho) == 1.0) {
        out.ws = rho * out.w0;
        return out;
    }
    Eigen::VectorXd perp = stream.normal_vector(d);
    perp -= perp.dot(out.w0) * out.w0;
    perp.normalize();
    // Second Gram-Schmidt pass keeps w0.perp at rounding level.
    perp -= perp.dot(out.w0) * out.w0;
    perp.normalize();
    out.ws = rho * out.w0 + std::sqrt(1.0 - rho * rho) * perp;
    return out;
}

RidgeFit fit_weighted_ridge(const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                            const Eigen::Array<bool, Eigen::Dynamic, 1>& keep, double lambda) {
    const Eigen::Index n = x.rows(), d = x.cols();
    if (y.size() != n || keep.size() != n)
        throw InvalidArgument("fit_weighted_ridge: row count mismatch");
    if (!(lambda >= 0.0)) throw InvalidArgument("fit_weighted_ridge: lambda must be >= 0");

    std::vector<Eigen::Index> rows;
    rows.reserve(static_cast<std::size_t>(n));
    for (Eigen::Index i = 0; i < n; ++i)
        if (keep[i]) rows.push_back(i);
    const auto k = static_cast<Eigen::Index>(rows.size());

    RidgeFit fit;
    fit.kept_count = static_cast<int>(k);
    fit.w_hat = Eigen::VectorXd::Zero(d);
    if (k == 0) return fit;

    Eigen::MatrixXd xk(k, d);
    Eigen::VectorXd yk(k);
    for (Eigen::Index r = 0; r < k; ++r) {
        xk.row(r) = x.row(rows[static_cast<std::size_t>(r)]);
        yk[r] = y[rows[static_cast<std::size_t>(r)]];
    }
    const double inv_n = 1.0 / static_cast<double>(n);

    if (lambda == 0.0) {
        fit.min_norm_least_squares = true;
        Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(xk);
        fit.w_hat = cod.solve(yk);
        fit.rank_deficient = cod.rank() < d;
        return fit;
    }

    if (k >= d) {
        Eigen::MatrixXd a = Eigen::MatrixXd::Zero(d, d);
        a.selfadjointView<Eigen::Lower>().rankUpdate(xk.transpose(), inv_n);
        a.diagonal().array() += lambda;
        const Eigen::VectorXd b = xk.transpose() * yk * inv_n;
        Eigen::LLT<Eigen::MatrixXd, Eigen::Lower> llt(a);
        if (llt.info() != Eigen::Success) throw NumericalError("ridge system is not positive definite");
        fit.w_hat = llt.solve(b);
    } else {
        // Fewer kept rows than features: solve in the k-dimensional dual.
        Eigen::MatrixXd kernel = Eigen::MatrixXd::Zero(k, k);
        kernel.selfadjointView<Eigen::Lower>().rankUpdate(xk, inv_n);
        kernel.diagonal().array() += lambda;
        Eigen::LLT<Eigen::MatrixXd, Eigen::Lower> llt(kernel);
        if (llt.info() != Eigen::Success) throw NumericalError("ridge kernel is not positive definite");
        const Eigen::VectorXd alpha = llt.solve(yk * inv_n);
        fit.w_hat = xk.transpose() * alpha;
    }
    return fit;
}

double exact_test_error(const Eigen::VectorXd& w_hat, const Eigen::VectorXd& w0) {
    const double norm = w_hat.norm() * w0.norm();
    if (norm == 0.0) return 0.5;
    const double c = std::clamp(w_hat.dot(w0) / norm, -1.0, 1.0);
    return std::acos(c) / std::numbers::pi;
}

FitResult run_trial(const ExperimentConfig& config, std::uint64_t trial_index) {
    config.validate();
    const int d = config.d, n = config.n;

    RandomStream dir_stream(config.seed, trial_index, StreamPurpose::Directions);
    const Directions dirs = make_directions(d, config.rho, dir_stream);

    RandomStream design(config.seed, trial_index, StreamPurpose::Design);
    const Eigen::MatrixXd x = design.normal_matrix(n, d);
    const Eigen::VectorXd proj_label = x * dirs.w0;
    const Eigen::VectorXd proj_select = x * dirs.ws;

    Eigen::VectorXd y(n);
    Eigen::Array<bool, Eigen::Dynamic, 1> keep(n);
    RandomStream coin(config.seed, trial_index, StreamPurpose::Selection);
    const bool binary = config.strategy.is_binary();
    for (int i = 0; i < n; ++i) {
        y[i] = label(proj_label[i]);
        const double q = config.strategy(proj_select[i]);
        keep[i] = binary ? (q > 0.5) : (coin.uniform() < q);
    }

    const RidgeFit fit = fit_weighted_ridge(x, y, keep, config.lambda);
    FitResult out;
    out.w_hat = fit.w_hat;
    out.w0 = dirs.w0;
    out.kept_count = fit.kept_count;
    out.min_norm_least_squares = fit.min_norm_least_squares;
    out.rank_deficient = fit.rank_deficient;
    const double norm = fit.w_hat.norm();
    out.rho_hat = norm > 0.0 ? std::clamp(fit.w_hat.dot(dirs.w0) / norm, -1.0, 1.0) : 0.0;
    out.test_error_exact = std::acos(out.rho_hat) / std::numbers::pi;
    if (config.mc_test_points > 0 && norm > 0.0) {
        RandomStream test(config.seed, trial_index, StreamPurpose::TestPoints);
        out.test_error_mc = mc_test_error(fit.w_hat, dirs.w0, config.mc_test_points, test).error;
    }
    return out;
}

McEstimate mc_test_error(const Eigen::VectorXd& w_hat, const Eigen::VectorXd& w0, int n_test,
                         RandomStream& stream) {
    if (w_hat.size() != w0.size()) throw InvalidArgument("mc_test_error: dimension mismatch");
    if (w_hat.norm() == 0.0 || w0.norm() == 0.0)
        throw InvalidArgument("mc_test_error: vectors must be nonzero");
    if (n_test < 1) throw InvalidArgument("mc_test_error: n_test must be >= 1");
    const Eigen::Index d = w0.size();
    constexpr int kBlock = 4096;
    long wrong = 0;
    for (int done = 0; done < n_test;) {
        const int rows = std::min(kBlock, n_test - done);
        const Eigen::MatrixXd x = stream.normal_matrix(rows, d);
        const Eigen::VectorXd a = x * w_hat;
        const Eigen::VectorXd b = x * w0;
        for (int i = 0; i < rows; ++i)
            if (label(a[i]) != label(b[i])) ++wrong;
        done += rows;
    }
    const double e = static_cast<double>(wrong) / n_test;
    return {e, std::sqrt(e * (1.0 - e) / n_test)};
}

CellAggregate run_cell(const ExperimentConfig& config, int workers) {
    config.validate();
    const int trials = config.trials;
    struct Slot {
        bool ok = false;
        double error = 0.0;
        int kept = 0;
    };
    std::vector<Slot> slots(static_cast<std::size_t>(trials));
    std::atomic<int> next{0};
    auto work = [&] {
        for (int t = next.fetch_add(1); t < trials; t = next.fetch_add(1)) {
            Slot& slot = slots[static_cast<std::size_t>(t)];
            try {
                const FitResult r = run_trial(config, static_cast<std::uint64_t>(t));
                slot = {true, r.test_error_exact, r.kept_count};
            } catch (const std::exception&) {
                slot.ok = false;
            }
        }
    };
    const int n_threads = std::clamp(workers, 1, trials);
    if (n_threads == 1) {
        work();
    } else {
        std::vector<std::thread> pool;
        for (int i = 0; i < n_threads; ++i) pool.emplace_back(work);
        for (auto& th : pool) th.join();
    }

    CellAggregate agg;
    double sum = 0.0, kept = 0.0;
    for (const Slot& s : slots) {
        if (!s.ok) {
            ++agg.failures;
            continue;
        }
        ++agg.trials;
        sum += s.error;
        kept += s.kept;
    }
    if (agg.trials == 0) {
        agg.mean_error = agg.std_error = agg.kept_mean = std::nan("");
        return agg;
    }
    agg.mean_error = sum / agg.trials;
    agg.kept_mean = kept / agg.trials;
    if (agg.trials > 1) {
        double ss = 0.0;
        for (const Slot& s : slots)
            if (s.ok) ss += (s.error - agg.mean_error) * (s.error - agg.mean_error);
        agg.std_error = std::sqrt(ss / (agg.trials - 1));
    }
    return agg;
}

Eigen::VectorXd estimate_mean_vectors(const SelectionStrategy& strategy, const Eigen::VectorXd& ws,
                                      const Eigen::VectorXd& w0, long n_samples,
                                      RandomStream& stream) {
    check_unit(ws, "w_s");
    check_unit(w0, "w0");
    if (ws.size() != w0.size()) throw InvalidArgument("estimate_mean_vectors: dimension mismatch");
    if (n_samples < 1) throw InvalidArgument("estimate_mean_vectors: n_samples must be >= 1");
    const Eigen::Index d = w0.size();
    constexpr long kBlock = 8192;
    Eigen::VectorXd acc = Eigen::VectorXd::Zero(d);
    for (long done = 0; done < n_samples;) {
        const long rows = std::min(kBlock, n_samples - done);
        const Eigen::MatrixXd x = stream.normal_matrix(rows, d);
        const Eigen::VectorXd ps = x * ws;
        const Eigen::VectorXd p0 = x * w0;
        Eigen::VectorXd weight(rows);
        for (long i = 0; i < rows; ++i) weight[i] = strategy(ps[i]) * label(p0[i]);
        acc.noalias() += x.transpose() * weight;
        done += rows;
    }
    return acc / static_cast<double>(n_samples);
}

}  // namespace prunelab
