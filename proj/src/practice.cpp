#include "prunelab/practice.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include <Eigen/Dense>

#include "prunelab/errors.hpp"
#include "prunelab/rng.hpp"
#include "prunelab/simulate.hpp"

namespace prunelab {
namespace {

double sign_label(double v) { return v >= 0.0 ? 1.0 : -1.0; }

Eigen::VectorXd labels_for(const Eigen::MatrixXd& x, const Eigen::VectorXd& w0) {
    Eigen::VectorXd proj = x * w0;
    return proj.unaryExpr([](double v) { return sign_label(v); });
}

Eigen::VectorXd refit(const Eigen::MatrixXd& x, const Eigen::VectorXd& y, double lambda) {
    const Eigen::Array<bool, Eigen::Dynamic, 1> all =
        Eigen::Array<bool, Eigen::Dynamic, 1>::Constant(x.rows(), true);
    return fit_weighted_ridge(x, y, all, lambda).w_hat;
}

double accuracy(const Eigen::MatrixXd& xv, const Eigen::VectorXd& yv, const Eigen::VectorXd& w) {
    const Eigen::VectorXd pred = xv * w;
    long right = 0;
    for (Eigen::Index i = 0; i < pred.size(); ++i)
        if (sign_label(pred[i]) == yv[i]) ++right;
    return static_cast<double>(right) / static_cast<double>(pred.size());
}

Eigen::VectorXd unit_or_axis(const Eigen::VectorXd& w) {
    const double n = w.norm();
    if (n > 0.0) return w / n;
    Eigen::VectorXd e = Eigen::VectorXd::Zero(w.size());
    e[0] = 1.0;
    return e;
}

// Rejection sampling from the pruned law dQ = q(x.ws) dP / p.
Eigen::MatrixXd draw_selected(int count, const Eigen::VectorXd& ws, const SelectionStrategy& q,
                              long max_proposals, RandomStream& stream) {
    const Eigen::Index d = ws.size();
    Eigen::MatrixXd out(count, d);
    long proposals = 0;
    for (int accepted = 0; accepted < count;) {
        if (++proposals > max_proposals) {
            std::ostringstream os;
            os << "rejection sampler exceeded " << max_proposals << " proposals for "
               << q.to_string();
            throw NumericalError(os.str());
        }
        const Eigen::VectorXd x = stream.normal_vector(d);
        const double keep = q(x.dot(ws));
        const bool take = q.is_binary() ? keep > 0.5 : stream.uniform() < keep;
        if (take) out.row(accepted++) = x.transpose();
    }
    return out;
}

}  // namespace

void DPConfig::validate() const {
    if (initial_size < 1) throw InvalidArgument("initial pool size N must be >= 1");
    if (batch_size < 0) throw InvalidArgument("batch size P must be >= 0");
    if (eval_interval < 1) throw InvalidArgument("eval interval must be >= 1");
    if (patience < 1) throw InvalidArgument("patience T_max must be >= 1");
    if (total_steps < 1) throw InvalidArgument("total steps must be >= 1");
    if (d < 1) throw InvalidArgument("d must be >= 1");
    if (!(lambda >= 0.0)) throw InvalidArgument("lambda must be >= 0");
    if (validation_size < 1) throw InvalidArgument("validation size must be >= 1");
    if (max_proposals < 1) throw InvalidArgument("max proposals must be >= 1");
}

std::string_view event_kind_name(EventKind k) {
    switch (k) {
        case EventKind::Warmup: return "warmup";
        case EventKind::Eval: return "eval";
        case EventKind::Augment: return "augment";
        case EventKind::Cooldown: return "cooldown";
    }
    return "eval";
}

DPHistory run_dp(const DPConfig& config) {
    config.validate();
    const int d = config.d;

    RandomStream dir_stream(config.seed, 0, StreamPurpose::Directions);
    Eigen::VectorXd w0 = dir_stream.normal_vector(d);
    w0.normalize();

    RandomStream val_stream(config.seed, 0, StreamPurpose::Validation);
    const Eigen::MatrixXd xv = val_stream.normal_matrix(config.validation_size, d);
    const Eigen::VectorXd yv = labels_for(xv, w0);

    RandomStream init_stream(config.seed, 0, StreamPurpose::InitialPool);
    Eigen::MatrixXd x = init_stream.normal_matrix(config.initial_size, d);
    Eigen::VectorXd y = labels_for(x, w0);

    // Shared by both arms of a paired comparison.
    RandomStream aug_stream(config.seed, 0, StreamPurpose::Augmentation);

    DPHistory hist;
    Eigen::VectorXd w = refit(x, y, config.lambda);
    bool stale = false;
    const Eigen::VectorXd ws_initial = unit_or_axis(w);

    int limit = config.patience;
    int counter = 0;
    double best = -std::numeric_limits<double>::infinity();

    auto record = [&](int step, EventKind kind, double acc, bool augmented) {
        hist.events.push_back({step, kind, static_cast<int>(x.rows()), acc,
                               exact_test_error(w, w0), counter, limit, augmented});
    };

    // Warm-up has no analogue for a closed-form fit; logged for structure.
    record(0, EventKind::Warmup, accuracy(xv, yv, w), false);

    for (int step = 1; step <= config.total_steps; ++step) {
        if (stale) {
            w = refit(x, y, config.lambda);
            stale = false;
        }
        if (step % config.eval_interval != 0) continue;

        const double acc = accuracy(xv, yv, w);
        if (acc > best) {
            best = acc;
            counter = 0;
        } else {
            ++counter;
        }
        record(step, EventKind::Eval, acc, false);

        if (counter >= limit) {
            const Eigen::VectorXd ws = config.refresh_direction ? unit_or_axis(w) : ws_initial;
            if (config.batch_size > 0) {
                const Eigen::MatrixXd fresh = draw_selected(config.batch_size, ws, config.selection,
                                                            config.max_proposals, aug_stream);
                const Eigen::Index old = x.rows();
                x.conservativeResize(old + fresh.rows(), Eigen::NoChange);
                x.bottomRows(fresh.rows()) = fresh;
                y.conservativeResize(old + fresh.rows());
                y.tail(fresh.rows()) = labels_for(fresh, w0);
                stale = true;
            } else {
                hist.static_after_exhaustion = true;
            }
            ++hist.augmentations;
            counter = 0;
            if (config.patience_mode == PatienceMode::Incremental && limit < kInfinitePatience)
                ++limit;
            record(step, EventKind::Augment, acc, true);
        }
    }

    if (stale) w = refit(x, y, config.lambda);
    // Cool-down: no learning-rate schedule to decay; final refit only.
    record(config.total_steps, EventKind::Cooldown, accuracy(xv, yv, w), false);
    hist.final_test_error = exact_test_error(w, w0);

    const Eigen::VectorXd u = unit_or_axis(w);
    const Eigen::VectorXd margins = (x * u).cwiseAbs();
    hist.initial_mean_margin = margins.head(config.initial_size).mean();
    const Eigen::Index added = x.rows() - config.initial_size;
    hist.added_mean_margin = added > 0 ? margins.tail(added).mean() : 0.0;
    return hist;
}

PairedReport compare_adaptive_static(const DPConfig& config, int n_seeds) {
    if (n_seeds < 2) throw InvalidArgument("compare_adaptive_static: need at least 2 seeds");
    config.validate();
    PairedReport rep;
    int wins = 0;
    double sum_a = 0.0, sum_s = 0.0;
    for (int i = 0; i < n_seeds; ++i) {
        DPConfig cfg = config;
        cfg.seed = derive_seed(config.seed, static_cast<std::uint64_t>(i), StreamPurpose::PairedSeed);
        cfg.refresh_direction = true;
        const double adaptive = run_dp(cfg).final_test_error;
        cfg.refresh_direction = false;
        const double frozen = run_dp(cfg).final_test_error;
        rep.deltas.push_back(adaptive - frozen);
        sum_a += adaptive;
        sum_s += frozen;
        if (adaptive < frozen) ++wins;
    }
    const double n = n_seeds;
    rep.mean_adaptive = sum_a / n;
    rep.mean_static = sum_s / n;
    double sum = 0.0;
    for (double v : rep.deltas) sum += v;
    rep.mean_delta = sum / n;
    double ss = 0.0;
    for (double v : rep.deltas) ss += (v - rep.mean_delta) * (v - rep.mean_delta);
    rep.delta_standard_error = std::sqrt(ss / (n - 1.0)) / std::sqrt(n);

    rep.win_rate = wins / n;
    const double z = 1.959963984540054;
    const double z2 = z * z;
    const double centre = (rep.win_rate + z2 / (2.0 * n)) / (1.0 + z2 / n);
    const double half =
        z * std::sqrt(rep.win_rate * (1.0 - rep.win_rate) / n + z2 / (4.0 * n * n)) / (1.0 + z2 / n);
    rep.win_rate_lo = centre - half;
    rep.win_rate_hi = centre + half;
    return rep;
}

}  // namespace prunelab
