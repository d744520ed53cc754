#pragma once

// Deliberate Practice at linear-model scale: a patience-controlled loop that
// grows the training pool with examples drawn from the pruned distribution
// around the current estimator's decision boundary.

#include <cstdint>
#include <limits>
#include <string_view>
#include <vector>

#include "prunelab/selection.hpp"

namespace prunelab {

enum class PatienceMode { Fixed, Incremental };

inline constexpr int kInfinitePatience = std::numeric_limits<int>::max();

struct DPConfig {
    int initial_size = 128;  // N
    int batch_size = 128;    // P
    int eval_interval = 1;
    int patience = 1;  // T_max; kInfinitePatience disables augmentation
    PatienceMode patience_mode = PatienceMode::Fixed;
    int total_steps = 24;
    SelectionStrategy selection = SelectionStrategy::keep_hard(0.5);
    bool refresh_direction = true;
    int d = 64;
    double lambda = 1e-2;
    int validation_size = 2048;
    std::uint64_t seed = 0;
    // Upper bound on rejection-sampling proposals per augmentation.
    long max_proposals = 50'000'000;

    void validate() const;
};

enum class EventKind { Warmup, Eval, Augment, Cooldown };
std::string_view event_kind_name(EventKind k);

struct DPEvent {
    int step = 0;
    EventKind kind = EventKind::Eval;
    int pool_size = 0;
    double validation_accuracy = 0.0;
    double test_error_exact = 0.5;
    int patience_counter = 0;
    int patience_limit = 0;
    bool augmentation = false;
};

struct DPHistory {
    std::vector<DPEvent> events;
    int augmentations = 0;
    double final_test_error = 0.5;
    // Set when batch_size == 0 and patience ran out: training continued on a
    // fixed pool.
    bool static_after_exhaustion = false;
    // |x . w_hat_final| averaged over the initial pool and over added points.
    double initial_mean_margin = 0.0;
    double added_mean_margin = 0.0;
};

DPHistory run_dp(const DPConfig& config);

struct PairedReport {
    std::vector<double> deltas;  // adaptive - static, per seed
    double mean_delta = 0.0;
    double delta_standard_error = 0.0;
    double mean_adaptive = 0.0;
    double mean_static = 0.0;
    double win_rate = 0.0;  // fraction with adaptive strictly lower
    double win_rate_lo = 0.0;  // Wilson 95% interval
    double win_rate_hi = 0.0;
};

PairedReport compare_adaptive_static(const DPConfig& config, int n_seeds);

}  // namespace prunelab
