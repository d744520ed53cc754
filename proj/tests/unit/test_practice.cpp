#include <doctest.h>

#include "prunelab/errors.hpp"
#include "prunelab/practice.hpp"

using namespace prunelab;

namespace {

DPConfig quick() {
    DPConfig c;
    c.d = 24;
    c.initial_size = 40;
    c.batch_size = 30;
    c.total_steps = 16;
    c.validation_size = 512;
    c.seed = 5;
    return c;
}

void check_history_invariants(const DPConfig& c, const DPHistory& h) {
    REQUIRE(!h.events.empty());
    CHECK(h.events.front().kind == EventKind::Warmup);
    CHECK(h.events.back().kind == EventKind::Cooldown);
    int prev_pool = c.initial_size;
    int augmentations = 0;
    int limit = c.patience;
    for (std::size_t i = 0; i < h.events.size(); ++i) {
        const auto& e = h.events[i];
        CHECK(e.pool_size >= prev_pool);
        prev_pool = e.pool_size;
        // Augment events carry the limit in force after the augmentation.
        if (e.kind == EventKind::Augment && c.patience_mode == PatienceMode::Incremental) ++limit;
        CHECK(e.patience_limit == limit);
        if (e.kind == EventKind::Augment) {
            // Only directly after an evaluation that reached the limit.
            REQUIRE(i > 0);
            const auto& before = h.events[i - 1];
            CHECK(before.kind == EventKind::Eval);
            CHECK(before.step == e.step);
            CHECK(before.patience_counter == before.patience_limit);
            CHECK(e.patience_counter == 0);
            CHECK(e.augmentation);
            ++augmentations;
            CHECK(e.pool_size == c.initial_size + augmentations * c.batch_size);
        } else {
            CHECK(!e.augmentation);
            CHECK(e.patience_counter <= e.patience_limit);
        }
        if (e.kind == EventKind::Eval) CHECK(e.step % c.eval_interval == 0);
    }
    CHECK(augmentations == h.augmentations);
    CHECK(h.events.back().pool_size == c.initial_size + h.augmentations * c.batch_size);
    CHECK(h.final_test_error == h.events.back().test_error_exact);
}

}  // namespace

TEST_SUITE("practice") {

TEST_CASE("config validation") {
    auto c = quick();
    CHECK_NOTHROW(c.validate());
    c.initial_size = 0;
    CHECK_THROWS_AS(run_dp(c), InvalidArgument);
    c = quick();
    c.batch_size = -1;
    CHECK_THROWS_AS(c.validate(), InvalidArgument);
    c = quick();
    c.eval_interval = 0;
    CHECK_THROWS_AS(c.validate(), InvalidArgument);
    c = quick();
    c.patience = 0;
    CHECK_THROWS_AS(c.validate(), InvalidArgument);
}

TEST_CASE("infinite patience never augments") {
    auto c = quick();
    c.patience = kInfinitePatience;
    const auto h = run_dp(c);
    CHECK(h.augmentations == 0);
    for (const auto& e : h.events) CHECK(e.pool_size == c.initial_size);
    check_history_invariants(c, h);
}

TEST_CASE("history invariants across modes") {
    for (auto mode : {PatienceMode::Fixed, PatienceMode::Incremental}) {
        for (int interval : {1, 3}) {
            for (int patience : {1, 2}) {
                auto c = quick();
                c.patience_mode = mode;
                c.eval_interval = interval;
                c.patience = patience;
                c.total_steps = 30;
                const auto h = run_dp(c);
                CAPTURE(interval);
                CAPTURE(patience);
                check_history_invariants(c, h);
                CHECK(h.augmentations > 0);
            }
        }
    }
}

TEST_CASE("patience counter follows strict improvement") {
    auto c = quick();
    c.patience = 3;
    c.total_steps = 40;
    const auto h = run_dp(c);
    double best = -1.0;
    int counter = 0;
    for (const auto& e : h.events) {
        if (e.kind == EventKind::Augment) {
            counter = 0;
            continue;
        }
        if (e.kind != EventKind::Eval) continue;
        if (e.validation_accuracy > best) {
            best = e.validation_accuracy;
            counter = 0;
        } else {
            ++counter;
        }
        CHECK(e.patience_counter == counter);
    }
}

TEST_CASE("runs are reproducible") {
    const auto c = quick();
    const auto a = run_dp(c);
    const auto b = run_dp(c);
    REQUIRE(a.events.size() == b.events.size());
    for (std::size_t i = 0; i < a.events.size(); ++i) {
        CHECK(a.events[i].pool_size == b.events[i].pool_size);
        CHECK(a.events[i].validation_accuracy == b.events[i].validation_accuracy);
        CHECK(a.events[i].test_error_exact == b.events[i].test_error_exact);
    }
    CHECK(a.final_test_error == b.final_test_error);
}

TEST_CASE("zero batch size degrades to static training") {
    auto c = quick();
    c.batch_size = 0;
    const auto h = run_dp(c);
    CHECK(h.static_after_exhaustion);
    CHECK(h.augmentations > 0);
    CHECK(h.events.back().pool_size == c.initial_size);

    const auto rep = compare_adaptive_static(c, 4);
    for (double dlt : rep.deltas) CHECK(dlt == 0.0);
    CHECK(rep.mean_delta == 0.0);
}

TEST_CASE("paired comparison needs two seeds") {
    CHECK_THROWS_AS(compare_adaptive_static(quick(), 1), InvalidArgument);
}

TEST_CASE("paired report fields") {
    const auto rep = compare_adaptive_static(quick(), 6);
    REQUIRE(rep.deltas.size() == 6);
    double sum = 0.0;
    int wins = 0;
    for (double dlt : rep.deltas) {
        sum += dlt;
        wins += dlt < 0.0;
    }
    CHECK(rep.mean_delta == doctest::Approx(sum / 6).epsilon(1e-12));
    CHECK(rep.mean_delta == doctest::Approx(rep.mean_adaptive - rep.mean_static).epsilon(1e-9));
    CHECK(rep.win_rate == doctest::Approx(wins / 6.0));
    CHECK(rep.win_rate_lo <= rep.win_rate);
    CHECK(rep.win_rate_hi >= rep.win_rate);
    CHECK(rep.win_rate_lo >= 0.0);
    CHECK(rep.win_rate_hi <= 1.0);
}

TEST_CASE("keep-all arms are exchangeable") {
    auto c = quick();
    c.selection = SelectionStrategy::keep_all();
    const auto rep = compare_adaptive_static(c, 20);
    CHECK(std::abs(rep.mean_delta) <= 2 * rep.delta_standard_error);
}

TEST_CASE("added points lie nearer the final boundary") {
    DPConfig c;  // defaults: keep-hard around w_hat
    c.total_steps = 16;
    for (std::uint64_t seed : {1u, 2u, 3u}) {
        c.seed = seed;
        const auto h = run_dp(c);
        REQUIRE(h.augmentations > 0);
        CHECK(h.added_mean_margin < h.initial_mean_margin);
    }
}

TEST_CASE("rejection sampler cap is enforced") {
    auto c = quick();
    c.selection = SelectionStrategy::keep_hard(1e-9);
    c.max_proposals = 1000;
    CHECK_THROWS_AS(run_dp(c), NumericalError);
}

}  // TEST_SUITE
