#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "corpusforge/error.hpp"
#include "corpusforge/rope.hpp"
#include "corpusforge/stage_plan.hpp"
#include "helpers.hpp"

using namespace corpusforge;

TEST_CASE("rotation at position zero is the identity") {
    RopeConfig cfg;
    std::mt19937_64 rng(1);
    std::vector<double> v(cfg.head_dim);
    for (auto& x : v) x = std::uniform_real_distribution<double>(-1, 1)(rng);
    const auto rotated = rope_rotate(v, 0, cfg);
    for (int i = 0; i < cfg.head_dim; ++i) CHECK(rotated[i] == doctest::Approx(v[i]).epsilon(0));
}

TEST_CASE("rotation preserves the norm to 1e-12") {
    RopeConfig cfg;
    std::mt19937_64 rng(2);
    for (int trial = 0; trial < 200; ++trial) {
        std::vector<double> v(cfg.head_dim);
        double norm2 = 0;
        for (auto& x : v) {
            x = std::uniform_real_distribution<double>(-1, 1)(rng);
            norm2 += x * x;
        }
        const auto rotated = rope_rotate(v, rng() % 1048576, cfg);
        double rot2 = 0;
        for (double x : rotated) rot2 += x * x;
        CHECK(std::abs(std::sqrt(norm2) - std::sqrt(rot2)) <= 1e-12);
    }
}

TEST_CASE("hand-checked rotations in 2 dimensions") {
    // Pair 0 always has frequency 1 (exponent -2*0/dim), so position p turns
    // (1,0) into (cos p, sin p); checked by hand at p=1 and p=3.
    RopeConfig cfg;
    cfg.head_dim = 2;
    const auto one = rope_rotate(std::vector<double>{1.0, 0.0}, 1, cfg);
    CHECK(one[0] == doctest::Approx(std::cos(1.0)).epsilon(1e-15));
    CHECK(one[1] == doctest::Approx(std::sin(1.0)).epsilon(1e-15));
    const auto three = rope_rotate(std::vector<double>{0.0, 1.0}, 3, cfg);
    CHECK(three[0] == doctest::Approx(-std::sin(3.0)).epsilon(1e-15));
    CHECK(three[1] == doctest::Approx(std::cos(3.0)).epsilon(1e-15));
}

TEST_CASE("odd-length vectors are rejected") {
    RopeConfig cfg;
    CHECK_THROWS_AS(rope_rotate(std::vector<double>(63, 0.0), 1, cfg), Error);
    RopeConfig odd;
    odd.head_dim = 3;
    CHECK_THROWS_AS(validate(odd), Error);
}

TEST_CASE("rope_dot at equal positions is the plain dot product") {
    RopeConfig cfg;
    std::mt19937_64 rng(3);
    std::vector<double> q(cfg.head_dim), k(cfg.head_dim);
    double plain = 0;
    for (int i = 0; i < cfg.head_dim; ++i) {
        q[i] = std::uniform_real_distribution<double>(-1, 1)(rng);
        k[i] = std::uniform_real_distribution<double>(-1, 1)(rng);
        plain += q[i] * k[i];
    }
    CHECK(rope_dot(q, 777, k, 777, cfg) == doctest::Approx(plain).epsilon(1e-12));
    double qq = 0;
    for (double x : q) qq += x * x;
    CHECK(rope_dot(q, 5, q, 5, cfg) == doctest::Approx(qq).epsilon(1e-12));
}

TEST_CASE("rope_dot depends only on the position difference") {
    RopeConfig cfg;
    cfg.max_pos = 1048576;
    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> unit(-1, 1);
    for (int trial = 0; trial < 500; ++trial) {
        std::vector<double> q(cfg.head_dim), k(cfg.head_dim);
        for (auto& x : q) x = unit(rng);
        for (auto& x : k) x = unit(rng);
        const uint64_t m = rng() % cfg.max_pos;
        const uint64_t n = rng() % cfg.max_pos;
        const uint64_t delta = rng() % cfg.max_pos;
        CHECK(std::abs(rope_dot(q, m, k, n, cfg) - rope_dot(q, m + delta, k, n + delta, cfg)) <=
              1e-9);
    }
}

TEST_CASE("validate_rope sweep passes its thresholds") {
    RopeConfig cfg;
    cfg.max_pos = 1048576;
    const auto report = validate_rope(cfg, 2000, 11);
    CHECK(report.pass);
    CHECK(report.max_shift_deviation <= 1e-9);
    CHECK(report.max_norm_deviation <= 1e-12);
}

TEST_CASE("abf_base scales linearly in the length ratio") {
    RopeConfig cfg;
    CHECK(abf_base(cfg, 4096, 4096) == 10000.0);
    CHECK(abf_base(cfg, 32768, 4096) == 80000.0);
    CHECK(abf_base(cfg, 1048576, 4096) == 2560000.0);
    CHECK_THROWS_AS(abf_base(cfg, 2048, 4096), Error);
}

TEST_CASE("larger bases rotate strictly slower at every frequency") {
    RopeConfig small;
    RopeConfig big;
    big.base = abf_base(small, 32768, 4096);
    for (int pair = 0; pair < small.head_dim / 2; ++pair) {
        if (pair == 0) {
            // pair 0 has exponent zero: frequency 1 for any base
            CHECK(pair_frequency(small, 0) == pair_frequency(big, 0));
            continue;
        }
        CHECK(pair_frequency(big, pair) < pair_frequency(small, pair));
    }
}

TEST_CASE("stage plan over the six default targets") {
    RopeConfig cfg;
    const StagePlan plan = plan_stages(cfg, kDefaultStageTargets);
    REQUIRE(plan.stages.size() == 6);
    CHECK(plan.origin_len == 4096);
    CHECK(plan.stages.front().context_len == 32768);
    CHECK(plan.stages.back().context_len == 1048576);
    double prev_base = cfg.base;
    uint64_t prev_len = plan.origin_len;
    for (const auto& stage : plan.stages) {
        CHECK(stage.context_len > prev_len);
        CHECK(stage.rope_base > prev_base);
        CHECK(stage.min_long_len == stage.context_len / 2);
        CHECK(stage.long_doc_fraction == doctest::Approx(0.3));
        prev_base = stage.rope_base;
        prev_len = stage.context_len;
    }
}

TEST_CASE("single-target and degenerate stage plans") {
    RopeConfig cfg;
    const std::vector<uint64_t> one{32768};
    CHECK(plan_stages(cfg, one).stages.size() == 1);
    CHECK_THROWS_AS(plan_stages(cfg, std::vector<uint64_t>{}), Error);
    CHECK_THROWS_AS(plan_stages(cfg, std::vector<uint64_t>{65536, 32768}), Error);
    CHECK_THROWS_AS(plan_stages(cfg, one, std::vector<uint64_t>{1, 2}), Error);
}

TEST_CASE("stage plan file round trip") {
    testutil::TempDir tmp;
    RopeConfig cfg;
    const std::vector<uint64_t> budgets{100, 200, 300, 400, 500, 600};
    const StagePlan plan = plan_stages(cfg, kDefaultStageTargets, budgets);
    save_stage_plan(plan, tmp / "plan.json");
    const StagePlan loaded = load_stage_plan(tmp / "plan.json");
    REQUIRE(loaded.stages.size() == plan.stages.size());
    for (size_t i = 0; i < plan.stages.size(); ++i) {
        CHECK(loaded.stages[i].context_len == plan.stages[i].context_len);
        CHECK(loaded.stages[i].rope_base == plan.stages[i].rope_base);
        CHECK(loaded.stages[i].token_budget == budgets[i]);
    }
}

TEST_CASE("length histogram buckets powers of two") {
    LengthHistogram hist;
    hist.add(1);     // bucket 0
    hist.add(1023);  // bucket 9
    hist.add(1024);  // bucket 10
    hist.add(4096);  // bucket 12
    CHECK(hist.buckets.at(0) == 1);
    CHECK(hist.buckets.at(9) == 1);
    CHECK(hist.buckets.at(10) == 1);
    CHECK(hist.buckets.at(12) == 1);
    CHECK(hist.total() == 4);
}
