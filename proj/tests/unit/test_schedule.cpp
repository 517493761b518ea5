#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "corpusforge/error.hpp"
#include "corpusforge/schedule.hpp"
#include "corpusforge/util.hpp"
#include "helpers.hpp"

using namespace corpusforge;

namespace {

ScheduleConfig paper_config() {
    ScheduleConfig cfg;  // max 3e-4, min 3e-5, warmup 4000, batch 5242880
    cfg.cosine_steps = default_cosine_steps(cfg);
    cfg.cooldown_steps = 76294;
    return cfg;
}

}  // namespace

TEST_CASE("steps_for_tokens is exact ceil division") {
    CHECK(steps_for_tokens(5242880, 5242880) == 1);
    CHECK(steps_for_tokens(2 * 5242880 - 1, 5242880) == 2);
    CHECK(steps_for_tokens(0, 5242880) == 0);
    CHECK_THROWS_AS(steps_for_tokens(100, 0), Error);
}

TEST_CASE("steps_for_tokens matches a wide-integer oracle at 4T tokens") {
    const uint64_t tokens = 4'000'000'000'000ull;
    const uint64_t batch = 5'242'880ull;
    const unsigned __int128 wide =
        (static_cast<unsigned __int128>(tokens) + batch - 1) / batch;
    CHECK(steps_for_tokens(tokens, batch) == static_cast<uint64_t>(wide));
    CHECK(steps_for_tokens(tokens, batch) == 762940ull);
}

TEST_CASE("schedule endpoints match the published values") {
    const ScheduleConfig cfg = paper_config();
    CHECK(lr_at(cfg, 4000) == 3.0e-4);
    CHECK(lr_at(cfg, cfg.warmup_steps + cfg.cosine_steps) == 3.0e-5);
    CHECK(lr_at(cfg, cfg.total_steps()) == 0.0);
    CHECK(lr_at(cfg, 0) == 0.0);  // warmup starts at zero
}

TEST_CASE("continuity at both phase boundaries within 1e-12") {
    const ScheduleConfig cfg = paper_config();
    const double warmup_end = lr_at(cfg, cfg.warmup_steps);
    const double cosine_start_limit =
        cfg.min_lr + 0.5 * (cfg.max_lr - cfg.min_lr) * (1.0 + std::cos(0.0));
    CHECK(std::abs(warmup_end - cosine_start_limit) <= 1e-12);

    const double cosine_end = lr_at(cfg, cfg.warmup_steps + cfg.cosine_steps);
    const double cooldown_start_limit = cfg.min_lr * (1.0 - 0.0);
    CHECK(std::abs(cosine_end - cooldown_start_limit) <= 1e-12);
}

TEST_CASE("non-increasing after warmup over a full-resolution sweep") {
    ScheduleConfig cfg;
    cfg.cosine_steps = 50000;
    cfg.cooldown_steps = 10000;
    double prev = lr_at(cfg, cfg.warmup_steps);
    for (uint64_t step = cfg.warmup_steps + 1; step <= cfg.total_steps(); ++step) {
        const double lr = lr_at(cfg, step);
        CHECK(lr <= prev);
        prev = lr;
    }
}

TEST_CASE("warmup is linear and scale-equivariant") {
    ScheduleConfig cfg;
    cfg.cosine_steps = 1000;
    cfg.cooldown_steps = 100;
    CHECK(lr_at(cfg, 2000) == doctest::Approx(cfg.max_lr / 2).epsilon(1e-12));

    ScheduleConfig scaled = cfg;
    scaled.max_lr *= 10;
    scaled.min_lr *= 10;
    for (uint64_t step : {0ull, 1234ull, 4000ull, 4500ull, 5000ull, 5100ull})
        CHECK(lr_at(scaled, step) == doctest::Approx(10 * lr_at(cfg, step)).epsilon(1e-12));
}

TEST_CASE("cosine cooldown shape reaches the same endpoints") {
    ScheduleConfig cfg;
    cfg.cosine_steps = 1000;
    cfg.cooldown_steps = 500;
    cfg.cooldown_shape = CooldownShape::Cosine;
    CHECK(lr_at(cfg, cfg.warmup_steps + cfg.cosine_steps) == cfg.min_lr);
    CHECK(lr_at(cfg, cfg.total_steps()) == doctest::Approx(0.0).epsilon(1e-18));
}

TEST_CASE("steps past the end are rejected") {
    ScheduleConfig cfg;
    cfg.cosine_steps = 10;
    cfg.cooldown_steps = 10;
    CHECK_THROWS_AS(lr_at(cfg, cfg.total_steps() + 1), Error);
}

TEST_CASE("optimizer record keeps the published constants") {
    const OptimRecord record;
    CHECK(record.beta1 == 0.9);
    CHECK(record.beta2 == 0.95);
    CHECK(record.weight_decay == 0.1);
    CHECK(record.grad_clip == 1.0);
}

TEST_CASE("schedule config file round trip and csv emission") {
    testutil::TempDir tmp;
    ScheduleConfig cfg;
    cfg.cosine_steps = 200;
    cfg.cooldown_steps = 50;
    save_schedule(cfg, tmp / "sched.json");
    const ScheduleConfig loaded = load_schedule(tmp / "sched.json");
    CHECK(loaded.cosine_steps == 200);
    CHECK(loaded.cooldown_steps == 50);
    CHECK(loaded.batch_tokens == 5242880);

    emit_lr_csv(loaded, tmp / "lr.csv");
    const std::string csv = read_text_file(tmp / "lr.csv");
    CHECK(csv.rfind("step,lr\n", 0) == 0);
    // one line per step plus header and both endpoints
    size_t lines = 0;
    for (char c : csv)
        if (c == '\n') ++lines;
    CHECK(lines == loaded.total_steps() + 2);
}

TEST_CASE("missing cooldown_steps in a config file is an error") {
    testutil::TempDir tmp;
    write_text_file(tmp / "sched.json", R"({"max_lr":3e-4,"min_lr":3e-5})");
    CHECK_THROWS_AS(load_schedule(tmp / "sched.json"), Error);
}
