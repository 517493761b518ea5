#include "corpusforge/schedule.hpp"

#include <json.hpp>

#include <cmath>
#include <fstream>
#include <numbers>

#include "corpusforge/error.hpp"

namespace corpusforge {

using nlohmann::json;

void validate(const ScheduleConfig& cfg) {
    if (!(cfg.min_lr > 0.0) || !(cfg.min_lr < cfg.max_lr))
        fail_data("schedule requires 0 < min_lr < max_lr");
    if (cfg.batch_tokens == 0) fail_data("batch_tokens must be positive");
    if (cfg.total_steps() == 0) fail_data("schedule has zero total steps");
}

double lr_at(const ScheduleConfig& cfg, uint64_t step) {
    validate(cfg);
    if (step > cfg.total_steps())
        fail_data("step " + std::to_string(step) + " past end of schedule (" +
                  std::to_string(cfg.total_steps()) + ")");

    if (step <= cfg.warmup_steps && cfg.warmup_steps > 0) {
        return cfg.max_lr * static_cast<double>(step) / static_cast<double>(cfg.warmup_steps);
    }
    const uint64_t after_warmup = step - cfg.warmup_steps;
    if (after_warmup <= cfg.cosine_steps && cfg.cosine_steps > 0) {
        const double t = static_cast<double>(after_warmup) / static_cast<double>(cfg.cosine_steps);
        return cfg.min_lr +
               0.5 * (cfg.max_lr - cfg.min_lr) * (1.0 + std::cos(std::numbers::pi * t));
    }
    const uint64_t into_cooldown = after_warmup - cfg.cosine_steps;
    if (cfg.cooldown_steps == 0) return cfg.min_lr;
    const double t = static_cast<double>(into_cooldown) / static_cast<double>(cfg.cooldown_steps);
    if (cfg.cooldown_shape == CooldownShape::Cosine)
        return 0.5 * cfg.min_lr * (1.0 + std::cos(std::numbers::pi * t));
    return cfg.min_lr * (1.0 - t);
}

uint64_t steps_for_tokens(uint64_t total_tokens, uint64_t batch_tokens) {
    if (batch_tokens == 0) fail_data("batch_tokens must be positive");
    if (total_tokens == 0) return 0;
    return (total_tokens - 1) / batch_tokens + 1;
}

uint64_t default_cosine_steps(const ScheduleConfig& cfg) {
    const uint64_t pre_cooldown = steps_for_tokens(4'000'000'000'000ull, cfg.batch_tokens);
    if (pre_cooldown <= cfg.warmup_steps) fail_data("warmup longer than the 4T-token span");
    return pre_cooldown - cfg.warmup_steps;
}

ScheduleConfig load_schedule(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) fail_data("cannot open schedule config: " + path.string());
    json doc;
    try {
        in >> doc;
    } catch (const json::exception& e) {
        fail_data("malformed schedule config " + path.string() + ": " + e.what());
    }
    ScheduleConfig cfg;
    cfg.max_lr = doc.value("max_lr", cfg.max_lr);
    cfg.min_lr = doc.value("min_lr", cfg.min_lr);
    cfg.warmup_steps = doc.value("warmup_steps", cfg.warmup_steps);
    cfg.batch_tokens = doc.value("batch_tokens", cfg.batch_tokens);
    cfg.cosine_steps = doc.value("cosine_steps", 0ull);
    if (cfg.cosine_steps == 0) cfg.cosine_steps = default_cosine_steps(cfg);
    if (!doc.contains("cooldown_steps"))
        fail_data("schedule config must set cooldown_steps (no paper-given default exists)");
    cfg.cooldown_steps = doc["cooldown_steps"].get<uint64_t>();
    const std::string shape = doc.value("cooldown_shape", "linear");
    if (shape == "linear")
        cfg.cooldown_shape = CooldownShape::Linear;
    else if (shape == "cosine")
        cfg.cooldown_shape = CooldownShape::Cosine;
    else
        fail_data("cooldown_shape must be 'linear' or 'cosine'");
    validate(cfg);
    return cfg;
}

void save_schedule(const ScheduleConfig& cfg, const std::filesystem::path& path) {
    json doc{{"max_lr", cfg.max_lr},
             {"min_lr", cfg.min_lr},
             {"warmup_steps", cfg.warmup_steps},
             {"cosine_steps", cfg.cosine_steps},
             {"cooldown_steps", cfg.cooldown_steps},
             {"batch_tokens", cfg.batch_tokens},
             {"cooldown_shape",
              cfg.cooldown_shape == CooldownShape::Linear ? "linear" : "cosine"}};
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) fail_data("cannot write schedule config: " + path.string());
    out << doc.dump(2) << "\n";
}

void emit_lr_csv(const ScheduleConfig& cfg, const std::filesystem::path& path) {
    validate(cfg);
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) fail_data("cannot write LR csv: " + path.string());
    out << "step,lr\n";
    out.precision(17);
    for (uint64_t step = 0; step <= cfg.total_steps(); ++step)
        out << step << "," << lr_at(cfg, step) << "\n";
}

}  // namespace corpusforge
