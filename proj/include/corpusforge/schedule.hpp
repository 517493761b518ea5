#pragma once

#include <cstdint>
#include <filesystem>

namespace corpusforge {

enum class CooldownShape { Linear, Cosine };

// Warmup -> cosine decay -> terminal cooldown to zero.
struct ScheduleConfig {
    double max_lr = 3.0e-4;
    double min_lr = 3.0e-5;
    uint64_t warmup_steps = 4000;
    uint64_t cosine_steps = 0;
    uint64_t cooldown_steps = 0;
    uint64_t batch_tokens = 5242880;
    CooldownShape cooldown_shape = CooldownShape::Linear;

    uint64_t total_steps() const { return warmup_steps + cosine_steps + cooldown_steps; }
};

void validate(const ScheduleConfig& cfg);

// Piecewise schedule: linear 0 -> max_lr over warmup, then
// min_lr + 0.5 (max_lr - min_lr)(1 + cos(pi t)) over the cosine span, then
// min_lr -> 0 over the cooldown. Continuous at both phase boundaries.
// Throws Error(Data) when step > total_steps().
double lr_at(const ScheduleConfig& cfg, uint64_t step);

// Ceil division. Throws Error(Data) on a zero batch.
uint64_t steps_for_tokens(uint64_t total_tokens, uint64_t batch_tokens);

// Default cosine span: steps to reach 4T tokens at the configured batch,
// minus warmup.
uint64_t default_cosine_steps(const ScheduleConfig& cfg);

// Optimizer hyperparameters, recorded verbatim; nothing is computed here.
struct OptimRecord {
    double beta1 = 0.9;
    double beta2 = 0.95;
    double weight_decay = 0.1;
    double grad_clip = 1.0;
};

ScheduleConfig load_schedule(const std::filesystem::path& path);
void save_schedule(const ScheduleConfig& cfg, const std::filesystem::path& path);

// (step, lr) rows, one per step including both endpoints.
void emit_lr_csv(const ScheduleConfig& cfg, const std::filesystem::path& path);

}  // namespace corpusforge
