#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <map>
#include <span>
#include <vector>

#include "corpusforge/rope.hpp"

namespace corpusforge {

// Context-extension curriculum targets, 32k through 1M.
inline constexpr std::array<uint64_t, 6> kDefaultStageTargets{32768,  65536,  131072,
                                                              262144, 524288, 1048576};

struct Stage {
    uint64_t context_len = 0;
    double rope_base = 0.0;
    uint64_t token_budget = 0;
    double long_doc_fraction = 0.3;
    uint64_t min_long_len = 0;  // defaults to context_len / 2
};

struct StagePlan {
    uint64_t origin_len = 4096;
    double origin_base = 10000.0;
    int head_dim = 64;
    std::vector<Stage> stages;
};

// One stage per target with abf_base applied against the origin length.
// Targets must be ascending and at least the origin; budgets may be empty
// (all zero) or one per target.
StagePlan plan_stages(const RopeConfig& base_cfg, std::span<const uint64_t> targets,
                      std::span<const uint64_t> budgets = {});

void save_stage_plan(const StagePlan& plan, const std::filesystem::path& path);
StagePlan load_stage_plan(const std::filesystem::path& path);

// Document counts bucketed by floor(log2(token_length)).
struct LengthHistogram {
    std::map<int, uint64_t> buckets;

    void add(uint64_t token_len);
    uint64_t total() const;
};

LengthHistogram build_length_histogram(std::span<const uint64_t> doc_token_lens);

}  // namespace corpusforge
