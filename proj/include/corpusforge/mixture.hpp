#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "corpusforge/token_shard.hpp"

namespace corpusforge {

struct MixtureEntry {
    std::string source;
    double weight = 0.0;
    std::vector<std::string> shards;  // token shard paths for this source
};

struct MixtureSpec {
    std::vector<MixtureEntry> entries;
    uint32_t epochs = 1;
    uint64_t seed = 0;
};

// Throws Error(Data) unless weights are positive, sum to 1 within 1e-9, and
// sources are unique.
void validate(const MixtureSpec& spec);

// Per-source token quotas: round(weight * total * epochs) with a
// largest-remainder correction so quotas sum exactly to total * epochs.
std::map<std::string, uint64_t> plan_mixture(const MixtureSpec& spec, uint64_t total_tokens);

struct SourceDocs {
    std::string source;
    std::vector<const TokenDoc*> docs;
};

struct SampleReport {
    std::map<std::string, uint64_t> tokens_per_source;
    std::map<std::string, uint64_t> wraps_per_source;  // epoch repetitions
    uint64_t total_tokens = 0;
};

struct SamplePlan {
    // (source index, doc index) in emit order; doc indexes wrap modulo the
    // source's doc count when a source repeats.
    std::vector<std::pair<uint32_t, uint32_t>> order;
    SampleReport report;
};

// Seeded categorical draw per document, weighted by remaining quota; an
// exhausted source wraps to its start. Deterministic for a given seed and
// input order. Throws Error(Data) if any source has no documents.
SamplePlan sample_stream(const std::vector<SourceDocs>& sources, const MixtureSpec& spec,
                         uint64_t total_tokens);

MixtureSpec load_mixture_spec(const std::filesystem::path& path);
void save_mixture_plan(const MixtureSpec& spec, const std::map<std::string, uint64_t>& quotas,
                       uint64_t total_tokens, const std::filesystem::path& path);
// Reads back a plan file; quotas land in *quotas when non-null.
MixtureSpec load_mixture_plan(const std::filesystem::path& path,
                              std::map<std::string, uint64_t>* quotas = nullptr,
                              uint64_t* total_tokens = nullptr);

}  // namespace corpusforge
