#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace corpusforge {

struct ShardEntry {
    std::string path;
    uint64_t doc_count = 0;
    uint64_t byte_count = 0;
    uint64_t checksum = 0;  // FNV-1a64 of the raw shard bytes
};

struct SourceTotals {
    uint64_t doc_count = 0;
    std::optional<uint64_t> token_count;  // present only after a tokenizer pass
};

struct CorpusManifest {
    std::vector<ShardEntry> shards;
    std::map<std::string, SourceTotals> per_source;
};

struct SourceStats {
    std::string source;
    uint64_t doc_count = 0;
    double doc_fraction = 0.0;
    std::optional<uint64_t> token_count;
    std::optional<double> token_fraction;
};

// Per-source counts with fractions; fractions sum to 1 within 1e-9.
// Throws Error(Data) when shard totals disagree with per-source totals.
std::vector<SourceStats> corpus_stats(const CorpusManifest& manifest);

void save_manifest(const CorpusManifest& manifest, const std::filesystem::path& path);
CorpusManifest load_manifest(const std::filesystem::path& path);

}  // namespace corpusforge
