#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "corpusforge/document.hpp"

namespace corpusforge {

// Sorted unique 64-bit hashes of word windows over the normalized text.
struct ShingleSet {
    std::vector<uint64_t> hashes;

    bool empty() const { return hashes.empty(); }
    size_t size() const { return hashes.size(); }
};

// One hash per contiguous window of `width` normalized words. Fewer than
// `width` words yields an empty set.
ShingleSet shingle(std::string_view text, int width);

// Language-aware shingling: word windows for spaced scripts, single
// characters as words for Chinese (lang == "zh").
ShingleSet shingle_for_lang(std::string_view text, std::string_view lang, int width_en = 13,
                            int width_zh = 5);

struct MinHashSignature {
    std::vector<uint64_t> mins;

    size_t size() const { return mins.size(); }
    bool operator==(const MinHashSignature&) const = default;
};

// k seeded hash functions; slot i holds the minimum of hash_i over the set.
// An empty set maps to the all-sentinel signature (every slot UINT64_MAX).
class MinHasher {
public:
    explicit MinHasher(int num_hashes = 128, uint64_t seed = 0);

    MinHashSignature compute(const ShingleSet& set) const;
    int num_hashes() const { return k_; }
    uint64_t seed() const { return seed_; }

private:
    int k_;
    uint64_t seed_;
    std::vector<uint64_t> slot_seeds_;
};

// Fraction of agreeing slots. Throws Error(Data) on mismatched sizes.
double estimate_jaccard(const MinHashSignature& a, const MinHashSignature& b);

struct LshParams {
    int num_hashes = 128;
    int bands = 16;
    int rows = 8;
};

// Banded index over signatures: b tables, each keyed by the hash of an r-slot
// slice. Construction enforces bands * rows == num_hashes.
class LshIndex {
public:
    explicit LshIndex(LshParams params);

    void insert(const std::string& id, const MinHashSignature& sig);

    // Ids sharing at least one full band slice with sig. Contains the query's
    // own id only if it was previously inserted.
    std::vector<std::string> candidates(const MinHashSignature& sig) const;

    const LshParams& params() const { return params_; }
    size_t size() const { return inserted_; }

private:
    void check_signature(const MinHashSignature& sig) const;
    uint64_t band_key(const MinHashSignature& sig, int band) const;

    LshParams params_;
    size_t inserted_ = 0;
    std::vector<std::unordered_map<uint64_t, std::vector<std::string>>> bands_;
};

struct DedupParams {
    int num_hashes = 128;
    int bands = 16;
    int rows = 8;
    double threshold = 0.8;
    uint64_t seed = 0;
    int width_en = 13;
    int width_zh = 5;
};

struct DuplicateCluster {
    std::string kept;
    std::vector<std::string> dropped;
};

struct DedupReport {
    uint64_t input_docs = 0;
    uint64_t kept_docs = 0;
    std::vector<DuplicateCluster> clusters;
    DedupParams params;
};

struct DedupResult {
    std::vector<Document> kept;  // input order preserved
    DedupReport report;
};

// MinHash + LSH near-duplicate removal. Candidate pairs are verified with
// estimate_jaccard >= threshold, merged with union-find, and each cluster
// keeps its lexicographically smallest id. Documents with empty shingle sets
// are never indexed, so they cannot be dropped as duplicates of each other.
DedupResult dedup_corpus(const std::vector<Document>& docs, const DedupParams& params);

void save_dedup_report(const DedupReport& report, const std::filesystem::path& path);

}  // namespace corpusforge
