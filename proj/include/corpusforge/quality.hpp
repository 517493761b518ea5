#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "corpusforge/document.hpp"

namespace corpusforge {

struct FilterRuleSet {
    uint64_t min_chars = 0;
    double max_mean_word_len = 1e18;
    double max_line_dup_frac = 1.0;
    double max_symbol_frac = 1.0;
    double max_top2gram_frac = 1.0;
    std::optional<double> ppl_max;
};

struct RuleMeasurements {
    uint64_t chars = 0;            // codepoints
    double mean_word_len = 0.0;    // codepoints per whitespace-separated word
    double line_dup_frac = 0.0;    // 1 - unique_lines / total_lines
    double symbol_frac = 0.0;      // punct/symbol share of non-whitespace codepoints
    double top2gram_frac = 0.0;    // most frequent word bigram / total bigrams
};

RuleMeasurements measure(const Document& doc);

struct Violation {
    std::string rule;
    double measured = 0.0;
};

struct FilterVerdict {
    bool pass = true;
    std::vector<Violation> triggered;  // every violated rule, not just the first
};

// The perplexity score is consumed, never computed here. A document with
// lang == "zh" must come with a score whenever the ruleset has ppl_max;
// otherwise the ppl rule applies only when a score happens to be supplied.
FilterVerdict apply_rules(const Document& doc, const FilterRuleSet& rules,
                          std::optional<double> ppl);

struct FilterReport {
    uint64_t input_docs = 0;
    uint64_t kept_docs = 0;
    uint64_t rejected_docs = 0;
    std::map<std::string, uint64_t> by_rule;  // multi-trigger counts, sum >= rejected
};

struct FilterResult {
    std::vector<Document> kept;
    FilterReport report;
};

FilterResult filter_corpus(const std::vector<Document>& docs, const FilterRuleSet& rules,
                           const std::map<std::string, double>& ppl_scores);

FilterRuleSet load_rules(const std::filesystem::path& path);
void save_rules(const FilterRuleSet& rules, const std::filesystem::path& path);

// Sidecar format: JSONL of {"id": ..., "ppl": ...}.
std::map<std::string, double> load_ppl_sidecar(const std::filesystem::path& path);

}  // namespace corpusforge
