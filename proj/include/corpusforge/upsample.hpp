#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "corpusforge/bbpe.hpp"
#include "corpusforge/document.hpp"
#include "corpusforge/stage_plan.hpp"

namespace corpusforge {

struct UpsampleWeights {
    double long_weight = 1.0;  // relative draw weight of a long document
    uint64_t min_long_len = 0;
    double target_frac = 0.0;
    double observed_frac = 0.0;
    uint64_t long_docs = 0;
    uint64_t short_docs = 0;
};

// Closed-form reweighting: drawing documents with probability proportional
// to their class weight drives the expected long-token share to the target.
// w = (target * short_tokens) / ((1 - target) * long_tokens); a corpus
// already at the target gets weight 1 (no-op). Throws Error(Data) when the
// corpus has no long documents at all (synthesize some first).
UpsampleWeights length_upsample_weights(std::span<const uint64_t> doc_token_lens,
                                        uint64_t min_long_len, double target_long_frac);

struct UpsampleRun {
    std::vector<uint32_t> order;  // drawn document indexes, with repetition
    uint64_t total_tokens = 0;
    uint64_t long_tokens = 0;
};

// Seeded i.i.d. draws until at least token_budget tokens are emitted.
UpsampleRun sample_upsampled(std::span<const uint64_t> doc_token_lens,
                             const UpsampleWeights& weights, uint64_t token_budget,
                             uint64_t seed);

// Concatenates parts (separated by blank lines) until the token count
// reaches target_len; part ids are recorded in meta["synthesized_from"].
// Throws Error(Data) when the parts run out first.
Document synthesize_long_doc(const std::vector<Document>& parts, uint64_t target_len,
                             const BpeModel& tokenizer);

}  // namespace corpusforge
