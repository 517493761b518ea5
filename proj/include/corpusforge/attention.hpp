#pragma once

#include <cstdint>
#include <vector>

#include "corpusforge/packing.hpp"
#include "corpusforge/rope.hpp"

namespace corpusforge {

// Row-major L x L attention weights from the deterministic probe forward.
struct AttentionMatrix {
    size_t length = 0;
    std::vector<double> weights;

    double at(size_t i, size_t j) const { return weights[i * length + j]; }
};

// Model-free forward used to verify masking and positional math: Q/K come
// from a seeded hash of (probe seed, position, token id), rows are softmax
// over rope_dot / sqrt(head_dim) restricted to mask_rule-visible positions,
// and masked weights are exactly zero. A validator, not a model: sequences
// longer than `cap` are rejected.
AttentionMatrix tiny_attention_forward(const PackedSequence& seq, const RopeConfig& cfg,
                                       uint64_t probe_seed, size_t cap = 512);

}  // namespace corpusforge
