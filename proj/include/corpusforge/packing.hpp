#pragma once

#include <cstdint>
#include <functional>
#include <span>

#include "corpusforge/token_shard.hpp"

namespace corpusforge {

struct PackOptions {
    uint32_t seq_len = 4096;
    uint32_t eos_id = 256;
    // The block-diagonal mask is a cooldown-phase feature by default; this
    // flag records whether consumers should apply it. Segment ids are always
    // stored since they are a pure function of EOS positions.
    bool eos_reset_mask = true;
    uint64_t max_doc_tokens = 0;  // 0 = unlimited; longer docs span sequences
};

// Segment ids from EOS positions alone: start at 0, advance by one at the
// position after each EOS.
std::vector<uint16_t> segments_from_tokens(std::span<const uint32_t> tokens, uint32_t eos_id);

// Position i may attend to j iff j <= i and both share a segment.
// Throws Error(Data) when an index is out of range.
bool mask_rule(const PackedSequence& seq, size_t i, size_t j);

// Greedy concatenating packer. Every document is followed by one EOS;
// documents spanning a sequence boundary continue into the next sequence.
// The final partial sequence is completed with EOS padding, each pad
// advancing the segment id, with pad_start marking where padding began.
class Packer {
public:
    using Sink = std::function<void(const PackedSequence&)>;

    Packer(PackOptions options, Sink sink);

    void add_document(std::span<const uint32_t> tokens);

    // Flushes the trailing partial sequence (if any) with EOS padding.
    void finish();

    uint64_t sequences_emitted() const { return emitted_; }
    uint64_t non_pad_tokens() const { return non_pad_tokens_; }
    uint64_t documents() const { return documents_; }

private:
    void drain_full_sequences();
    void emit(std::span<const uint32_t> tokens, uint32_t pad_start);

    PackOptions options_;
    Sink sink_;
    std::vector<uint32_t> buffer_;
    uint64_t emitted_ = 0;
    uint64_t non_pad_tokens_ = 0;
    uint64_t documents_ = 0;
    bool finished_ = false;
};

// Convenience: pack a document stream into memory.
std::vector<PackedSequence> pack(const std::vector<std::vector<uint32_t>>& docs,
                                 const PackOptions& options);

}  // namespace corpusforge
