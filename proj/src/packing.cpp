#include "corpusforge/packing.hpp"

#include "corpusforge/error.hpp"

namespace corpusforge {

std::vector<uint16_t> segments_from_tokens(std::span<const uint32_t> tokens, uint32_t eos_id) {
    std::vector<uint16_t> segments(tokens.size(), 0);
    uint32_t segment = 0;
    for (size_t i = 1; i < tokens.size(); ++i) {
        if (tokens[i - 1] == eos_id) {
            ++segment;
            if (segment > UINT16_MAX)
                fail_data("sequence has more than 65535 segments; segment ids are u16");
        }
        segments[i] = static_cast<uint16_t>(segment);
    }
    return segments;
}

bool mask_rule(const PackedSequence& seq, size_t i, size_t j) {
    if (i >= seq.tokens.size() || j >= seq.tokens.size())
        fail_data("mask_rule index out of range: (" + std::to_string(i) + "," +
                  std::to_string(j) + ") for length " + std::to_string(seq.tokens.size()));
    return j <= i && seq.segment_ids[i] == seq.segment_ids[j];
}

Packer::Packer(PackOptions options, Sink sink) : options_(options), sink_(std::move(sink)) {
    if (options_.seq_len < 2) fail_data("pack sequence length must be >= 2");
    buffer_.reserve(options_.seq_len * 2);
}

void Packer::emit(std::span<const uint32_t> tokens, uint32_t pad_start) {
    PackedSequence seq;
    seq.tokens.assign(tokens.begin(), tokens.end());
    seq.segment_ids = segments_from_tokens(seq.tokens, options_.eos_id);
    seq.pad_start = pad_start;
    ++emitted_;
    non_pad_tokens_ += pad_start;
    sink_(seq);
}

void Packer::drain_full_sequences() {
    const uint32_t L = options_.seq_len;
    size_t offset = 0;
    while (buffer_.size() - offset >= L) {
        emit(std::span<const uint32_t>(buffer_.data() + offset, L), L);
        offset += L;
    }
    if (offset > 0) buffer_.erase(buffer_.begin(), buffer_.begin() + static_cast<long>(offset));
}

void Packer::add_document(std::span<const uint32_t> tokens) {
    if (finished_) fail_data("packer already finished");
    if (options_.max_doc_tokens != 0 && tokens.size() > options_.max_doc_tokens)
        fail_data("document of " + std::to_string(tokens.size()) +
                  " tokens exceeds the configured cap of " +
                  std::to_string(options_.max_doc_tokens));
    buffer_.insert(buffer_.end(), tokens.begin(), tokens.end());
    buffer_.push_back(options_.eos_id);
    ++documents_;
    drain_full_sequences();
}

void Packer::finish() {
    if (finished_) return;
    finished_ = true;
    if (buffer_.empty()) return;
    const uint32_t pad_start = static_cast<uint32_t>(buffer_.size());
    while (buffer_.size() < options_.seq_len) buffer_.push_back(options_.eos_id);
    emit(buffer_, pad_start);
    buffer_.clear();
}

std::vector<PackedSequence> pack(const std::vector<std::vector<uint32_t>>& docs,
                                 const PackOptions& options) {
    std::vector<PackedSequence> out;
    Packer packer(options, [&](const PackedSequence& seq) { out.push_back(seq); });
    for (const auto& doc : docs) packer.add_document(doc);
    packer.finish();
    return out;
}

}  // namespace corpusforge
