#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "corpusforge/hash.hpp"

namespace corpusforge {

struct TokenDoc {
    std::string id;
    std::vector<uint32_t> tokens;
};

// Tokenized documents for one source. doc_bounds are implicit in the per-doc
// layout; documents keep their ids for provenance.
struct TokenShard {
    std::string source;
    std::vector<TokenDoc> docs;

    uint64_t total_tokens() const {
        uint64_t n = 0;
        for (const auto& d : docs) n += d.tokens.size();
        return n;
    }
};

// On-disk layout (all integers little-endian):
//   magic "CFTD", version u16, source (u32 len + bytes),
//   per doc: id (u32 len + bytes), token count u64, tokens u32[],
//   trailer: doc count u64, FNV-1a64 checksum of everything before it.
void write_token_shard(const TokenShard& shard, const std::filesystem::path& path);
TokenShard read_token_shard(const std::filesystem::path& path);

// One fixed-length training sequence. segment_ids start at 0 and advance by
// one at the position after each EOS token. pad_start marks the first tail
// padding token (== tokens.size() when the sequence has no padding).
struct PackedSequence {
    std::vector<uint32_t> tokens;
    std::vector<uint16_t> segment_ids;
    uint32_t pad_start = 0;
};

// Packed-sequence shards:
//   magic "CFTS", version u16, sequence length u32,
//   records: L u32 token ids then L u16 segment ids,
//   trailer: record count u64, FNV-1a64 checksum of everything before it.
class PackedShardWriter {
public:
    PackedShardWriter(const std::filesystem::path& path, uint32_t seq_len);
    ~PackedShardWriter();

    void add(const PackedSequence& seq);
    // Record count written. Renames the temp file into place.
    uint64_t finish();

private:
    std::filesystem::path path_;
    std::filesystem::path tmp_path_;
    uint32_t seq_len_;
    uint64_t records_ = 0;
    bool finished_ = false;
    std::ofstream out_;
    Fnv1a checksum_;
};

struct PackedShard {
    uint32_t seq_len = 0;
    std::vector<PackedSequence> sequences;
};

PackedShard read_packed_shard(const std::filesystem::path& path);

}  // namespace corpusforge
