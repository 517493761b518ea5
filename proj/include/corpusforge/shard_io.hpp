#pragma once

#include <filesystem>
#include <fstream>
#include <functional>
#include <optional>
#include <vector>

#include "corpusforge/document.hpp"
#include "corpusforge/hash.hpp"
#include "corpusforge/manifest.hpp"

namespace corpusforge {

// Streaming reader over one JSONL shard. Documents come back in file order
// with the 1-based line number recorded in meta["line"]. Unknown JSON fields
// are preserved into meta. Duplicate ids within the shard are an error.
class ShardReader {
public:
    explicit ShardReader(const std::filesystem::path& path);

    // nullopt at end of file. Throws Error(Data) on malformed lines, carrying
    // the line number and byte offset.
    std::optional<Document> next();

    const std::filesystem::path& path() const { return path_; }

private:
    std::filesystem::path path_;
    std::ifstream in_;
    uint64_t line_no_ = 0;
    uint64_t byte_offset_ = 0;
    std::vector<std::string> seen_ids_;  // sorted, for duplicate detection
};

std::vector<Document> read_shard(const std::filesystem::path& path);

// Streaming writer. Validates each document before serializing it; writes go
// to a temporary file that is renamed into place by finish(), so a failed
// write never leaves bytes at the target path.
class ShardWriter {
public:
    explicit ShardWriter(const std::filesystem::path& path);
    ~ShardWriter();

    void add(const Document& doc);
    ShardEntry finish();

    const std::map<std::string, uint64_t>& docs_per_source() const { return per_source_; }

private:
    std::filesystem::path path_;
    std::filesystem::path tmp_path_;
    std::ofstream out_;
    Fnv1a checksum_;
    uint64_t doc_count_ = 0;
    uint64_t byte_count_ = 0;
    bool finished_ = false;
    std::map<std::string, uint64_t> per_source_;
};

// Validates every document up front, then writes; nothing is written if any
// document is invalid.
ShardEntry write_shard(const std::vector<Document>& docs, const std::filesystem::path& path);

// One JSONL line for a document, without trailing newline. Field order is
// fixed (id, source, category, lang, text, extras sorted by key) so the same
// documents always serialize to the same bytes.
std::string to_jsonl_line(const Document& doc);

Document from_jsonl_line(const std::string& line, uint64_t line_no, uint64_t byte_offset);

}  // namespace corpusforge
