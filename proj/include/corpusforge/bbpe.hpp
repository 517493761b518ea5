#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "corpusforge/document.hpp"

namespace corpusforge {

enum class PreTokenKind { Word, Digit, Punct, SpaceRun };

struct PreToken {
    std::string bytes;
    PreTokenKind kind;
};

// Splits on Unicode category boundaries (letter/digit/punct/whitespace).
// Every decimal digit becomes its own pretoken; a single trailing space of a
// whitespace run attaches to the following word. Concatenating the pretoken
// bytes reproduces the input exactly, so merges can never cross a boundary.
std::vector<PreToken> pretokenize(std::string_view text);

// Byte-level BPE model: 256 byte tokens, then specials, then merges with
// dense ascending ids. Vocab size = 256 + |specials| + |merges|.
class BpeModel {
public:
    static constexpr uint32_t kByteTokens = 256;
    static constexpr const char* kEosName = "<eos>";

    BpeModel() = default;
    BpeModel(std::vector<std::pair<uint32_t, uint32_t>> merges,
             std::vector<std::string> special_names, uint32_t target_vocab);

    uint32_t vocab_size() const { return kByteTokens + num_specials() + num_merges(); }
    uint32_t num_specials() const { return static_cast<uint32_t>(special_ids_.size()); }
    uint32_t num_merges() const { return static_cast<uint32_t>(merges_.size()); }
    uint32_t target_vocab() const { return target_vocab_; }
    uint32_t first_merge_id() const { return kByteTokens + num_specials(); }

    uint32_t eos_id() const;
    bool is_special(uint32_t id) const;
    const std::map<std::string, uint32_t>& specials() const { return special_ids_; }
    const std::vector<std::pair<uint32_t, uint32_t>>& merges() const { return merges_; }

    // Applies merges in ascending merge-id order within each pretoken.
    // Total over any input; never emits special ids.
    std::vector<uint32_t> encode(std::string_view text) const;

    // Byte concatenation of expansions. Special ids expand to nothing.
    // Malformed byte runs from adversarial id sequences come back as U+FFFD.
    // Throws Error(Data) on an out-of-range id.
    std::string decode(std::span<const uint32_t> ids) const;

    // Expansion of one id in raw bytes (specials expand to "").
    std::string_view expansion(uint32_t id) const;

    void save(const std::filesystem::path& path) const;
    static BpeModel load(const std::filesystem::path& path);

private:
    void build_tables();
    std::vector<uint32_t> encode_pretoken(std::string_view bytes) const;

    uint32_t target_vocab_ = 0;
    std::vector<std::pair<uint32_t, uint32_t>> merges_;
    std::map<std::string, uint32_t> special_ids_;
    std::vector<std::string> expansions_;                 // merge id - first_merge_id -> bytes
    std::map<std::pair<uint32_t, uint32_t>, uint32_t> merge_rank_;  // pair -> merge id
};

// Highest-pair-frequency training over pretoken counts; ties break on the
// lowest (left id, right id). Stops at target_vocab or when no pair occurs
// at least twice. Throws Error(Data) on an empty corpus or a target too
// small for the base alphabet.
BpeModel train_bpe(const std::vector<std::string>& texts, uint32_t target_vocab,
                   const std::vector<std::string>& special_names = {BpeModel::kEosName});

BpeModel train_bpe(const std::vector<Document>& corpus, uint32_t target_vocab,
                   const std::vector<std::string>& special_names = {BpeModel::kEosName});

}  // namespace corpusforge
