#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "corpusforge/bbpe.hpp"

namespace corpusforge {

struct NiahCase {
    uint64_t context_tokens = 0;
    double depth = 0.0;
    std::string needle;    // full needle text; contains the payload
    std::string payload;   // the unique string the answer must contain
    std::string question;
    std::string haystack;
    uint64_t needle_token_offset = 0;
    std::vector<uint32_t> tokens;  // haystack token ids at generation time
};

// Buries the needle at round(depth * (L - needle_tokens)) within filler
// tokens. The payload must occur exactly once in the assembled haystack;
// filler containing it is a collision error. Filler must supply at least
// L - needle_tokens tokens.
NiahCase generate_case(uint64_t context_tokens, double depth, const std::string& needle,
                       const std::string& payload, const std::string& question,
                       std::span<const uint32_t> filler_tokens, const BpeModel& tokenizer);

// 1 iff the payload occurs in the answer after whitespace normalization.
int score_answer(const std::string& answer, const NiahCase& c);
int score_answer(const std::string& answer, const std::string& payload);

struct NiahGrid {
    std::vector<uint64_t> lengths;
    std::vector<double> depths;
    // row-major lengths x depths; absent cells (retriever failures) are nullopt
    std::vector<std::optional<double>> scores;

    std::optional<double> at(size_t li, size_t di) const {
        return scores[li * depths.size() + di];
    }
};

struct RetrieverReply {
    bool ok = false;
    std::string answer;
};

using Retriever = std::function<RetrieverReply(const NiahCase&, size_t case_index)>;

struct NiahGridConfig {
    std::vector<uint64_t> lengths;
    std::vector<double> depths;
    uint32_t cases_per_cell = 1;
    uint64_t seed = 0;
    std::string needle_template = "The magic number is {payload}. Remember the magic number.";
    std::string question = "What is the magic number mentioned in the context?";
};

// Mean score per cell over cases_per_cell generated cases. Retriever
// failures mark the cell absent; the run continues. Payloads are seeded
// 8-digit codes; {payload} in the template is substituted per case.
NiahGrid run_grid(const Retriever& retriever, const NiahGridConfig& config,
                  std::span<const uint32_t> filler_tokens, const BpeModel& tokenizer);

// Derives the per-case payload/needle and the filler window deterministically
// from (seed, length index, depth index, case index). Used by both run_grid
// and the file-based CLI so the two paths generate identical cases.
NiahCase generate_grid_case(const NiahGridConfig& config, size_t length_index,
                            size_t depth_index, uint32_t case_index,
                            std::span<const uint32_t> filler_tokens, const BpeModel& tokenizer);

// CSV rows `length,depth,score`; absent cells serialize as empty score.
void save_grid_csv(const NiahGrid& grid, const std::filesystem::path& path);
NiahGrid load_grid_csv(const std::filesystem::path& path);

}  // namespace corpusforge
