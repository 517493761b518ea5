#include "corpusforge/niah.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "corpusforge/error.hpp"
#include "corpusforge/hash.hpp"
#include "corpusforge/text.hpp"

namespace corpusforge {

namespace {

size_t count_occurrences(const std::string& haystack, const std::string& needle) {
    if (needle.empty()) return 0;
    size_t count = 0;
    size_t pos = 0;
    while ((pos = haystack.find(needle, pos)) != std::string::npos) {
        ++count;
        ++pos;
    }
    return count;
}

}  // namespace

NiahCase generate_case(uint64_t context_tokens, double depth, const std::string& needle,
                       const std::string& payload, const std::string& question,
                       std::span<const uint32_t> filler_tokens, const BpeModel& tokenizer) {
    if (depth < 0.0 || depth > 1.0) fail_data("needle depth must lie in [0,1]");
    if (payload.empty() || needle.find(payload) == std::string::npos)
        fail_data("needle must contain the payload");

    const std::vector<uint32_t> needle_ids = tokenizer.encode(needle);
    if (needle_ids.size() >= context_tokens)
        fail_data("needle of " + std::to_string(needle_ids.size()) +
                  " tokens does not fit a context of " + std::to_string(context_tokens));
    const uint64_t body = context_tokens - needle_ids.size();
    if (filler_tokens.size() < body)
        fail_data("filler exhausted: need " + std::to_string(body) + " tokens, have " +
                  std::to_string(filler_tokens.size()));

    const uint64_t offset = static_cast<uint64_t>(std::llround(depth * static_cast<double>(body)));

    NiahCase c;
    c.context_tokens = context_tokens;
    c.depth = depth;
    c.needle = needle;
    c.payload = payload;
    c.question = question;
    c.needle_token_offset = offset;
    c.tokens.reserve(context_tokens);
    c.tokens.insert(c.tokens.end(), filler_tokens.begin(), filler_tokens.begin() + offset);
    c.tokens.insert(c.tokens.end(), needle_ids.begin(), needle_ids.end());
    c.tokens.insert(c.tokens.end(), filler_tokens.begin() + offset,
                    filler_tokens.begin() + body);
    c.haystack = tokenizer.decode(c.tokens);

    const size_t occurrences = count_occurrences(c.haystack, payload);
    if (occurrences != 1)
        fail_data("payload collision: '" + payload + "' occurs " + std::to_string(occurrences) +
                  " times in the haystack");
    return c;
}

int score_answer(const std::string& answer, const std::string& payload) {
    const std::string normalized = collapse_whitespace(answer);
    const std::string needle = collapse_whitespace(payload);
    if (needle.empty()) return 0;
    return normalized.find(needle) != std::string::npos ? 1 : 0;
}

int score_answer(const std::string& answer, const NiahCase& c) {
    return score_answer(answer, c.payload);
}

NiahCase generate_grid_case(const NiahGridConfig& config, size_t length_index,
                            size_t depth_index, uint32_t case_index,
                            std::span<const uint32_t> filler_tokens, const BpeModel& tokenizer) {
    const uint64_t L = config.lengths.at(length_index);
    const double depth = config.depths.at(depth_index);

    // Payload: seeded 8-digit code, distinct per cell and case.
    uint64_t h = mix64(config.seed);
    h = mix64(h ^ mix64(length_index + 1));
    h = mix64(h ^ mix64(depth_index + 1));
    h = mix64(h ^ mix64(case_index + 1));
    std::string payload;
    for (int d = 0; d < 8; ++d) {
        payload.push_back(static_cast<char>('0' + h % 10));
        h = mix64(h);
    }
    std::string needle = config.needle_template;
    const std::string marker = "{payload}";
    if (const size_t at = needle.find(marker); at != std::string::npos)
        needle.replace(at, marker.size(), payload);
    else
        fail_data("needle template is missing the {payload} marker");

    // Rotate the filler window per case so repeated cells see fresh text.
    const uint64_t needle_len = tokenizer.encode(needle).size();
    if (needle_len >= L) fail_data("needle does not fit the shortest grid length");
    const uint64_t body = L - needle_len;
    if (filler_tokens.size() < body)
        fail_data("filler pool too small for context length " + std::to_string(L));
    const uint64_t slack = filler_tokens.size() - body;
    const uint64_t start = slack == 0 ? 0 : mix64(h) % (slack + 1);
    return generate_case(L, depth, needle, payload, config.question,
                         filler_tokens.subspan(start, body), tokenizer);
}

NiahGrid run_grid(const Retriever& retriever, const NiahGridConfig& config,
                  std::span<const uint32_t> filler_tokens, const BpeModel& tokenizer) {
    if (config.lengths.empty() || config.depths.empty())
        fail_data("grid needs at least one length and one depth");
    if (config.cases_per_cell == 0) fail_data("cases_per_cell must be positive");

    NiahGrid grid;
    grid.lengths = config.lengths;
    grid.depths = config.depths;
    grid.scores.assign(config.lengths.size() * config.depths.size(), std::nullopt);

    size_t case_counter = 0;
    for (size_t li = 0; li < config.lengths.size(); ++li) {
        for (size_t di = 0; di < config.depths.size(); ++di) {
            double sum = 0.0;
            bool failed = false;
            for (uint32_t ci = 0; ci < config.cases_per_cell && !failed; ++ci) {
                const NiahCase c =
                    generate_grid_case(config, li, di, ci, filler_tokens, tokenizer);
                const RetrieverReply reply = retriever(c, case_counter++);
                if (!reply.ok) {
                    failed = true;
                    break;
                }
                sum += score_answer(reply.answer, c);
            }
            if (!failed)
                grid.scores[li * config.depths.size() + di] = sum / config.cases_per_cell;
        }
    }
    return grid;
}

void save_grid_csv(const NiahGrid& grid, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) fail_data("cannot write grid csv: " + path.string());
    out << "length,depth,score\n";
    out.precision(17);
    for (size_t li = 0; li < grid.lengths.size(); ++li) {
        for (size_t di = 0; di < grid.depths.size(); ++di) {
            out << grid.lengths[li] << "," << grid.depths[di] << ",";
            const auto score = grid.scores[li * grid.depths.size() + di];
            if (score) out << *score;
            out << "\n";
        }
    }
}

NiahGrid load_grid_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) fail_data("cannot open grid csv: " + path.string());
    std::string line;
    if (!std::getline(in, line) || line != "length,depth,score")
        fail_data("grid csv missing header: " + path.string());

    NiahGrid grid;
    std::vector<std::tuple<uint64_t, double, std::optional<double>>> rows;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream row(line);
        std::string field;
        std::getline(row, field, ',');
        const uint64_t length = std::stoull(field);
        std::getline(row, field, ',');
        const double depth = std::stod(field);
        std::optional<double> score;
        if (std::getline(row, field, ',') && !field.empty()) score = std::stod(field);
        rows.emplace_back(length, depth, score);
        if (grid.lengths.empty() || grid.lengths.back() != length)
            grid.lengths.push_back(length);
        if (grid.lengths.size() == 1) grid.depths.push_back(depth);
    }
    grid.scores.reserve(rows.size());
    if (rows.size() != grid.lengths.size() * grid.depths.size())
        fail_data("grid csv is not a full matrix: " + path.string());
    for (const auto& [length, depth, score] : rows) grid.scores.push_back(score);
    return grid;
}

}  // namespace corpusforge
