#include "corpusforge/stage_plan.hpp"

#include <json.hpp>

#include <bit>
#include <fstream>

#include "corpusforge/error.hpp"

namespace corpusforge {

using nlohmann::json;

StagePlan plan_stages(const RopeConfig& base_cfg, std::span<const uint64_t> targets,
                      std::span<const uint64_t> budgets) {
    validate(base_cfg);
    if (targets.empty()) fail_data("stage plan needs at least one target context length");
    if (!budgets.empty() && budgets.size() != targets.size())
        fail_data("stage plan budgets must be empty or match the target count");
    if (base_cfg.max_pos == 0) fail_data("base config needs a positive max_pos");

    StagePlan plan;
    plan.origin_len = base_cfg.max_pos;
    plan.origin_base = base_cfg.base;
    plan.head_dim = base_cfg.head_dim;

    uint64_t prev = 0;
    for (size_t i = 0; i < targets.size(); ++i) {
        if (targets[i] <= prev)
            fail_data("stage targets must be strictly ascending (offender: " +
                      std::to_string(targets[i]) + ")");
        prev = targets[i];
        Stage stage;
        stage.context_len = targets[i];
        stage.rope_base = abf_base(base_cfg, targets[i], base_cfg.max_pos);
        stage.token_budget = budgets.empty() ? 0 : budgets[i];
        stage.long_doc_fraction = 0.3;
        stage.min_long_len = targets[i] / 2;
        plan.stages.push_back(stage);
    }
    return plan;
}

void save_stage_plan(const StagePlan& plan, const std::filesystem::path& path) {
    json stages = json::array();
    for (const auto& stage : plan.stages) {
        stages.push_back({{"context_len", stage.context_len},
                          {"rope_base", stage.rope_base},
                          {"token_budget", stage.token_budget},
                          {"long_doc_fraction", stage.long_doc_fraction},
                          {"min_long_len", stage.min_long_len}});
    }
    json doc{{"origin_len", plan.origin_len},
             {"origin_base", plan.origin_base},
             {"head_dim", plan.head_dim},
             {"stages", stages}};
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) fail_data("cannot write stage plan: " + path.string());
    out << doc.dump(2) << "\n";
}

StagePlan load_stage_plan(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) fail_data("cannot open stage plan: " + path.string());
    json doc;
    try {
        in >> doc;
    } catch (const json::exception& e) {
        fail_data("malformed stage plan " + path.string() + ": " + e.what());
    }
    StagePlan plan;
    plan.origin_len = doc.value("origin_len", 4096ull);
    plan.origin_base = doc.value("origin_base", 10000.0);
    plan.head_dim = doc.value("head_dim", 64);
    for (const auto& stage : doc.value("stages", json::array())) {
        Stage s;
        s.context_len = stage.at("context_len").get<uint64_t>();
        s.rope_base = stage.at("rope_base").get<double>();
        s.token_budget = stage.value("token_budget", 0ull);
        s.long_doc_fraction = stage.value("long_doc_fraction", 0.3);
        s.min_long_len = stage.value("min_long_len", s.context_len / 2);
        plan.stages.push_back(s);
    }
    return plan;
}

void LengthHistogram::add(uint64_t token_len) {
    const int bucket = token_len == 0 ? 0 : std::bit_width(token_len) - 1;
    ++buckets[bucket];
}

uint64_t LengthHistogram::total() const {
    uint64_t n = 0;
    for (const auto& [_, count] : buckets) n += count;
    return n;
}

LengthHistogram build_length_histogram(std::span<const uint64_t> doc_token_lens) {
    LengthHistogram hist;
    for (uint64_t len : doc_token_lens) hist.add(len);
    return hist;
}

}  // namespace corpusforge
