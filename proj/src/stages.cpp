#include "corpusforge/stages.hpp"

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <map>
#include <set>

#include "corpusforge/attention.hpp"
#include "corpusforge/bbpe.hpp"
#include "corpusforge/dedup.hpp"
#include "corpusforge/error.hpp"
#include "corpusforge/manifest.hpp"
#include "corpusforge/mixture.hpp"
#include "corpusforge/niah.hpp"
#include "corpusforge/packing.hpp"
#include "corpusforge/quality.hpp"
#include "corpusforge/rope.hpp"
#include "corpusforge/schedule.hpp"
#include "corpusforge/shard_io.hpp"
#include "corpusforge/stage_plan.hpp"
#include "corpusforge/token_shard.hpp"
#include "corpusforge/upsample.hpp"
#include "corpusforge/util.hpp"

namespace corpusforge::stages {

using nlohmann::json;

namespace {

std::vector<std::string> path_list(const json& config, const std::string& key) {
    if (!config.contains(key)) fail_usage("stage config is missing '" + key + "'");
    const auto& value = config[key];
    if (value.is_string()) return {value.get<std::string>()};
    if (value.is_array()) return value.get<std::vector<std::string>>();
    fail_usage("stage config key '" + key + "' must be a path or list of paths");
}

std::string path_value(const json& config, const std::string& key) {
    if (!config.contains(key) || !config[key].is_string())
        fail_usage("stage config is missing '" + key + "'");
    return config[key].get<std::string>();
}

std::vector<Document> read_all_shards(const std::vector<std::string>& paths) {
    std::vector<Document> docs;
    std::set<std::string> ids;
    for (const auto& path : paths) {
        for (auto& doc : read_shard(path)) {
            if (!ids.insert(doc.id).second)
                fail_data("duplicate document id '" + doc.id + "' across input shards");
            docs.push_back(std::move(doc));
        }
    }
    return docs;
}

// Writes documents back out with one shard per distinct input shard name,
// preserving document order.
json write_shards_like_inputs(const std::vector<Document>& docs,
                              const std::vector<std::string>& in_paths,
                              const std::filesystem::path& out_dir,
                              std::map<std::string, SourceTotals>* per_source = nullptr) {
    std::filesystem::create_directories(out_dir);
    // Map each doc back to its origin shard by replaying input order.
    std::map<std::string, std::vector<const Document*>> by_shard;
    std::map<std::string, size_t> shard_order;
    {
        std::set<std::string> kept_ids;
        for (const auto& doc : docs) kept_ids.insert(doc.id);
        size_t order = 0;
        for (const auto& path : in_paths) {
            const std::string name = std::filesystem::path(path).filename().string();
            shard_order.emplace(name, order++);
        }
        std::map<std::string, const Document*> doc_by_id;
        for (const auto& doc : docs) doc_by_id[doc.id] = &doc;
        for (const auto& path : in_paths) {
            const std::string name = std::filesystem::path(path).filename().string();
            for (const auto& original : read_shard(path)) {
                auto it = doc_by_id.find(original.id);
                if (it != doc_by_id.end()) by_shard[name].push_back(it->second);
            }
        }
    }

    json outputs = json::array();
    for (const auto& path : in_paths) {
        const std::string name = std::filesystem::path(path).filename().string();
        auto it = by_shard.find(name);
        if (it == by_shard.end()) continue;
        ShardWriter writer(out_dir / name);
        for (const Document* doc : it->second) {
            writer.add(*doc);
            if (per_source) ++(*per_source)[doc->source].doc_count;
        }
        const ShardEntry entry = writer.finish();
        outputs.push_back({{"path", entry.path},
                           {"doc_count", entry.doc_count},
                           {"byte_count", entry.byte_count},
                           {"checksum", entry.checksum}});
    }
    return outputs;
}

json stats_stage(const json& config) {
    const CorpusManifest manifest = load_manifest(path_value(config, "manifest"));
    json rows = json::array();
    for (const auto& row : corpus_stats(manifest)) {
        json entry{{"source", row.source},
                   {"doc_count", row.doc_count},
                   {"doc_fraction", row.doc_fraction}};
        if (row.token_count) entry["token_count"] = *row.token_count;
        if (row.token_fraction) entry["token_fraction"] = *row.token_fraction;
        rows.push_back(entry);
    }
    return json{{"stats", rows}};
}

json dedup_stage(const json& config) {
    const auto in_paths = path_list(config, "in");
    DedupParams params;
    params.num_hashes = config.value("k", params.num_hashes);
    params.bands = config.value("bands", params.bands);
    params.rows = config.value("rows", params.rows);
    params.threshold = config.value("threshold", params.threshold);
    params.seed = config.value("seed", params.seed);
    params.width_en = config.value("width_en", params.width_en);
    params.width_zh = config.value("width_zh", params.width_zh);

    const std::vector<Document> docs = read_all_shards(in_paths);
    DedupResult result = dedup_corpus(docs, params);

    const json outputs = write_shards_like_inputs(result.kept, in_paths,
                                                  path_value(config, "out"));
    if (config.contains("report"))
        save_dedup_report(result.report, path_value(config, "report"));
    return json{{"input_docs", result.report.input_docs},
                {"kept_docs", result.report.kept_docs},
                {"clusters", result.report.clusters.size()},
                {"shards", outputs}};
}

json filter_stage(const json& config) {
    const auto in_paths = path_list(config, "in");
    const FilterRuleSet rules = load_rules(path_value(config, "rules"));
    std::map<std::string, double> scores;
    if (config.contains("ppl")) scores = load_ppl_sidecar(path_value(config, "ppl"));

    const std::vector<Document> docs = read_all_shards(in_paths);
    FilterResult result = filter_corpus(docs, rules, scores);

    const json outputs = write_shards_like_inputs(result.kept, in_paths,
                                                  path_value(config, "out"));
    json by_rule = json::object();
    for (const auto& [rule, count] : result.report.by_rule) by_rule[rule] = count;
    json summary{{"input_docs", result.report.input_docs},
                 {"kept_docs", result.report.kept_docs},
                 {"rejected_docs", result.report.rejected_docs},
                 {"by_rule", by_rule},
                 {"shards", outputs}};
    if (config.contains("report"))
        write_text_file(path_value(config, "report"), summary.dump(2) + "\n");
    return summary;
}

json tok_train_stage(const json& config) {
    const auto in_paths = path_list(config, "in");
    const uint32_t vocab = config.value("vocab", 102400u);
    const std::vector<Document> docs = read_all_shards(in_paths);
    const BpeModel model = train_bpe(docs, vocab);
    model.save(path_value(config, "out"));
    return json{{"vocab_size", model.vocab_size()},
                {"merges", model.num_merges()},
                {"target_vocab", vocab}};
}

json tok_encode_stage(const json& config, unsigned jobs) {
    const BpeModel model = BpeModel::load(path_value(config, "model"));
    const auto in_paths = path_list(config, "in");
    const std::filesystem::path out_dir = path_value(config, "out");
    std::filesystem::create_directories(out_dir);

    const std::vector<Document> docs = read_all_shards(in_paths);
    std::vector<std::vector<uint32_t>> encoded(docs.size());
    parallel_for(docs.size(), jobs, [&](size_t i) { encoded[i] = model.encode(docs[i].text); });

    std::map<std::string, TokenShard> by_source;
    for (size_t i = 0; i < docs.size(); ++i) {
        TokenShard& shard = by_source[docs[i].source];
        shard.source = docs[i].source;
        shard.docs.push_back(TokenDoc{docs[i].id, std::move(encoded[i])});
    }

    json sources = json::object();
    for (const auto& [source, shard] : by_source) {
        const std::filesystem::path path = out_dir / (source + ".cftd");
        write_token_shard(shard, path);
        sources[source] = {{"path", path.string()},
                           {"docs", shard.docs.size()},
                           {"tokens", shard.total_tokens()}};
    }
    return json{{"sources", sources}, {"documents", docs.size()}};
}

json mix_stage(const json& config) {
    const MixtureSpec spec = load_mixture_spec(path_value(config, "spec"));
    const uint64_t total = config.value("tokens", 0ull);
    const auto quotas = plan_mixture(spec, total);
    save_mixture_plan(spec, quotas, total, path_value(config, "out"));
    json out = json::object();
    for (const auto& [source, quota] : quotas) out[source] = quota;
    return json{{"quotas", out}, {"total_tokens", total}, {"epochs", spec.epochs}};
}

json pack_stage(const json& config) {
    std::map<std::string, uint64_t> quotas;
    uint64_t total_tokens = 0;
    MixtureSpec spec = load_mixture_plan(path_value(config, "plan"), &quotas, &total_tokens);
    if (config.contains("seed")) spec.seed = config["seed"].get<uint64_t>();

    PackOptions options;
    options.seq_len = config.value("len", 4096u);
    options.eos_reset_mask = config.value("eos_reset", true);
    options.max_doc_tokens = config.value("max_doc_tokens", 0ull);
    const BpeModel model = BpeModel::load(path_value(config, "model"));
    options.eos_id = model.eos_id();

    std::vector<TokenShard> loaded;
    std::vector<SourceDocs> sources;
    for (const auto& entry : spec.entries) {
        if (entry.shards.empty())
            fail_data("mixture entry '" + entry.source + "' names no token shards");
        SourceDocs source_docs;
        source_docs.source = entry.source;
        for (const auto& shard_path : entry.shards) {
            loaded.push_back(read_token_shard(shard_path));
            if (loaded.back().source != entry.source)
                fail_data("token shard " + shard_path + " belongs to source '" +
                          loaded.back().source + "', expected '" + entry.source + "'");
        }
        sources.push_back(std::move(source_docs));
    }
    // Pointers are only valid once `loaded` stops growing.
    size_t shard_index = 0;
    for (size_t s = 0; s < spec.entries.size(); ++s) {
        for (size_t k = 0; k < spec.entries[s].shards.size(); ++k, ++shard_index)
            for (const auto& doc : loaded[shard_index].docs) sources[s].docs.push_back(&doc);
    }

    const SamplePlan plan = sample_stream(sources, spec, total_tokens);

    const std::filesystem::path out_dir = path_value(config, "out");
    std::filesystem::create_directories(out_dir);
    const std::filesystem::path shard_path = out_dir / "pack-000.cfts";
    PackedShardWriter writer(shard_path, options.seq_len);
    json pad_records = json::object();
    uint64_t record_index = 0;
    Packer packer(options, [&](const PackedSequence& seq) {
        writer.add(seq);
        if (seq.pad_start < seq.tokens.size())
            pad_records[std::to_string(record_index)] = seq.pad_start;
        ++record_index;
    });
    for (const auto& [source_idx, doc_idx] : plan.order)
        packer.add_document(sources[source_idx].docs[doc_idx]->tokens);
    packer.finish();
    const uint64_t records = writer.finish();

    json tokens_per_source = json::object();
    for (const auto& [source, tokens] : plan.report.tokens_per_source)
        tokens_per_source[source] = tokens;
    json wraps = json::object();
    for (const auto& [source, count] : plan.report.wraps_per_source) wraps[source] = count;

    json manifest{{"seq_len", options.seq_len},
                  {"eos_id", options.eos_id},
                  {"eos_reset_mask", options.eos_reset_mask},
                  {"seed", spec.seed},
                  {"records", records},
                  {"documents", packer.documents()},
                  {"non_pad_tokens", packer.non_pad_tokens()},
                  {"sampled_tokens", plan.report.total_tokens},
                  {"tokens_per_source", tokens_per_source},
                  {"epoch_wraps", wraps},
                  {"pad_records", pad_records},
                  {"shards", json::array({shard_path.string()})}};
    write_text_file(out_dir / "pack.json", manifest.dump(2) + "\n");
    return manifest;
}

json plan_lr_stage(const json& config) {
    const ScheduleConfig cfg = load_schedule(path_value(config, "config"));
    const std::string emit = config.value("emit", "csv");
    if (emit != "csv") fail_usage("plan-lr supports only --emit csv");
    emit_lr_csv(cfg, path_value(config, "out"));
    return json{{"total_steps", cfg.total_steps()},
                {"warmup_steps", cfg.warmup_steps},
                {"cosine_steps", cfg.cosine_steps},
                {"cooldown_steps", cfg.cooldown_steps}};
}

json extend_plan_stage(const json& config) {
    RopeConfig base;
    base.head_dim = config.value("dim", 64);
    base.base = config.value("base", 10000.0);
    base.max_pos = config.value("orig", 4096ull);
    std::vector<uint64_t> targets;
    if (config.contains("targets"))
        targets = config["targets"].get<std::vector<uint64_t>>();
    else
        targets.assign(kDefaultStageTargets.begin(), kDefaultStageTargets.end());
    std::vector<uint64_t> budgets;
    if (config.contains("budgets")) budgets = config["budgets"].get<std::vector<uint64_t>>();

    const StagePlan plan = plan_stages(base, targets, budgets);
    save_stage_plan(plan, path_value(config, "out"));
    json stages = json::array();
    for (const auto& stage : plan.stages)
        stages.push_back({{"context_len", stage.context_len}, {"rope_base", stage.rope_base}});
    return json{{"stages", stages}};
}

json upsample_stage(const json& config) {
    const auto in_paths = path_list(config, "in");
    const double frac = config.value("frac", 0.3);
    const uint64_t min_long_len = config.value("minlen", 0ull);
    const uint64_t seed = config.value("seed", 0ull);
    const uint64_t budget = config.value("tokens", 0ull);
    if (min_long_len == 0) fail_usage("upsample needs --minlen");
    if (budget == 0) fail_usage("upsample needs --tokens");

    const std::vector<Document> docs = read_all_shards(in_paths);
    std::optional<BpeModel> model;
    if (config.contains("model")) model = BpeModel::load(path_value(config, "model"));

    std::vector<uint64_t> lens(docs.size());
    for (size_t i = 0; i < docs.size(); ++i) {
        if (auto it = docs[i].meta.find("token_count"); it != docs[i].meta.end()) {
            lens[i] = std::stoull(it->second);
        } else if (model) {
            lens[i] = model->encode(docs[i].text).size();
        } else {
            fail_data("document '" + docs[i].id +
                      "' lacks meta token_count; pass --model to tokenize");
        }
    }

    const UpsampleWeights weights = length_upsample_weights(lens, min_long_len, frac);
    const UpsampleRun run = sample_upsampled(lens, weights, budget, seed);

    const std::filesystem::path out_dir = path_value(config, "out");
    std::filesystem::create_directories(out_dir);
    ShardWriter writer(out_dir / "upsampled-000.jsonl");
    std::map<uint32_t, uint32_t> replica_count;
    for (uint32_t idx : run.order) {
        Document doc = docs[idx];
        const uint32_t replica = replica_count[idx]++;
        if (replica > 0) {
            doc.meta["origin_id"] = doc.id;
            doc.id += "#" + std::to_string(replica);
        }
        doc.meta["token_count"] = std::to_string(lens[idx]);
        writer.add(doc);
    }
    const ShardEntry entry = writer.finish();

    const double achieved = static_cast<double>(run.long_tokens) /
                            static_cast<double>(std::max<uint64_t>(run.total_tokens, 1));
    json summary{{"long_weight", weights.long_weight},
                 {"observed_long_frac", weights.observed_frac},
                 {"target_long_frac", weights.target_frac},
                 {"achieved_long_frac", achieved},
                 {"sampled_docs", run.order.size()},
                 {"sampled_tokens", run.total_tokens},
                 {"shard", entry.path}};
    if (config.contains("report"))
        write_text_file(path_value(config, "report"), summary.dump(2) + "\n");
    return summary;
}

json validate_rope_stage(const json& config) {
    RopeConfig cfg;
    cfg.head_dim = config.value("dim", 64);
    cfg.base = config.value("base", 10000.0);
    cfg.max_pos = config.value("max_pos", 1048576ull);
    const uint64_t samples = config.value("samples", 10000ull);
    const uint64_t seed = config.value("seed", 0ull);
    const RopeValidationReport report = validate_rope(cfg, samples, seed);
    if (config.contains("out")) save_rope_report(report, cfg, path_value(config, "out"));
    return json{{"samples", report.samples},
                {"max_shift_deviation", report.max_shift_deviation},
                {"max_norm_deviation", report.max_norm_deviation},
                {"pass", report.pass}};
}

std::string case_name(size_t li, size_t di, uint32_t ci) {
    return "case_" + std::to_string(li) + "_" + std::to_string(di) + "_" + std::to_string(ci);
}

json niah_gen_stage(const json& config) {
    const BpeModel model = BpeModel::load(path_value(config, "model"));
    NiahGridConfig grid;
    grid.lengths = config.at("lengths").get<std::vector<uint64_t>>();
    grid.depths = config.at("depths").get<std::vector<double>>();
    grid.cases_per_cell = config.value("cases", 1u);
    grid.seed = config.value("seed", 0ull);
    grid.needle_template = config.value("needle", grid.needle_template);
    grid.question = config.value("question", grid.question);

    // Filler pool: all filler documents concatenated and tokenized once.
    const auto filler_paths = path_list(config, "filler");
    std::string filler_text;
    for (const auto& doc : read_all_shards(filler_paths)) {
        if (!filler_text.empty()) filler_text += "\n\n";
        filler_text += doc.text;
    }
    const std::vector<uint32_t> pool = model.encode(filler_text);

    const std::filesystem::path out_dir = path_value(config, "out");
    std::filesystem::create_directories(out_dir / "cases");
    std::filesystem::create_directories(out_dir / "keys");

    uint64_t cases = 0;
    for (size_t li = 0; li < grid.lengths.size(); ++li) {
        for (size_t di = 0; di < grid.depths.size(); ++di) {
            for (uint32_t ci = 0; ci < grid.cases_per_cell; ++ci) {
                const NiahCase c = generate_grid_case(grid, li, di, ci, pool, model);
                const std::string name = case_name(li, di, ci);
                json case_doc{{"length", c.context_tokens},
                              {"depth", c.depth},
                              {"context", c.haystack},
                              {"question", c.question},
                              {"tokens", c.tokens}};
                write_text_file(out_dir / "cases" / (name + ".json"), case_doc.dump() + "\n");
                json key_doc{{"payload", c.payload},
                             {"needle_token_offset", c.needle_token_offset},
                             {"needle", c.needle}};
                write_text_file(out_dir / "keys" / (name + ".json"), key_doc.dump(2) + "\n");
                ++cases;
            }
        }
    }
    json config_echo{{"lengths", grid.lengths},
                     {"depths", grid.depths},
                     {"cases_per_cell", grid.cases_per_cell},
                     {"seed", grid.seed},
                     {"needle_template", grid.needle_template},
                     {"question", grid.question},
                     {"cases", cases}};
    write_text_file(out_dir / "config.json", config_echo.dump(2) + "\n");
    return config_echo;
}

json niah_run_stage(const json& config, unsigned jobs) {
    const std::filesystem::path cases_dir = path_value(config, "cases");
    const std::string cmd = path_value(config, "cmd");
    json gen_config;
    try {
        gen_config = json::parse(read_text_file(cases_dir / "config.json"));
    } catch (const json::exception& e) {
        fail_data("malformed niah config in " + cases_dir.string() + ": " + e.what());
    }
    const auto lengths = gen_config.at("lengths").get<std::vector<uint64_t>>();
    const auto depths = gen_config.at("depths").get<std::vector<double>>();
    const uint32_t cases_per_cell = gen_config.value("cases_per_cell", 1u);

    struct Cell {
        size_t li, di;
        uint32_t ci;
    };
    std::vector<Cell> cells;
    for (size_t li = 0; li < lengths.size(); ++li)
        for (size_t di = 0; di < depths.size(); ++di)
            for (uint32_t ci = 0; ci < cases_per_cell; ++ci) cells.push_back({li, di, ci});

    // Answers are scratch, kept next to the grid for debugging; they are not
    // part of the cases dir so reruns see unchanged inputs.
    const std::string out_path = path_value(config, "out");
    std::vector<int> scores(cells.size(), -1);  // -1 = retriever failure
    const std::filesystem::path answers_dir = out_path + ".answers";
    std::filesystem::create_directories(answers_dir);
    parallel_for(cells.size(), jobs, [&](size_t idx) {
        const auto [li, di, ci] = cells[idx];
        const std::string name = case_name(li, di, ci);
        const std::filesystem::path case_path = cases_dir / "cases" / (name + ".json");
        const std::filesystem::path answer_path = answers_dir / (name + ".txt");
        const std::string invocation =
            cmd + " \"" + case_path.string() + "\" \"" + answer_path.string() + "\"";
        const int rc = std::system(invocation.c_str());
        if (rc != 0) return;  // cell marked absent
        const json key = json::parse(read_text_file(cases_dir / "keys" / (name + ".json")));
        scores[idx] =
            score_answer(read_text_file(answer_path), key.at("payload").get<std::string>());
    });

    NiahGrid grid;
    grid.lengths = lengths;
    grid.depths = depths;
    grid.scores.assign(lengths.size() * depths.size(), std::nullopt);
    uint64_t failures = 0;
    for (size_t li = 0; li < lengths.size(); ++li) {
        for (size_t di = 0; di < depths.size(); ++di) {
            double sum = 0.0;
            bool absent = false;
            for (uint32_t ci = 0; ci < cases_per_cell; ++ci) {
                const size_t idx = (li * depths.size() + di) * cases_per_cell + ci;
                if (scores[idx] < 0) {
                    absent = true;
                    break;
                }
                sum += scores[idx];
            }
            if (absent)
                ++failures;
            else
                grid.scores[li * depths.size() + di] = sum / cases_per_cell;
        }
    }

    save_grid_csv(grid, out_path);
    json sidecar{{"cmd", cmd},
                 {"cases", cases_dir.string()},
                 {"lengths", lengths},
                 {"depths", depths},
                 {"cases_per_cell", cases_per_cell},
                 {"failed_cells", failures}};
    write_text_file(out_path + ".json", sidecar.dump(2) + "\n");
    return sidecar;
}

json niah_report_stage(const json& config) {
    const NiahGrid grid = load_grid_csv(path_value(config, "grid"));
    json per_length = json::array();
    double total = 0.0;
    uint64_t counted = 0;
    for (size_t li = 0; li < grid.lengths.size(); ++li) {
        double sum = 0.0;
        uint64_t present = 0;
        for (size_t di = 0; di < grid.depths.size(); ++di) {
            if (const auto score = grid.at(li, di)) {
                sum += *score;
                ++present;
                total += *score;
                ++counted;
            }
        }
        per_length.push_back({{"length", grid.lengths[li]},
                              {"mean_score", present ? sum / present : 0.0},
                              {"cells", present}});
    }
    return json{{"per_length", per_length},
                {"mean_score", counted ? total / counted : 0.0},
                {"cells_scored", counted},
                {"cells_total", grid.lengths.size() * grid.depths.size()}};
}

}  // namespace

bool known_kind(const std::string& kind) {
    static const std::set<std::string> kinds{
        "stats",       "dedup",    "filter",   "tok-train",     "tok-encode",
        "mix",         "pack",     "plan-lr",  "extend-plan",   "upsample",
        "validate-rope", "niah-gen", "niah-run", "niah-report"};
    return kinds.count(kind) > 0;
}

std::vector<std::string> input_keys(const std::string& kind) {
    if (kind == "stats") return {"manifest"};
    if (kind == "dedup") return {"in"};
    if (kind == "filter") return {"in", "rules", "ppl"};
    if (kind == "tok-train") return {"in"};
    if (kind == "tok-encode") return {"model", "in"};
    if (kind == "mix") return {"spec"};
    if (kind == "pack") return {"plan", "model"};
    if (kind == "plan-lr") return {"config"};
    if (kind == "extend-plan") return {};
    if (kind == "upsample") return {"in", "model"};
    if (kind == "validate-rope") return {};
    if (kind == "niah-gen") return {"model", "filler"};
    if (kind == "niah-run") return {"cases"};
    if (kind == "niah-report") return {"grid"};
    fail_usage("unknown stage kind '" + kind + "'");
}

std::vector<std::string> output_keys(const std::string& kind) {
    if (kind == "stats") return {};
    if (kind == "dedup") return {"out", "report"};
    if (kind == "filter") return {"out", "report"};
    if (kind == "tok-train") return {"out"};
    if (kind == "tok-encode") return {"out"};
    if (kind == "mix") return {"out"};
    if (kind == "pack") return {"out"};
    if (kind == "plan-lr") return {"out"};
    if (kind == "extend-plan") return {"out"};
    if (kind == "upsample") return {"out", "report"};
    if (kind == "validate-rope") return {"out"};
    if (kind == "niah-gen") return {"out"};
    if (kind == "niah-run") return {"out"};
    if (kind == "niah-report") return {};
    fail_usage("unknown stage kind '" + kind + "'");
}

json run_stage(const std::string& kind, const json& config, unsigned jobs) {
    if (kind == "stats") return stats_stage(config);
    if (kind == "dedup") return dedup_stage(config);
    if (kind == "filter") return filter_stage(config);
    if (kind == "tok-train") return tok_train_stage(config);
    if (kind == "tok-encode") return tok_encode_stage(config, jobs);
    if (kind == "mix") return mix_stage(config);
    if (kind == "pack") return pack_stage(config);
    if (kind == "plan-lr") return plan_lr_stage(config);
    if (kind == "extend-plan") return extend_plan_stage(config);
    if (kind == "upsample") return upsample_stage(config);
    if (kind == "validate-rope") return validate_rope_stage(config);
    if (kind == "niah-gen") return niah_gen_stage(config);
    if (kind == "niah-run") return niah_run_stage(config, jobs);
    if (kind == "niah-report") return niah_report_stage(config);
    fail_usage("unknown stage kind '" + kind + "'");
}

}  // namespace corpusforge::stages
