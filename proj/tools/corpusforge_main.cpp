#include <CLI11.hpp>
#include <json.hpp>

#include <iostream>

#include "corpusforge/error.hpp"
#include "corpusforge/pipeline.hpp"
#include "corpusforge/stages.hpp"

using corpusforge::Error;
using nlohmann::json;

namespace {

struct GlobalOptions {
    unsigned jobs = 0;
};

void print_stats_table(const json& summary) {
    std::cout << "source\tdocs\tdoc_frac";
    bool tokens = false;
    for (const auto& row : summary["stats"])
        if (row.contains("token_count")) tokens = true;
    if (tokens) std::cout << "\ttokens\ttoken_frac";
    std::cout << "\n";
    for (const auto& row : summary["stats"]) {
        std::cout << row["source"].get<std::string>() << "\t" << row["doc_count"].get<uint64_t>()
                  << "\t" << row["doc_fraction"].get<double>();
        if (row.contains("token_count"))
            std::cout << "\t" << row["token_count"].get<uint64_t>() << "\t"
                      << row["token_fraction"].get<double>();
        std::cout << "\n";
    }
}

int dispatch(const std::string& kind, const json& config, const GlobalOptions& global) {
    const json summary = corpusforge::stages::run_stage(kind, config, global.jobs);
    if (kind == "stats")
        print_stats_table(summary);
    else
        std::cout << summary.dump(2) << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"corpusforge: pretraining data pipeline toolkit"};
    app.require_subcommand(1);
    GlobalOptions global;
    app.add_option("--jobs", global.jobs, "worker cap for parallel stages (0 = all cores)");

    json cfg;  // reused per-subcommand config object
    std::vector<std::string> in_paths, filler_paths;
    std::string out, report, model, spec, plan, rules, ppl, manifest, sched, cases, cmd, grid;
    std::string needle_template, question;
    uint64_t seed = 0, tokens = 0, minlen = 0, max_pos = 1048576, orig = 4096, samples = 10000;
    uint32_t vocab = 102400, len = 4096, cases_per_cell = 1;
    int k = 128, bands = 16, rows = 8, dim = 64;
    double threshold = 0.8, frac = 0.3, base = 10000.0;
    std::vector<uint64_t> targets, budgets, lengths;
    std::vector<double> depths;
    bool no_eos_reset = false;

    auto* stats = app.add_subcommand("stats", "per-source corpus statistics");
    stats->add_option("manifest", manifest, "corpus manifest JSON")->required();

    auto* dedup = app.add_subcommand("dedup", "MinHash/LSH near-duplicate removal");
    dedup->add_option("--in", in_paths, "input JSONL shards")->required()->expected(-1);
    dedup->add_option("--out", out, "output shard directory")->required();
    dedup->add_option("--report", report, "duplicate cluster report path");
    dedup->add_option("--k", k, "signature size");
    dedup->add_option("--bands", bands, "LSH bands");
    dedup->add_option("--rows", rows, "LSH rows per band");
    dedup->add_option("--threshold", threshold, "verify threshold");
    dedup->add_option("--seed", seed, "hash seed");

    auto* filter = app.add_subcommand("filter", "rule and perplexity filtering");
    filter->add_option("--in", in_paths, "input JSONL shards")->required()->expected(-1);
    filter->add_option("--out", out, "output shard directory")->required();
    filter->add_option("--rules", rules, "rules JSON")->required();
    filter->add_option("--ppl", ppl, "perplexity sidecar JSONL");
    filter->add_option("--report", report, "rejection report path");

    auto* tok_train = app.add_subcommand("tok-train", "train the BBPE tokenizer");
    tok_train->add_option("--in", in_paths, "training JSONL shards")->required()->expected(-1);
    tok_train->add_option("--vocab", vocab, "target vocab size");
    tok_train->add_option("--out", out, "model JSON path")->required();

    auto* tok_encode = app.add_subcommand("tok-encode", "tokenize shards per source");
    tok_encode->add_option("--model", model, "model JSON")->required();
    tok_encode->add_option("--in", in_paths, "input JSONL shards")->required()->expected(-1);
    tok_encode->add_option("--out", out, "token shard directory")->required();

    auto* mix = app.add_subcommand("mix", "plan per-source token quotas");
    mix->add_option("--spec", spec, "mixture spec JSON")->required();
    mix->add_option("--tokens", tokens, "total token budget")->required();
    mix->add_option("--out", out, "plan JSON path")->required();

    auto* pack = app.add_subcommand("pack", "sample and pack token shards");
    pack->add_option("--model", model, "tokenizer model (for the EOS id)")->required();
    pack->add_option("--plan", plan, "mixture plan JSON")->required();
    pack->add_option("--len", len, "sequence length");
    pack->add_option("--seed", seed, "sampling seed (overrides the spec)");
    pack->add_option("--out", out, "packed shard directory")->required();
    pack->add_flag("--no-eos-reset", no_eos_reset,
                   "mark shards as packed without the EOS-reset mask");

    auto* plan_lr = app.add_subcommand("plan-lr", "emit the LR schedule");
    plan_lr->add_option("--config", sched, "schedule config JSON")->required();
    plan_lr->add_option("--emit", cmd, "output format (csv)")->default_val("csv");
    plan_lr->add_option("--out", out, "csv path")->required();

    auto* extend = app.add_subcommand("extend-plan", "context-extension stage plan");
    extend->add_option("--targets", targets, "target context lengths");
    extend->add_option("--budgets", budgets, "per-stage token budgets");
    extend->add_option("--dim", dim, "head dim");
    extend->add_option("--base", base, "original rope base");
    extend->add_option("--orig", orig, "original context length");
    extend->add_option("--out", out, "plan JSON path")->required();

    auto* upsample = app.add_subcommand("upsample", "length-upsample a corpus");
    upsample->add_option("--in", in_paths, "input JSONL shards")->required()->expected(-1);
    upsample->add_option("--frac", frac, "target long-token fraction");
    upsample->add_option("--minlen", minlen, "long-document threshold (tokens)")->required();
    upsample->add_option("--seed", seed, "sampling seed");
    upsample->add_option("--tokens", tokens, "token budget to draw")->required();
    upsample->add_option("--model", model, "tokenizer model for lengths");
    upsample->add_option("--out", out, "output shard directory")->required();
    upsample->add_option("--report", report, "weight report path");

    auto* vrope = app.add_subcommand("validate-rope", "rope invariant sweep");
    vrope->add_option("--dim", dim, "head dim");
    vrope->add_option("--base", base, "rope base");
    vrope->add_option("--max-pos", max_pos, "position range");
    vrope->add_option("--samples", samples, "sample count");
    vrope->add_option("--seed", seed, "sweep seed");
    vrope->add_option("--out", out, "report JSON path");

    auto* ngen = app.add_subcommand("niah-gen", "generate needle-in-a-haystack cases");
    ngen->add_option("--model", model, "tokenizer model")->required();
    ngen->add_option("--filler", filler_paths, "filler JSONL shards")->required()->expected(-1);
    ngen->add_option("--lengths", lengths, "context lengths")->required();
    ngen->add_option("--depths", depths, "needle depths")->required();
    ngen->add_option("--cases", cases_per_cell, "cases per cell");
    ngen->add_option("--seed", seed, "generation seed");
    ngen->add_option("--needle", needle_template, "needle template with {payload}");
    ngen->add_option("--question", question, "question text");
    ngen->add_option("--out", out, "case directory")->required();

    auto* nrun = app.add_subcommand("niah-run", "run a retriever over generated cases");
    nrun->add_option("--cases", cases, "case directory from niah-gen")->required();
    nrun->add_option("--cmd", cmd, "retriever command (invoked: cmd case.json answer.txt)")
        ->required();
    nrun->add_option("--out", out, "grid csv path")->required();

    auto* nreport = app.add_subcommand("niah-report", "summarize a grid csv");
    nreport->add_option("--grid", grid, "grid csv from niah-run")->required();

    auto* run = app.add_subcommand("run", "run a full pipeline config");
    std::string pipeline_path, workspace;
    run->add_option("config", pipeline_path, "pipeline JSON")->required();
    run->add_option("--workspace", workspace, "workspace root (default: config or env)");

    try {
        app.parse(argc, argv);

        if (stats->parsed()) return dispatch("stats", {{"manifest", manifest}}, global);
        if (dedup->parsed()) {
            cfg = {{"in", in_paths}, {"out", out},  {"k", k},
                   {"bands", bands}, {"rows", rows}, {"threshold", threshold},
                   {"seed", seed}};
            if (!report.empty()) cfg["report"] = report;
            return dispatch("dedup", cfg, global);
        }
        if (filter->parsed()) {
            cfg = {{"in", in_paths}, {"out", out}, {"rules", rules}};
            if (!ppl.empty()) cfg["ppl"] = ppl;
            if (!report.empty()) cfg["report"] = report;
            return dispatch("filter", cfg, global);
        }
        if (tok_train->parsed())
            return dispatch("tok-train", {{"in", in_paths}, {"vocab", vocab}, {"out", out}},
                            global);
        if (tok_encode->parsed())
            return dispatch("tok-encode", {{"model", model}, {"in", in_paths}, {"out", out}},
                            global);
        if (mix->parsed())
            return dispatch("mix", {{"spec", spec}, {"tokens", tokens}, {"out", out}}, global);
        if (pack->parsed()) {
            cfg = {{"model", model}, {"plan", plan},  {"len", len},
                   {"out", out},     {"eos_reset", !no_eos_reset}};
            if (pack->count("--seed") > 0) cfg["seed"] = seed;
            return dispatch("pack", cfg, global);
        }
        if (plan_lr->parsed())
            return dispatch("plan-lr", {{"config", sched}, {"emit", cmd}, {"out", out}}, global);
        if (extend->parsed()) {
            cfg = {{"dim", dim}, {"base", base}, {"orig", orig}, {"out", out}};
            if (!targets.empty()) cfg["targets"] = targets;
            if (!budgets.empty()) cfg["budgets"] = budgets;
            return dispatch("extend-plan", cfg, global);
        }
        if (upsample->parsed()) {
            cfg = {{"in", in_paths}, {"frac", frac},     {"minlen", minlen},
                   {"seed", seed},   {"tokens", tokens}, {"out", out}};
            if (!model.empty()) cfg["model"] = model;
            if (!report.empty()) cfg["report"] = report;
            return dispatch("upsample", cfg, global);
        }
        if (vrope->parsed()) {
            cfg = {{"dim", dim},
                   {"base", base},
                   {"max_pos", max_pos},
                   {"samples", samples},
                   {"seed", seed}};
            if (!out.empty()) cfg["out"] = out;
            const json summary = corpusforge::stages::run_stage("validate-rope", cfg, global.jobs);
            std::cout << summary.dump(2) << "\n";
            return summary["pass"].get<bool>() ? 0 : 2;
        }
        if (ngen->parsed()) {
            cfg = {{"model", model},   {"filler", filler_paths}, {"lengths", lengths},
                   {"depths", depths}, {"cases", cases_per_cell}, {"seed", seed},
                   {"out", out}};
            if (!needle_template.empty()) cfg["needle"] = needle_template;
            if (!question.empty()) cfg["question"] = question;
            return dispatch("niah-gen", cfg, global);
        }
        if (nrun->parsed())
            return dispatch("niah-run", {{"cases", cases}, {"cmd", cmd}, {"out", out}}, global);
        if (nreport->parsed()) return dispatch("niah-report", {{"grid", grid}}, global);
        if (run->parsed()) {
            const corpusforge::PipelineConfig config =
                corpusforge::load_pipeline(pipeline_path, workspace);
            const corpusforge::RunReport report_out =
                corpusforge::run_pipeline(config, global.jobs);
            json stages_json = json::array();
            for (const auto& stage : report_out.stages)
                stages_json.push_back({{"name", stage.name},
                                       {"kind", stage.kind},
                                       {"executed", stage.executed}});
            std::cout << json{{"executed", report_out.executed},
                              {"skipped", report_out.skipped},
                              {"stages", stages_json}}
                             .dump(2)
                      << "\n";
            return 0;
        }
        return 1;
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;  // all usage errors map to exit 1
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return static_cast<int>(e.kind());
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
}
