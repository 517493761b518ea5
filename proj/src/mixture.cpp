#include "corpusforge/mixture.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <random>

#include "corpusforge/error.hpp"

namespace corpusforge {

using nlohmann::json;

void validate(const MixtureSpec& spec) {
    if (spec.entries.empty()) fail_data("mixture spec has no sources");
    double sum = 0.0;
    std::vector<std::string> names;
    for (const auto& entry : spec.entries) {
        if (entry.source.empty()) fail_data("mixture entry has empty source name");
        if (entry.weight <= 0.0)
            fail_data("mixture weight for '" + entry.source + "' must be positive");
        sum += entry.weight;
        names.push_back(entry.source);
    }
    std::sort(names.begin(), names.end());
    if (std::adjacent_find(names.begin(), names.end()) != names.end())
        fail_data("mixture sources must be unique");
    if (std::abs(sum - 1.0) > 1e-9)
        fail_data("mixture weights sum to " + std::to_string(sum) + ", expected 1.0");
}

std::map<std::string, uint64_t> plan_mixture(const MixtureSpec& spec, uint64_t total_tokens) {
    validate(spec);
    if (total_tokens == 0) fail_data("total token budget must be positive");
    const uint64_t grand_total = total_tokens * spec.epochs;

    struct Row {
        size_t index;
        uint64_t quota;
        double remainder;
    };
    std::vector<Row> rows;
    rows.reserve(spec.entries.size());
    uint64_t assigned = 0;
    for (size_t i = 0; i < spec.entries.size(); ++i) {
        const double exact = spec.entries[i].weight * static_cast<double>(grand_total);
        const uint64_t floor_quota = static_cast<uint64_t>(std::floor(exact));
        rows.push_back({i, floor_quota, exact - static_cast<double>(floor_quota)});
        assigned += floor_quota;
    }
    // Distribute the leftover units to the largest remainders; ties go to
    // earlier spec order.
    uint64_t leftover = grand_total - assigned;
    std::vector<size_t> by_remainder(rows.size());
    for (size_t i = 0; i < rows.size(); ++i) by_remainder[i] = i;
    std::stable_sort(by_remainder.begin(), by_remainder.end(), [&](size_t a, size_t b) {
        return rows[a].remainder > rows[b].remainder;
    });
    for (size_t i = 0; leftover > 0; i = (i + 1) % by_remainder.size(), --leftover)
        ++rows[by_remainder[i]].quota;

    std::map<std::string, uint64_t> quotas;
    for (const auto& row : rows) quotas[spec.entries[row.index].source] = row.quota;
    return quotas;
}

namespace {

// Unbiased bounded draw from a raw 64-bit stream (Lemire's method, with the
// widening product done in unsigned __int128). Keeps sampling portable
// instead of leaning on the library's unspecified distribution mapping.
uint64_t bounded(std::mt19937_64& rng, uint64_t n) {
    if (n == 0) fail_data("bounded draw over empty range");
    while (true) {
        const uint64_t x = rng();
        const unsigned __int128 m = static_cast<unsigned __int128>(x) * n;
        const uint64_t low = static_cast<uint64_t>(m);
        if (low >= n || low >= static_cast<uint64_t>(-static_cast<int64_t>(n)) % n)
            return static_cast<uint64_t>(m >> 64);
    }
}

}  // namespace

SamplePlan sample_stream(const std::vector<SourceDocs>& sources, const MixtureSpec& spec,
                         uint64_t total_tokens) {
    validate(spec);
    if (sources.size() != spec.entries.size())
        fail_data("sample_stream needs one document list per spec entry");
    for (size_t i = 0; i < sources.size(); ++i) {
        if (sources[i].source != spec.entries[i].source)
            fail_data("source order mismatch between spec and documents");
        if (sources[i].docs.empty())
            fail_data("source '" + sources[i].source + "' has no documents");
    }

    const auto quotas = plan_mixture(spec, total_tokens);
    std::vector<int64_t> remaining;
    remaining.reserve(sources.size());
    for (const auto& entry : spec.entries)
        remaining.push_back(static_cast<int64_t>(quotas.at(entry.source)));

    std::mt19937_64 rng(spec.seed);
    std::vector<uint32_t> cursor(sources.size(), 0);
    std::vector<uint64_t> taken(sources.size(), 0);
    SamplePlan plan;
    for (const auto& entry : spec.entries) {
        plan.report.tokens_per_source[entry.source] = 0;
        plan.report.wraps_per_source[entry.source] = 0;
    }

    while (true) {
        uint64_t live_total = 0;
        for (int64_t r : remaining)
            if (r > 0) live_total += static_cast<uint64_t>(r);
        if (live_total == 0) break;

        uint64_t pick = bounded(rng, live_total);
        size_t chosen = 0;
        for (size_t i = 0; i < remaining.size(); ++i) {
            if (remaining[i] <= 0) continue;
            if (pick < static_cast<uint64_t>(remaining[i])) {
                chosen = i;
                break;
            }
            pick -= static_cast<uint64_t>(remaining[i]);
        }

        const auto& docs = sources[chosen].docs;
        const uint32_t doc_idx = cursor[chosen];
        // Taking index 0 again after at least one pass means the source
        // restarted: one epoch repetition.
        if (doc_idx == 0 && taken[chosen] > 0)
            ++plan.report.wraps_per_source[sources[chosen].source];
        ++taken[chosen];
        cursor[chosen] = (cursor[chosen] + 1) % docs.size();

        const uint64_t doc_tokens = docs[doc_idx]->tokens.size();
        remaining[chosen] -= static_cast<int64_t>(doc_tokens);
        plan.order.emplace_back(static_cast<uint32_t>(chosen), doc_idx);
        plan.report.tokens_per_source[sources[chosen].source] += doc_tokens;
        plan.report.total_tokens += doc_tokens;
    }
    return plan;
}

namespace {

// Shard paths inside a spec/plan file resolve against the file's directory.
std::string resolve_shard_path(const std::filesystem::path& anchor, const std::string& value) {
    const std::filesystem::path p(value);
    return p.is_absolute() ? p.string() : (anchor / p).string();
}

}  // namespace

MixtureSpec load_mixture_spec(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) fail_data("cannot open mixture spec: " + path.string());
    json doc;
    try {
        in >> doc;
    } catch (const json::exception& e) {
        fail_data("malformed mixture spec " + path.string() + ": " + e.what());
    }
    MixtureSpec spec;
    spec.epochs = doc.value("epochs", 1u);
    spec.seed = doc.value("seed", 0ull);
    const std::filesystem::path anchor = path.has_parent_path() ? path.parent_path() : ".";
    for (const auto& entry : doc.at("entries")) {
        MixtureEntry e;
        e.source = entry.at("source").get<std::string>();
        e.weight = entry.at("weight").get<double>();
        if (entry.contains("shards"))
            for (const auto& shard : entry["shards"])
                e.shards.push_back(resolve_shard_path(anchor, shard.get<std::string>()));
        spec.entries.push_back(std::move(e));
    }
    validate(spec);
    return spec;
}

void save_mixture_plan(const MixtureSpec& spec, const std::map<std::string, uint64_t>& quotas,
                       uint64_t total_tokens, const std::filesystem::path& path) {
    json entries = json::array();
    for (const auto& entry : spec.entries) {
        entries.push_back({{"source", entry.source},
                           {"weight", entry.weight},
                           {"shards", entry.shards},
                           {"quota", quotas.at(entry.source)}});
    }
    json doc{{"entries", entries},
             {"epochs", spec.epochs},
             {"seed", spec.seed},
             {"total_tokens", total_tokens}};
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) fail_data("cannot write mixture plan: " + path.string());
    out << doc.dump(2) << "\n";
}

MixtureSpec load_mixture_plan(const std::filesystem::path& path,
                              std::map<std::string, uint64_t>* quotas, uint64_t* total_tokens) {
    std::ifstream in(path);
    if (!in) fail_data("cannot open mixture plan: " + path.string());
    json doc;
    try {
        in >> doc;
    } catch (const json::exception& e) {
        fail_data("malformed mixture plan " + path.string() + ": " + e.what());
    }
    MixtureSpec spec;
    spec.epochs = doc.value("epochs", 1u);
    spec.seed = doc.value("seed", 0ull);
    const std::filesystem::path anchor = path.has_parent_path() ? path.parent_path() : ".";
    for (const auto& entry : doc.at("entries")) {
        MixtureEntry e;
        e.source = entry.at("source").get<std::string>();
        e.weight = entry.at("weight").get<double>();
        if (entry.contains("shards"))
            for (const auto& shard : entry["shards"])
                e.shards.push_back(resolve_shard_path(anchor, shard.get<std::string>()));
        if (quotas && entry.contains("quota"))
            (*quotas)[e.source] = entry["quota"].get<uint64_t>();
        spec.entries.push_back(std::move(e));
    }
    if (total_tokens) *total_tokens = doc.value("total_tokens", 0ull);
    validate(spec);
    return spec;
}

}  // namespace corpusforge
