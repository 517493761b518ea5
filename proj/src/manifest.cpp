#include "corpusforge/manifest.hpp"

#include <json.hpp>

#include <cmath>
#include <fstream>

#include "corpusforge/error.hpp"

namespace corpusforge {

using nlohmann::json;

std::vector<SourceStats> corpus_stats(const CorpusManifest& manifest) {
    uint64_t shard_docs = 0;
    for (const auto& shard : manifest.shards) shard_docs += shard.doc_count;
    uint64_t source_docs = 0;
    for (const auto& [_, totals] : manifest.per_source) source_docs += totals.doc_count;
    if (shard_docs != source_docs)
        fail_data("inconsistent manifest: shard doc total " + std::to_string(shard_docs) +
                  " != per-source total " + std::to_string(source_docs));
    if (manifest.per_source.empty()) return {};
    if (source_docs == 0) fail_data("inconsistent manifest: no documents");

    bool all_tokens = true;
    uint64_t total_tokens = 0;
    for (const auto& [_, totals] : manifest.per_source) {
        if (!totals.token_count) {
            all_tokens = false;
            break;
        }
        total_tokens += *totals.token_count;
    }

    std::vector<SourceStats> stats;
    stats.reserve(manifest.per_source.size());
    for (const auto& [source, totals] : manifest.per_source) {
        SourceStats row;
        row.source = source;
        row.doc_count = totals.doc_count;
        row.doc_fraction = static_cast<double>(totals.doc_count) / static_cast<double>(source_docs);
        if (all_tokens && total_tokens > 0) {
            row.token_count = totals.token_count;
            row.token_fraction =
                static_cast<double>(*totals.token_count) / static_cast<double>(total_tokens);
        }
        stats.push_back(std::move(row));
    }
    return stats;
}

void save_manifest(const CorpusManifest& manifest, const std::filesystem::path& path) {
    json shards = json::array();
    for (const auto& shard : manifest.shards) {
        shards.push_back({{"path", shard.path},
                          {"doc_count", shard.doc_count},
                          {"byte_count", shard.byte_count},
                          {"checksum", shard.checksum}});
    }
    json per_source = json::object();
    for (const auto& [source, totals] : manifest.per_source) {
        json entry{{"doc_count", totals.doc_count}};
        if (totals.token_count) entry["token_count"] = *totals.token_count;
        per_source[source] = entry;
    }
    json doc{{"shards", shards}, {"per_source", per_source}};
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) fail_data("cannot write manifest: " + path.string());
    out << doc.dump(2) << "\n";
}

CorpusManifest load_manifest(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) fail_data("cannot open manifest: " + path.string());
    json doc;
    try {
        in >> doc;
    } catch (const json::exception& e) {
        fail_data("malformed manifest " + path.string() + ": " + e.what());
    }
    CorpusManifest manifest;
    for (const auto& shard : doc.value("shards", json::array())) {
        manifest.shards.push_back(ShardEntry{shard.at("path").get<std::string>(),
                                             shard.at("doc_count").get<uint64_t>(),
                                             shard.at("byte_count").get<uint64_t>(),
                                             shard.at("checksum").get<uint64_t>()});
    }
    for (const auto& [source, totals] : doc.value("per_source", json::object()).items()) {
        SourceTotals t;
        t.doc_count = totals.at("doc_count").get<uint64_t>();
        if (totals.contains("token_count")) t.token_count = totals["token_count"].get<uint64_t>();
        manifest.per_source[source] = t;
    }
    return manifest;
}

}  // namespace corpusforge
