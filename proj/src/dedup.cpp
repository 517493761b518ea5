#include "corpusforge/dedup.hpp"

#include <json.hpp>

#include <algorithm>
#include <fstream>
#include <numeric>
#include <unordered_set>

#include "corpusforge/error.hpp"
#include "corpusforge/hash.hpp"
#include "corpusforge/text.hpp"

namespace corpusforge {

ShingleSet shingle(std::string_view text, int width) {
    if (width < 1) fail_data("shingle width must be >= 1");
    const std::string normalized = normalize_for_dedup(text);
    const std::vector<std::string> words = split_words(normalized);
    ShingleSet set;
    if (words.size() < static_cast<size_t>(width)) return set;
    set.hashes.reserve(words.size() - width + 1);
    for (size_t i = 0; i + width <= words.size(); ++i) {
        uint64_t h = 0xcbf29ce484222325ULL;
        for (int k = 0; k < width; ++k) {
            h = fnv1a64(words[i + k], h);
            h = fnv1a64(std::string_view("\x1f", 1), h);  // word separator
        }
        set.hashes.push_back(h);
    }
    std::sort(set.hashes.begin(), set.hashes.end());
    set.hashes.erase(std::unique(set.hashes.begin(), set.hashes.end()), set.hashes.end());
    return set;
}

ShingleSet shingle_for_lang(std::string_view text, std::string_view lang, int width_en,
                            int width_zh) {
    if (lang != "zh") return shingle(text, width_en);
    // Chinese has no word spaces; segment into single characters first.
    const std::string normalized = normalize_for_dedup(text);
    std::string spaced;
    spaced.reserve(normalized.size() * 2);
    for (const auto& c : decode_utf8(normalized)) {
        if (!spaced.empty()) spaced.push_back(' ');
        spaced.append(normalized.substr(c.byte_offset, c.byte_len));
    }
    return shingle(spaced, width_zh);
}

MinHasher::MinHasher(int num_hashes, uint64_t seed) : k_(num_hashes), seed_(seed) {
    if (k_ < 1) fail_data("minhash signature size must be >= 1");
    slot_seeds_.reserve(k_);
    for (int i = 0; i < k_; ++i) slot_seeds_.push_back(substream_seed(seed, i));
}

MinHashSignature MinHasher::compute(const ShingleSet& set) const {
    MinHashSignature sig;
    sig.mins.assign(k_, UINT64_MAX);
    for (uint64_t shingle_hash : set.hashes) {
        for (int i = 0; i < k_; ++i) {
            const uint64_t h = mix64(shingle_hash ^ slot_seeds_[i]);
            if (h < sig.mins[i]) sig.mins[i] = h;
        }
    }
    return sig;
}

double estimate_jaccard(const MinHashSignature& a, const MinHashSignature& b) {
    if (a.mins.size() != b.mins.size())
        fail_data("minhash signature size mismatch: " + std::to_string(a.mins.size()) + " vs " +
                  std::to_string(b.mins.size()));
    if (a.mins.empty()) fail_data("empty minhash signature");
    size_t agree = 0;
    for (size_t i = 0; i < a.mins.size(); ++i) agree += a.mins[i] == b.mins[i];
    return static_cast<double>(agree) / static_cast<double>(a.mins.size());
}

LshIndex::LshIndex(LshParams params) : params_(params) {
    if (params.bands < 1 || params.rows < 1 || params.bands * params.rows != params.num_hashes)
        fail_data("LSH bands*rows must equal signature size (got " + std::to_string(params.bands) +
                  "*" + std::to_string(params.rows) + " != " + std::to_string(params.num_hashes) +
                  ")");
    bands_.resize(params.bands);
}

void LshIndex::check_signature(const MinHashSignature& sig) const {
    if (static_cast<int>(sig.mins.size()) != params_.num_hashes)
        fail_data("signature size " + std::to_string(sig.mins.size()) +
                  " does not match index parameter k=" + std::to_string(params_.num_hashes));
}

uint64_t LshIndex::band_key(const MinHashSignature& sig, int band) const {
    uint64_t h = 0xcbf29ce484222325ULL;
    for (int r = 0; r < params_.rows; ++r)
        h = fnv1a64_u64(sig.mins[static_cast<size_t>(band) * params_.rows + r], h);
    return h;
}

void LshIndex::insert(const std::string& id, const MinHashSignature& sig) {
    check_signature(sig);
    for (int b = 0; b < params_.bands; ++b) bands_[b][band_key(sig, b)].push_back(id);
    ++inserted_;
}

std::vector<std::string> LshIndex::candidates(const MinHashSignature& sig) const {
    check_signature(sig);
    std::vector<std::string> out;
    std::unordered_set<std::string> seen;
    for (int b = 0; b < params_.bands; ++b) {
        auto it = bands_[b].find(band_key(sig, b));
        if (it == bands_[b].end()) continue;
        for (const auto& id : it->second)
            if (seen.insert(id).second) out.push_back(id);
    }
    return out;
}

namespace {

class UnionFind {
public:
    explicit UnionFind(size_t n) : parent_(n) { std::iota(parent_.begin(), parent_.end(), 0); }

    size_t find(size_t x) {
        while (parent_[x] != x) {
            parent_[x] = parent_[parent_[x]];
            x = parent_[x];
        }
        return x;
    }

    void merge(size_t a, size_t b) { parent_[find(a)] = find(b); }

private:
    std::vector<size_t> parent_;
};

}  // namespace

DedupResult dedup_corpus(const std::vector<Document>& docs, const DedupParams& params) {
    std::unordered_map<std::string, size_t> index_of;
    for (size_t i = 0; i < docs.size(); ++i) {
        if (!index_of.emplace(docs[i].id, i).second)
            fail_data("duplicate document id '" + docs[i].id + "' in dedup input");
    }

    const MinHasher hasher(params.num_hashes, params.seed);
    LshIndex index(LshParams{params.num_hashes, params.bands, params.rows});
    UnionFind clusters(docs.size());

    std::vector<MinHashSignature> signatures(docs.size());
    std::vector<bool> indexed(docs.size(), false);
    for (size_t i = 0; i < docs.size(); ++i) {
        const ShingleSet set =
            shingle_for_lang(docs[i].text, docs[i].lang, params.width_en, params.width_zh);
        if (set.empty()) continue;  // sentinel signatures would collide spuriously
        signatures[i] = hasher.compute(set);
        for (const auto& candidate_id : index.candidates(signatures[i])) {
            const size_t j = index_of.at(candidate_id);
            if (estimate_jaccard(signatures[i], signatures[j]) >= params.threshold)
                clusters.merge(i, j);
        }
        index.insert(docs[i].id, signatures[i]);
        indexed[i] = true;
    }

    // Group members by root; the lexicographically smallest id represents.
    std::unordered_map<size_t, std::vector<size_t>> groups;
    for (size_t i = 0; i < docs.size(); ++i)
        if (indexed[i]) groups[clusters.find(i)].push_back(i);

    std::vector<bool> dropped(docs.size(), false);
    DedupReport report;
    report.params = params;
    report.input_docs = docs.size();
    for (auto& [_, members] : groups) {
        if (members.size() < 2) continue;
        size_t keep = members[0];
        for (size_t m : members)
            if (docs[m].id < docs[keep].id) keep = m;
        DuplicateCluster cluster;
        cluster.kept = docs[keep].id;
        for (size_t m : members) {
            if (m == keep) continue;
            dropped[m] = true;
            cluster.dropped.push_back(docs[m].id);
        }
        std::sort(cluster.dropped.begin(), cluster.dropped.end());
        report.clusters.push_back(std::move(cluster));
    }
    std::sort(report.clusters.begin(), report.clusters.end(),
              [](const DuplicateCluster& a, const DuplicateCluster& b) { return a.kept < b.kept; });

    DedupResult result;
    result.kept.reserve(docs.size());
    for (size_t i = 0; i < docs.size(); ++i)
        if (!dropped[i]) result.kept.push_back(docs[i]);
    report.kept_docs = result.kept.size();
    result.report = std::move(report);
    return result;
}

void save_dedup_report(const DedupReport& report, const std::filesystem::path& path) {
    nlohmann::json clusters = nlohmann::json::array();
    for (const auto& cluster : report.clusters)
        clusters.push_back({{"kept", cluster.kept}, {"dropped", cluster.dropped}});
    nlohmann::json doc{{"input_docs", report.input_docs},
                       {"kept_docs", report.kept_docs},
                       {"clusters", clusters},
                       {"params",
                        {{"num_hashes", report.params.num_hashes},
                         {"bands", report.params.bands},
                         {"rows", report.params.rows},
                         {"threshold", report.params.threshold},
                         {"seed", report.params.seed},
                         {"width_en", report.params.width_en},
                         {"width_zh", report.params.width_zh}}}};
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) fail_data("cannot write dedup report: " + path.string());
    out << doc.dump(2) << "\n";
}

}  // namespace corpusforge
