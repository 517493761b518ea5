#include "corpusforge/bbpe.hpp"

#include <json.hpp>

#include <algorithm>
#include <fstream>
#include <queue>
#include <unordered_map>
#include <unordered_set>

#include "corpusforge/error.hpp"
#include "corpusforge/text.hpp"

namespace corpusforge {

using nlohmann::json;

std::vector<PreToken> pretokenize(std::string_view text) {
    std::vector<PreToken> out;
    const auto codepoints = decode_utf8(text);

    auto push = [&](std::string bytes, PreTokenKind kind) {
        out.push_back({std::move(bytes), kind});
    };

    std::string run;
    CharClass run_class = CharClass::Letter;
    auto flush_run = [&]() {
        if (run.empty()) return;
        push(std::move(run), run_class == CharClass::Whitespace ? PreTokenKind::SpaceRun
                             : run_class == CharClass::PunctSymbol
                                 ? PreTokenKind::Punct
                                 : PreTokenKind::Word);
        run.clear();
    };

    for (size_t i = 0; i < codepoints.size(); ++i) {
        const auto& c = codepoints[i];
        const CharClass cls = classify(c.value);
        std::string_view bytes = text.substr(c.byte_offset, c.byte_len);

        if (cls == CharClass::Digit) {
            flush_run();
            push(std::string(bytes), PreTokenKind::Digit);
            continue;
        }
        if (cls == CharClass::Whitespace) {
            // A single ' ' directly before a letter attaches to that word.
            const bool next_is_letter = i + 1 < codepoints.size() &&
                                        classify(codepoints[i + 1].value) == CharClass::Letter;
            if (c.value == U' ' && next_is_letter) {
                flush_run();
                run.assign(bytes);
                run_class = CharClass::Letter;
                continue;
            }
            if (!run.empty() && run_class != CharClass::Whitespace) flush_run();
            run.append(bytes);
            run_class = CharClass::Whitespace;
            continue;
        }
        if (!run.empty() && run_class != cls) flush_run();
        run.append(bytes);
        run_class = cls;
    }
    flush_run();
    return out;
}

BpeModel::BpeModel(std::vector<std::pair<uint32_t, uint32_t>> merges,
                   std::vector<std::string> special_names, uint32_t target_vocab)
    : target_vocab_(target_vocab), merges_(std::move(merges)) {
    uint32_t next = kByteTokens;
    for (const auto& name : special_names) {
        if (name.empty()) fail_data("special token name must be nonempty");
        if (!special_ids_.emplace(name, next).second)
            fail_data("duplicate special token name '" + name + "'");
        ++next;
    }
    build_tables();
}

void BpeModel::build_tables() {
    const uint32_t first = first_merge_id();
    expansions_.clear();
    expansions_.reserve(merges_.size());
    merge_rank_.clear();
    for (size_t m = 0; m < merges_.size(); ++m) {
        const auto [left, right] = merges_[m];
        const uint32_t new_id = first + static_cast<uint32_t>(m);
        auto part = [&](uint32_t id) -> std::string {
            if (id < kByteTokens) return std::string(1, static_cast<char>(id));
            if (id < first || id >= new_id)
                fail_data("merge " + std::to_string(m) + " references invalid id " +
                          std::to_string(id));
            return expansions_[id - first];
        };
        expansions_.push_back(part(left) + part(right));
        merge_rank_[{left, right}] = new_id;
    }
    if (vocab_size() > target_vocab_ && target_vocab_ != 0)
        fail_data("model vocab " + std::to_string(vocab_size()) + " exceeds target " +
                  std::to_string(target_vocab_));
}

uint32_t BpeModel::eos_id() const {
    auto it = special_ids_.find(kEosName);
    if (it == special_ids_.end()) fail_data("model has no EOS special token");
    return it->second;
}

bool BpeModel::is_special(uint32_t id) const {
    return id >= kByteTokens && id < first_merge_id();
}

std::string_view BpeModel::expansion(uint32_t id) const {
    if (id < kByteTokens) {
        static const std::vector<std::string> bytes = [] {
            std::vector<std::string> v;
            for (int b = 0; b < 256; ++b) v.emplace_back(1, static_cast<char>(b));
            return v;
        }();
        return bytes[id];
    }
    if (is_special(id)) return {};
    const uint32_t first = first_merge_id();
    if (id - first >= expansions_.size())
        fail_data("token id " + std::to_string(id) + " out of range for vocab " +
                  std::to_string(vocab_size()));
    return expansions_[id - first];
}

std::vector<uint32_t> BpeModel::encode_pretoken(std::string_view bytes) const {
    std::vector<uint32_t> ids;
    ids.reserve(bytes.size());
    for (unsigned char b : bytes) ids.push_back(b);
    if (merge_rank_.empty() || ids.size() < 2) return ids;

    struct Node {
        uint32_t id;
        int prev;
        int next;
        bool alive;
    };
    std::vector<Node> nodes;
    nodes.reserve(ids.size());
    for (size_t i = 0; i < ids.size(); ++i)
        nodes.push_back({ids[i], static_cast<int>(i) - 1,
                         i + 1 < ids.size() ? static_cast<int>(i) + 1 : -1, true});

    // (merge id, left position): lowest merge id first, leftmost first.
    using Cand = std::pair<uint32_t, int>;
    std::priority_queue<Cand, std::vector<Cand>, std::greater<>> heap;
    auto try_push = [&](int left) {
        if (left < 0) return;
        const int right = nodes[left].next;
        if (right < 0) return;
        auto it = merge_rank_.find({nodes[left].id, nodes[right].id});
        if (it != merge_rank_.end()) heap.emplace(it->second, left);
    };
    for (size_t i = 0; i + 1 < nodes.size(); ++i) try_push(static_cast<int>(i));

    while (!heap.empty()) {
        const auto [rank, left] = heap.top();
        heap.pop();
        if (!nodes[left].alive) continue;
        const int right = nodes[left].next;
        if (right < 0 || !nodes[right].alive) continue;
        auto it = merge_rank_.find({nodes[left].id, nodes[right].id});
        if (it == merge_rank_.end() || it->second != rank) continue;  // stale entry

        nodes[left].id = rank;
        nodes[right].alive = false;
        nodes[left].next = nodes[right].next;
        if (nodes[left].next >= 0) nodes[nodes[left].next].prev = left;
        try_push(nodes[left].prev);
        try_push(left);
    }

    std::vector<uint32_t> out;
    for (int i = 0; i >= 0; i = nodes[i].next)
        if (nodes[i].alive) out.push_back(nodes[i].id);
    return out;
}

std::vector<uint32_t> BpeModel::encode(std::string_view text) const {
    std::vector<uint32_t> out;
    out.reserve(text.size() / 2 + 8);
    for (const auto& pretoken : pretokenize(text)) {
        const auto ids = encode_pretoken(pretoken.bytes);
        out.insert(out.end(), ids.begin(), ids.end());
    }
    return out;
}

std::string BpeModel::decode(std::span<const uint32_t> ids) const {
    std::string bytes;
    for (uint32_t id : ids) {
        if (id >= vocab_size())
            fail_data("token id " + std::to_string(id) + " out of range for vocab " +
                      std::to_string(vocab_size()));
        bytes.append(expansion(id));
    }
    if (is_valid_utf8(bytes)) return bytes;
    // Adversarial id sequences can splice merge expansions into malformed
    // byte runs; replace those with U+FFFD instead of failing the pipeline.
    std::string repaired;
    repaired.reserve(bytes.size());
    for (const auto& c : decode_utf8(bytes)) append_utf8(repaired, c.value);
    return repaired;
}

void BpeModel::save(const std::filesystem::path& path) const {
    json specials = json::object();
    for (const auto& [name, id] : special_ids_) specials[name] = id;
    json merges = json::array();
    for (const auto& [left, right] : merges_) merges.push_back({left, right});
    json doc{{"version", 1},
             {"type", "bbpe"},
             {"target_vocab", target_vocab_},
             {"specials", specials},
             {"merges", merges}};
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) fail_data("cannot write model file: " + path.string());
    out << doc.dump() << "\n";
}

BpeModel BpeModel::load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) fail_data("cannot open model file: " + path.string());
    json doc;
    try {
        in >> doc;
    } catch (const json::exception& e) {
        fail_data("malformed model file " + path.string() + ": " + e.what());
    }
    if (doc.value("type", "") != std::string("bbpe"))
        fail_data("not a bbpe model file: " + path.string());

    std::vector<std::pair<std::string, uint32_t>> specials;
    for (const auto& [name, id] : doc.at("specials").items())
        specials.emplace_back(name, id.get<uint32_t>());
    std::sort(specials.begin(), specials.end(),
              [](const auto& a, const auto& b) { return a.second < b.second; });
    std::vector<std::string> names;
    for (size_t i = 0; i < specials.size(); ++i) {
        if (specials[i].second != kByteTokens + i)
            fail_data("special token ids must be dense from 256 in " + path.string());
        names.push_back(specials[i].first);
    }

    std::vector<std::pair<uint32_t, uint32_t>> merges;
    for (const auto& pair : doc.at("merges")) {
        if (!pair.is_array() || pair.size() != 2)
            fail_data("malformed merge entry in " + path.string());
        merges.emplace_back(pair[0].get<uint32_t>(), pair[1].get<uint32_t>());
    }
    return BpeModel(std::move(merges), std::move(names), doc.value("target_vocab", 0u));
}

namespace {

using Pair = uint64_t;
constexpr Pair pack_pair(uint32_t l, uint32_t r) {
    return (static_cast<uint64_t>(l) << 32) | r;
}
constexpr uint32_t pair_left(Pair p) { return static_cast<uint32_t>(p >> 32); }
constexpr uint32_t pair_right(Pair p) { return static_cast<uint32_t>(p & 0xffffffffu); }

struct Word {
    std::vector<uint32_t> symbols;
    uint64_t count;
};

struct HeapEntry {
    uint64_t count;
    Pair pair;
    // max count first; ties on the lowest (left, right)
    bool operator<(const HeapEntry& other) const {
        if (count != other.count) return count < other.count;
        return pair > other.pair;
    }
};

}  // namespace

BpeModel train_bpe(const std::vector<std::string>& texts, uint32_t target_vocab,
                   const std::vector<std::string>& special_names) {
    if (texts.empty()) fail_data("cannot train tokenizer on an empty corpus");
    const uint32_t base = BpeModel::kByteTokens + static_cast<uint32_t>(special_names.size());
    if (target_vocab <= base)
        fail_data("target vocab " + std::to_string(target_vocab) +
                  " leaves no room for merges (base alphabet is " + std::to_string(base) + ")");

    // Distinct pretokens with counts; sorted for reproducible word order.
    std::unordered_map<std::string, uint64_t> pretoken_counts;
    bool any_bytes = false;
    for (const auto& text : texts) {
        for (const auto& pretoken : pretokenize(text)) {
            ++pretoken_counts[pretoken.bytes];
            any_bytes = true;
        }
    }
    if (!any_bytes) fail_data("cannot train tokenizer on an empty corpus");

    std::vector<Word> words;
    {
        std::vector<std::pair<std::string, uint64_t>> sorted(pretoken_counts.begin(),
                                                             pretoken_counts.end());
        std::sort(sorted.begin(), sorted.end());
        words.reserve(sorted.size());
        for (auto& [bytes, count] : sorted) {
            Word word;
            word.count = count;
            word.symbols.reserve(bytes.size());
            for (unsigned char b : bytes) word.symbols.push_back(b);
            words.push_back(std::move(word));
        }
    }

    std::unordered_map<Pair, uint64_t> pair_counts;
    std::unordered_map<Pair, std::unordered_set<uint32_t>> pair_words;
    std::priority_queue<HeapEntry> heap;

    auto add_pair = [&](Pair p, uint64_t count, uint32_t word_idx) {
        pair_counts[p] += count;
        pair_words[p].insert(word_idx);
        heap.push({pair_counts[p], p});
    };
    auto sub_pair = [&](Pair p, uint64_t count) {
        auto it = pair_counts.find(p);
        if (it == pair_counts.end()) return;
        it->second -= std::min(it->second, count);
        if (it->second == 0) {
            pair_counts.erase(it);
            pair_words.erase(p);
        } else {
            heap.push({it->second, p});
        }
    };

    for (uint32_t w = 0; w < words.size(); ++w) {
        const auto& symbols = words[w].symbols;
        for (size_t i = 0; i + 1 < symbols.size(); ++i)
            add_pair(pack_pair(symbols[i], symbols[i + 1]), words[w].count, w);
    }

    std::vector<std::pair<uint32_t, uint32_t>> merges;
    uint32_t next_id = base;
    while (next_id < target_vocab) {
        Pair best = 0;
        uint64_t best_count = 0;
        while (!heap.empty()) {
            const HeapEntry top = heap.top();
            auto it = pair_counts.find(top.pair);
            if (it == pair_counts.end() || it->second != top.count) {
                heap.pop();  // stale
                continue;
            }
            best = top.pair;
            best_count = top.count;
            break;
        }
        if (best_count < 2) break;

        const uint32_t left = pair_left(best);
        const uint32_t right = pair_right(best);
        const uint32_t new_id = next_id++;
        merges.emplace_back(left, right);

        std::vector<uint32_t> touched(pair_words[best].begin(), pair_words[best].end());
        std::sort(touched.begin(), touched.end());
        for (uint32_t w : touched) {
            auto& symbols = words[w].symbols;
            const uint64_t count = words[w].count;

            // Retire the word's old pairs, merge left-to-right, then account
            // for the new pairs. Net-zero for pairs untouched by the merge.
            for (size_t i = 0; i + 1 < symbols.size(); ++i)
                sub_pair(pack_pair(symbols[i], symbols[i + 1]), count);

            std::vector<uint32_t> merged;
            merged.reserve(symbols.size());
            size_t i = 0;
            while (i < symbols.size()) {
                if (i + 1 < symbols.size() && symbols[i] == left && symbols[i + 1] == right) {
                    merged.push_back(new_id);
                    i += 2;
                } else {
                    merged.push_back(symbols[i]);
                    ++i;
                }
            }
            for (size_t j = 0; j + 1 < merged.size(); ++j)
                add_pair(pack_pair(merged[j], merged[j + 1]), count, w);
            symbols = std::move(merged);
        }
        pair_counts.erase(best);
        pair_words.erase(best);
    }

    return BpeModel(std::move(merges), special_names, target_vocab);
}

BpeModel train_bpe(const std::vector<Document>& corpus, uint32_t target_vocab,
                   const std::vector<std::string>& special_names) {
    if (corpus.empty()) fail_data("cannot train tokenizer on an empty corpus");
    std::vector<std::string> texts;
    texts.reserve(corpus.size());
    for (const auto& doc : corpus) texts.push_back(doc.text);
    return train_bpe(texts, target_vocab, special_names);
}

}  // namespace corpusforge
