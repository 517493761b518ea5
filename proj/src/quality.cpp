#include "corpusforge/quality.hpp"

#include <json.hpp>

#include <fstream>
#include <unordered_map>

#include "corpusforge/error.hpp"
#include "corpusforge/text.hpp"

namespace corpusforge {

using nlohmann::json;

RuleMeasurements measure(const Document& doc) {
    RuleMeasurements m;
    const auto codepoints = decode_utf8(doc.text);
    m.chars = codepoints.size();

    uint64_t non_ws = 0;
    uint64_t symbols = 0;
    for (const auto& c : codepoints) {
        const CharClass cls = classify(c.value);
        if (cls == CharClass::Whitespace) continue;
        ++non_ws;
        if (cls == CharClass::PunctSymbol) ++symbols;
    }
    m.symbol_frac = non_ws == 0 ? 0.0 : static_cast<double>(symbols) / static_cast<double>(non_ws);

    const std::vector<std::string> words = split_words(doc.text);
    if (!words.empty()) {
        uint64_t total_len = 0;
        for (const auto& w : words) total_len += codepoint_count(w);
        m.mean_word_len = static_cast<double>(total_len) / static_cast<double>(words.size());
    }

    // Lines split on '\n'; a single trailing newline does not add an empty line.
    std::vector<std::string_view> lines;
    {
        std::string_view rest = doc.text;
        if (!rest.empty() && rest.back() == '\n') rest.remove_suffix(1);
        size_t start = 0;
        if (!rest.empty()) {
            for (size_t i = 0; i <= rest.size(); ++i) {
                if (i == rest.size() || rest[i] == '\n') {
                    lines.push_back(rest.substr(start, i - start));
                    start = i + 1;
                }
            }
        }
    }
    if (!lines.empty()) {
        std::unordered_map<std::string_view, int> seen;
        for (const auto& line : lines) seen[line] += 1;
        m.line_dup_frac =
            1.0 - static_cast<double>(seen.size()) / static_cast<double>(lines.size());
    }

    if (words.size() >= 2) {
        std::unordered_map<std::string, uint64_t> bigrams;
        uint64_t best = 0;
        for (size_t i = 0; i + 1 < words.size(); ++i) {
            std::string key = words[i] + "\x1f" + words[i + 1];
            best = std::max(best, ++bigrams[key]);
        }
        m.top2gram_frac = static_cast<double>(best) / static_cast<double>(words.size() - 1);
    }
    return m;
}

FilterVerdict apply_rules(const Document& doc, const FilterRuleSet& rules,
                          std::optional<double> ppl) {
    if (rules.ppl_max && doc.lang == "zh" && !ppl)
        fail_data("missing perplexity score for document '" + doc.id + "'");

    const RuleMeasurements m = measure(doc);
    FilterVerdict verdict;
    auto trigger = [&](const std::string& rule, double measured) {
        verdict.triggered.push_back({rule, measured});
    };
    if (m.chars < rules.min_chars) trigger("min_chars", static_cast<double>(m.chars));
    if (m.mean_word_len > rules.max_mean_word_len) trigger("max_mean_word_len", m.mean_word_len);
    if (m.line_dup_frac > rules.max_line_dup_frac) trigger("max_line_dup_frac", m.line_dup_frac);
    if (m.symbol_frac > rules.max_symbol_frac) trigger("max_symbol_frac", m.symbol_frac);
    if (m.top2gram_frac > rules.max_top2gram_frac) trigger("max_top2gram_frac", m.top2gram_frac);
    if (rules.ppl_max && ppl && *ppl > *rules.ppl_max) trigger("ppl_max", *ppl);
    verdict.pass = verdict.triggered.empty();
    return verdict;
}

FilterResult filter_corpus(const std::vector<Document>& docs, const FilterRuleSet& rules,
                           const std::map<std::string, double>& ppl_scores) {
    FilterResult result;
    result.report.input_docs = docs.size();
    for (const auto& doc : docs) {
        std::optional<double> ppl;
        if (auto it = ppl_scores.find(doc.id); it != ppl_scores.end()) ppl = it->second;
        const FilterVerdict verdict = apply_rules(doc, rules, ppl);
        if (verdict.pass) {
            result.kept.push_back(doc);
        } else {
            ++result.report.rejected_docs;
            for (const auto& violation : verdict.triggered)
                ++result.report.by_rule[violation.rule];
        }
    }
    result.report.kept_docs = result.kept.size();
    return result;
}

FilterRuleSet load_rules(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) fail_data("cannot open rules file: " + path.string());
    json doc;
    try {
        in >> doc;
    } catch (const json::exception& e) {
        fail_data("malformed rules file " + path.string() + ": " + e.what());
    }
    FilterRuleSet rules;
    rules.min_chars = doc.value("min_chars", rules.min_chars);
    rules.max_mean_word_len = doc.value("max_mean_word_len", rules.max_mean_word_len);
    rules.max_line_dup_frac = doc.value("max_line_dup_frac", rules.max_line_dup_frac);
    rules.max_symbol_frac = doc.value("max_symbol_frac", rules.max_symbol_frac);
    rules.max_top2gram_frac = doc.value("max_top2gram_frac", rules.max_top2gram_frac);
    if (doc.contains("ppl_max")) rules.ppl_max = doc["ppl_max"].get<double>();
    for (double frac : {rules.max_line_dup_frac, rules.max_symbol_frac, rules.max_top2gram_frac})
        if (frac < 0.0 || frac > 1.0) fail_data("rule fractions must lie in [0,1]");
    return rules;
}

void save_rules(const FilterRuleSet& rules, const std::filesystem::path& path) {
    json doc{{"min_chars", rules.min_chars},
             {"max_mean_word_len", rules.max_mean_word_len},
             {"max_line_dup_frac", rules.max_line_dup_frac},
             {"max_symbol_frac", rules.max_symbol_frac},
             {"max_top2gram_frac", rules.max_top2gram_frac}};
    if (rules.ppl_max) doc["ppl_max"] = *rules.ppl_max;
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) fail_data("cannot write rules file: " + path.string());
    out << doc.dump(2) << "\n";
}

std::map<std::string, double> load_ppl_sidecar(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) fail_data("cannot open ppl sidecar: " + path.string());
    std::map<std::string, double> scores;
    std::string line;
    uint64_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        json obj;
        try {
            obj = json::parse(line);
        } catch (const json::exception& e) {
            fail_data("ppl sidecar line " + std::to_string(line_no) + ": " + e.what());
        }
        if (!obj.contains("id") || !obj.contains("ppl"))
            fail_data("ppl sidecar line " + std::to_string(line_no) + ": need id and ppl fields");
        scores[obj["id"].get<std::string>()] = obj["ppl"].get<double>();
    }
    return scores;
}

}  // namespace corpusforge
