#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <set>

#include "corpusforge/error.hpp"
#include "corpusforge/quality.hpp"
#include "corpusforge/util.hpp"
#include "helpers.hpp"

using namespace corpusforge;
using testutil::make_doc;

TEST_CASE("measure basic arithmetic") {
    const auto m = measure(make_doc("a", "ab cd"));
    CHECK(m.chars == 5);
    CHECK(m.mean_word_len == doctest::Approx(2.0));
    CHECK(m.line_dup_frac == 0.0);
}

TEST_CASE("duplicate-line fraction counts repeated lines") {
    const auto m = measure(make_doc("a", "same line\nsame line\nsame line\nsame line"));
    CHECK(m.line_dup_frac == doctest::Approx(0.75));  // 1 - 1/4
}

TEST_CASE("all-punctuation text has symbol fraction 1") {
    CHECK(measure(make_doc("a", "!!! ??? ...")).symbol_frac == doctest::Approx(1.0));
    CHECK(measure(make_doc("b", "plain words here")).symbol_frac == doctest::Approx(0.0));
}

TEST_CASE("top bigram fraction") {
    // "x y" 3 times out of 5 bigrams: "x y x y x y" has bigrams
    // xy yx xy yx xy -> top is 3/5
    const auto m = measure(make_doc("a", "x y x y x y"));
    CHECK(m.top2gram_frac == doctest::Approx(3.0 / 5.0));
}

TEST_CASE("passing doc triggers nothing") {
    FilterRuleSet rules;
    rules.min_chars = 3;
    rules.max_symbol_frac = 0.5;
    const auto verdict = apply_rules(make_doc("a", "hello decent text"), rules, std::nullopt);
    CHECK(verdict.pass);
    CHECK(verdict.triggered.empty());
}

TEST_CASE("ppl over the maximum fails with the measured value") {
    FilterRuleSet rules;
    rules.ppl_max = 5000.0;
    const auto verdict = apply_rules(make_doc("a", "text", "web", "zh"), rules, 9000.0);
    CHECK(!verdict.pass);
    REQUIRE(verdict.triggered.size() == 1);
    CHECK(verdict.triggered[0].rule == "ppl_max");
    CHECK(verdict.triggered[0].measured == doctest::Approx(9000.0));
}

TEST_CASE("every violated rule is listed, not only the first") {
    FilterRuleSet rules;
    rules.min_chars = 1000;
    rules.max_symbol_frac = 0.1;
    const auto verdict = apply_rules(make_doc("a", "!!! !!!"), rules, std::nullopt);
    REQUIRE(verdict.triggered.size() == 2);
    CHECK(verdict.triggered[0].rule == "min_chars");
    CHECK(verdict.triggered[1].rule == "max_symbol_frac");
}

TEST_CASE("zh doc without a required ppl score is an error naming the id") {
    FilterRuleSet rules;
    rules.ppl_max = 100.0;
    CHECK_THROWS_WITH_AS(apply_rules(make_doc("zh-7", "文本", "web", "zh"), rules, std::nullopt),
                         doctest::Contains("zh-7"), Error);
    // non-zh docs don't need a score even when the rule exists
    CHECK(apply_rules(make_doc("en-1", "text", "web", "en"), rules, std::nullopt).pass);
}

TEST_CASE("permissive rules keep everything; absurd min_chars rejects everything") {
    std::mt19937_64 rng(3);
    std::vector<Document> docs;
    for (int i = 0; i < 30; ++i)
        docs.push_back(make_doc("d" + std::to_string(i), testutil::random_words(rng, 20)));

    const auto keep_all = filter_corpus(docs, FilterRuleSet{}, {});
    CHECK(keep_all.kept.size() == docs.size());
    CHECK(keep_all.report.rejected_docs == 0);

    FilterRuleSet impossible;
    impossible.min_chars = UINT64_MAX;
    const auto reject_all = filter_corpus(docs, impossible, {});
    CHECK(reject_all.kept.empty());
    CHECK(reject_all.report.by_rule.at("min_chars") == docs.size());
}

TEST_CASE("planted violations are counted exactly") {
    FilterRuleSet rules;
    rules.min_chars = 10;
    rules.max_line_dup_frac = 0.5;
    std::mt19937_64 rng(8);

    std::vector<Document> docs;
    int short_docs = 0, dup_docs = 0;
    for (int i = 0; i < 60; ++i) {
        if (i % 5 == 0) {
            docs.push_back(make_doc("s" + std::to_string(i), "tiny"));
            ++short_docs;
        } else if (i % 7 == 0) {
            docs.push_back(make_doc("l" + std::to_string(i), "dup line\ndup line\ndup line"));
            ++dup_docs;
        } else {
            docs.push_back(make_doc("ok" + std::to_string(i), testutil::random_words(rng, 15)));
        }
    }
    const auto result = filter_corpus(docs, rules, {});
    CHECK(result.report.by_rule.at("min_chars") == static_cast<uint64_t>(short_docs));
    CHECK(result.report.by_rule.at("max_line_dup_frac") == static_cast<uint64_t>(dup_docs));
    CHECK(result.report.kept_docs + result.report.rejected_docs == docs.size());
}

TEST_CASE("filtering is idempotent") {
    FilterRuleSet rules;
    rules.min_chars = 20;
    rules.max_symbol_frac = 0.3;
    std::mt19937_64 rng(11);
    std::vector<Document> docs;
    for (int i = 0; i < 40; ++i) {
        docs.push_back(make_doc("d" + std::to_string(i),
                                i % 3 ? testutil::random_words(rng, 12) : "short!"));
    }
    const auto once = filter_corpus(docs, rules, {});
    const auto twice = filter_corpus(once.kept, rules, {});
    CHECK(twice.kept.size() == once.kept.size());
    CHECK(twice.report.rejected_docs == 0);
}

TEST_CASE("relaxing a threshold never shrinks the kept set") {
    std::mt19937_64 rng(13);
    std::vector<Document> docs;
    for (int i = 0; i < 50; ++i)
        docs.push_back(make_doc("d" + std::to_string(i),
                                testutil::random_words(rng, 1 + static_cast<int>(rng() % 30))));
    FilterRuleSet strict;
    strict.min_chars = 60;
    FilterRuleSet relaxed = strict;
    relaxed.min_chars = 30;
    const auto strict_kept = filter_corpus(docs, strict, {}).kept;
    const auto relaxed_kept = filter_corpus(docs, relaxed, {}).kept;
    CHECK(relaxed_kept.size() >= strict_kept.size());
    // every strictly-kept doc survives relaxation
    std::set<std::string> relaxed_ids;
    for (const auto& doc : relaxed_kept) relaxed_ids.insert(doc.id);
    for (const auto& doc : strict_kept) CHECK(relaxed_ids.count(doc.id) == 1);
}

TEST_CASE("rules and sidecar files round trip") {
    testutil::TempDir tmp;
    FilterRuleSet rules;
    rules.min_chars = 50;
    rules.ppl_max = 4000.0;
    save_rules(rules, tmp / "rules.json");
    const auto loaded = load_rules(tmp / "rules.json");
    CHECK(loaded.min_chars == 50);
    REQUIRE(loaded.ppl_max.has_value());
    CHECK(*loaded.ppl_max == doctest::Approx(4000.0));

    corpusforge::write_text_file(tmp / "ppl.jsonl",
                                 "{\"id\":\"a\",\"ppl\":123.5}\n{\"id\":\"b\",\"ppl\":77}\n");
    const auto scores = load_ppl_sidecar(tmp / "ppl.jsonl");
    CHECK(scores.at("a") == doctest::Approx(123.5));
    CHECK(scores.at("b") == doctest::Approx(77.0));
}
