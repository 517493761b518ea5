#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "corpusforge/error.hpp"
#include "corpusforge/upsample.hpp"
#include "helpers.hpp"

using namespace corpusforge;

TEST_CASE("closed-form weight for the 1% -> 30% example") {
    // 10 long docs of 1000 tokens, 9900 short docs of 100: long share 1%.
    std::vector<uint64_t> lens(9900, 100);
    lens.insert(lens.end(), 10, 1000);
    const auto w = length_upsample_weights(lens, 1000, 0.30);
    CHECK(w.observed_frac == doctest::Approx(0.01));
    CHECK(w.long_weight == doctest::Approx((0.30 / 0.70) * (0.99 / 0.01)).epsilon(1e-12));
}

TEST_CASE("a corpus already at the target gets weight one exactly") {
    // three short docs of 512 and one long doc of 1536: both classes hold
    // exactly 1536 tokens, so the observed share is exactly 0.5
    const std::vector<uint64_t> lens{512, 512, 512, 1536};
    const auto w = length_upsample_weights(lens, 1024, 0.5);
    CHECK(w.observed_frac == 0.5);
    CHECK(w.long_weight == 1.0);
}

TEST_CASE("no long documents is an error that points to synthesis") {
    std::vector<uint64_t> lens(100, 50);
    CHECK_THROWS_WITH_AS(length_upsample_weights(lens, 1000, 0.3),
                         doctest::Contains("synthesize"), Error);
}

TEST_CASE("sampled long-token share lands within 0.02 of the target") {
    std::vector<uint64_t> lens(9900, 100);
    lens.insert(lens.end(), 10, 1000);
    const auto w = length_upsample_weights(lens, 1000, 0.30);
    const auto run = sample_upsampled(lens, w, 1000000, 2024);
    const double share = static_cast<double>(run.long_tokens) /
                         static_cast<double>(run.total_tokens);
    CHECK(std::abs(share - 0.30) <= 0.02);
}

TEST_CASE("weight-one sampling matches the natural sampler statistically") {
    // target equals observed; the long share should track the natural share
    std::vector<uint64_t> lens;
    for (int i = 0; i < 500; ++i) lens.push_back(128);
    for (int i = 0; i < 100; ++i) lens.push_back(640);
    const double natural = 640.0 * 100 / (640.0 * 100 + 128.0 * 500);
    const auto w = length_upsample_weights(lens, 256, natural);
    CHECK(w.long_weight == doctest::Approx(1.0).epsilon(1e-9));
    const auto run = sample_upsampled(lens, w, 500000, 7);
    const double share = static_cast<double>(run.long_tokens) /
                         static_cast<double>(run.total_tokens);
    CHECK(std::abs(share - natural) <= 0.02);
}

TEST_CASE("sampling is deterministic under the seed") {
    std::vector<uint64_t> lens(200, 100);
    lens.insert(lens.end(), 5, 2000);
    const auto w = length_upsample_weights(lens, 1500, 0.4);
    const auto a = sample_upsampled(lens, w, 100000, 42);
    const auto b = sample_upsampled(lens, w, 100000, 42);
    CHECK(a.order == b.order);
    const auto c = sample_upsampled(lens, w, 100000, 43);
    CHECK(a.order != c.order);
}

TEST_CASE("synthesize_long_doc concatenates until the target is reached") {
    const BpeModel tok = train_bpe(std::vector<std::string>{"word list for a tiny model"}, 300);
    std::mt19937_64 rng(9);
    std::vector<Document> parts;
    for (int i = 0; i < 40; ++i)
        parts.push_back(testutil::make_doc("part-" + std::to_string(i),
                                           testutil::random_words(rng, 100)));

    const uint64_t part_tokens = tok.encode(parts[0].text).size();
    REQUIRE(part_tokens >= 90);  // ~1 token per byte-pairish word piece

    const Document synth = synthesize_long_doc(parts, 1000, tok);
    CHECK(tok.encode(synth.text).size() >= 1000);
    CHECK(synth.meta.count("synthesized_from") == 1);
    // provenance lists at least ceil(1000 / part_tokens) parts
    const std::string& prov = synth.meta.at("synthesized_from");
    const size_t listed = 1 + std::count(prov.begin(), prov.end(), ',');
    CHECK(listed >= 1000 / (part_tokens + 1));

    // one sufficient part stands alone
    const Document single = synthesize_long_doc({parts[0]}, part_tokens / 2, tok);
    CHECK(single.text == parts[0].text);

    CHECK_THROWS_AS(synthesize_long_doc({}, 100, tok), Error);
    CHECK_THROWS_AS(synthesize_long_doc({parts[0]}, 100000, tok), Error);
}
