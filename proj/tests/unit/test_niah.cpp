#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "corpusforge/error.hpp"
#include "corpusforge/niah.hpp"
#include "helpers.hpp"

using namespace corpusforge;

namespace {

struct Fixture {
    BpeModel model;
    std::vector<uint32_t> pool;

    Fixture() : model(make_model()) {
        std::mt19937_64 rng(1234);
        std::string filler;
        while (filler.size() < 60000) filler += testutil::random_word(rng, 5) + " ";
        pool = model.encode(filler);
    }

    static BpeModel make_model() {
        std::mt19937_64 rng(55);
        std::vector<std::string> corpus;
        for (int i = 0; i < 30; ++i) corpus.push_back(testutil::random_words(rng, 60, 5));
        return train_bpe(corpus, 400);
    }
};

}  // namespace

TEST_CASE("case construction invariants across depths") {
    const Fixture fx;
    const std::string payload = "48291047";
    const std::string needle = "The magic number is 48291047. Remember it.";
    const uint64_t needle_tokens = fx.model.encode(needle).size();

    for (double depth : {0.0, 0.25, 0.5, 0.75, 1.0}) {
        const NiahCase c =
            generate_case(2000, depth, needle, payload, "What is the magic number?",
                          fx.pool, fx.model);
        CHECK(c.tokens.size() == 2000);
        CHECK(c.needle_token_offset ==
              static_cast<uint64_t>(std::llround(depth * double(2000 - needle_tokens))));
        // payload occurs exactly once
        size_t count = 0, at = 0;
        while ((at = c.haystack.find(payload, at)) != std::string::npos) {
            ++count;
            ++at;
        }
        CHECK(count == 1);
    }

    const NiahCase front = generate_case(1000, 0.0, needle, payload, "?", fx.pool, fx.model);
    CHECK(front.needle_token_offset == 0);
    const NiahCase back = generate_case(1000, 1.0, needle, payload, "?", fx.pool, fx.model);
    CHECK(back.needle_token_offset == 1000 - needle_tokens);  // needle ends at the last token
}

TEST_CASE("depth 0.5 offset matches the rounding formula") {
    const Fixture fx;
    const std::string payload = "7777";  // encodes to 4 digit tokens
    // pad the needle to exactly 10 tokens: 4 digits + 6 single-char words
    std::string needle = payload + " a b c d e f";
    uint64_t n = fx.model.encode(needle).size();
    REQUIRE(n >= 10);
    const NiahCase c = generate_case(1000, 0.5, needle, payload, "?", fx.pool, fx.model);
    CHECK(c.needle_token_offset == static_cast<uint64_t>(std::llround(0.5 * (1000.0 - n))));
}

TEST_CASE("payload collisions with filler are rejected") {
    const Fixture fx;
    // craft filler containing the payload
    const std::string payload = "31415926";
    const auto poisoned = fx.model.encode("before " + payload + " after " +
                                          std::string(4000, 'x'));
    CHECK_THROWS_WITH_AS(
        generate_case(64, 0.5, "code " + payload + " end", payload, "?", poisoned, fx.model),
        doctest::Contains("collision"), Error);
}

TEST_CASE("filler exhaustion is an error") {
    const Fixture fx;
    const std::vector<uint32_t> tiny(10, 65);
    CHECK_THROWS_AS(generate_case(1000, 0.5, "needle 123", "123", "?", tiny, fx.model), Error);
}

TEST_CASE("score_answer is a whitespace-normalized substring match") {
    const Fixture fx;
    const NiahCase c = generate_case(500, 0.5, "magic 55667788 token", "55667788", "?",
                                     fx.pool, fx.model);
    CHECK(score_answer("the code is 55667788 indeed", c) == 1);
    CHECK(score_answer("", c) == 0);
    CHECK(score_answer("nothing here", c) == 0);
    // a line break between surrounding words leaves the payload intact
    CHECK(score_answer("prefix\n55667788\nsuffix", c) == 1);
    CHECK(score_answer("found:\n  55667788", c) == 1);
}

TEST_CASE("perfect, null, and window oracles over an in-process grid") {
    const Fixture fx;
    NiahGridConfig config;
    config.lengths = {128, 256, 512};
    config.depths = {0.0, 0.5, 1.0};
    config.cases_per_cell = 2;
    config.seed = 31;
    config.needle_template = "{payload}";  // payload-only needle

    const Retriever perfect = [](const NiahCase& c, size_t) {
        return RetrieverReply{true, c.haystack};
    };
    const NiahGrid all_ones = run_grid(perfect, config, fx.pool, fx.model);
    for (const auto& score : all_ones.scores) {
        REQUIRE(score.has_value());
        CHECK(*score == 1.0);
    }

    const Retriever null_retriever = [](const NiahCase&, size_t) {
        return RetrieverReply{true, std::string{}};
    };
    for (const auto& score : run_grid(null_retriever, config, fx.pool, fx.model).scores) {
        REQUIRE(score.has_value());
        CHECK(*score == 0.0);
    }

    // window oracle: sees only the last W tokens
    const uint64_t W = 200;
    const Retriever window = [&](const NiahCase& c, size_t) {
        const size_t start = c.tokens.size() > W ? c.tokens.size() - W : 0;
        return RetrieverReply{
            true, fx.model.decode(std::span<const uint32_t>(c.tokens.data() + start,
                                                            c.tokens.size() - start))};
    };
    const NiahGrid stepped = run_grid(window, config, fx.pool, fx.model);
    for (size_t li = 0; li < config.lengths.size(); ++li) {
        const uint64_t L = config.lengths[li];
        double prev = -1.0;
        for (size_t di = 0; di < config.depths.size(); ++di) {
            // needle is the 8-token payload; visible iff offset >= L - W
            const uint64_t offset = static_cast<uint64_t>(
                std::llround(config.depths[di] * static_cast<double>(L - 8)));
            const double expected = (L <= W || offset >= L - W) ? 1.0 : 0.0;
            REQUIRE(stepped.at(li, di).has_value());
            CHECK(*stepped.at(li, di) == expected);
            // monotone in depth for fixed length
            CHECK(*stepped.at(li, di) >= prev);
            prev = *stepped.at(li, di);
        }
    }
}

TEST_CASE("retriever failures mark cells absent and the run continues") {
    const Fixture fx;
    NiahGridConfig config;
    config.lengths = {128, 256};
    config.depths = {0.0, 1.0};
    config.needle_template = "{payload}";
    const Retriever flaky = [](const NiahCase& c, size_t) {
        if (c.context_tokens == 128) return RetrieverReply{false, ""};
        return RetrieverReply{true, c.haystack};
    };
    const NiahGrid grid = run_grid(flaky, config, fx.pool, fx.model);
    CHECK(!grid.at(0, 0).has_value());
    CHECK(!grid.at(0, 1).has_value());
    REQUIRE(grid.at(1, 0).has_value());
    CHECK(*grid.at(1, 0) == 1.0);
}

TEST_CASE("grid determinism and csv round trip") {
    const Fixture fx;
    NiahGridConfig config;
    config.lengths = {128, 256};
    config.depths = {0.0, 0.5, 1.0};
    config.seed = 77;
    config.needle_template = "{payload}";
    const Retriever perfect = [](const NiahCase& c, size_t) {
        return RetrieverReply{true, c.haystack};
    };
    const NiahGrid a = run_grid(perfect, config, fx.pool, fx.model);
    const NiahGrid b = run_grid(perfect, config, fx.pool, fx.model);
    CHECK(a.scores == b.scores);

    testutil::TempDir tmp;
    save_grid_csv(a, tmp / "grid.csv");
    const NiahGrid loaded = load_grid_csv(tmp / "grid.csv");
    CHECK(loaded.lengths == a.lengths);
    CHECK(loaded.depths == a.depths);
    CHECK(loaded.scores == a.scores);
}
