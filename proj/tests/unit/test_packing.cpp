#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "corpusforge/error.hpp"
#include "corpusforge/packing.hpp"
#include "helpers.hpp"

using namespace corpusforge;

namespace {
constexpr uint32_t EOS = 256;

PackOptions opts(uint32_t L) {
    PackOptions o;
    o.seq_len = L;
    o.eos_id = EOS;
    return o;
}

std::vector<std::vector<uint32_t>> random_docs(std::mt19937_64& rng, int count, int max_len) {
    std::vector<std::vector<uint32_t>> docs(count);
    for (auto& doc : docs) {
        const size_t len = 1 + rng() % max_len;
        for (size_t i = 0; i < len; ++i) doc.push_back(static_cast<uint32_t>(rng() % 200));
    }
    return docs;
}
}  // namespace

TEST_CASE("two three-token docs fill one L=8 sequence") {
    const auto seqs = pack({{1, 1, 1}, {2, 2, 2}}, opts(8));
    REQUIRE(seqs.size() == 1);
    CHECK(seqs[0].tokens == std::vector<uint32_t>{1, 1, 1, EOS, 2, 2, 2, EOS});
    CHECK(seqs[0].segment_ids == std::vector<uint16_t>{0, 0, 0, 0, 1, 1, 1, 1});
    CHECK(seqs[0].pad_start == 8);
}

TEST_CASE("a doc of length L-1 fills one sequence in segment 0") {
    const auto seqs = pack({std::vector<uint32_t>(7, 5)}, opts(8));
    REQUIRE(seqs.size() == 1);
    for (uint16_t seg : seqs[0].segment_ids) CHECK(seg == 0);
    CHECK(seqs[0].tokens.back() == EOS);
}

TEST_CASE("a boundary-spanning doc continues into the next sequence") {
    const auto seqs = pack({std::vector<uint32_t>(10, 3)}, opts(8));
    REQUIRE(seqs.size() == 2);
    CHECK(seqs[0].tokens == std::vector<uint32_t>(8, 3));
    CHECK(seqs[0].pad_start == 8);
    for (uint16_t seg : seqs[0].segment_ids) CHECK(seg == 0);

    // second sequence: 2 doc tokens + its EOS, then EOS padding
    CHECK(seqs[1].tokens[0] == 3);
    CHECK(seqs[1].tokens[1] == 3);
    CHECK(seqs[1].tokens[2] == EOS);
    CHECK(seqs[1].pad_start == 3);
    CHECK(seqs[1].segment_ids == std::vector<uint16_t>{0, 0, 0, 1, 2, 3, 4, 5});
}

TEST_CASE("token conservation across random packings") {
    std::mt19937_64 rng(31);
    for (int trial = 0; trial < 20; ++trial) {
        const auto docs = random_docs(rng, 30, 50);
        uint64_t doc_tokens = 0;
        for (const auto& doc : docs) doc_tokens += doc.size();

        uint64_t non_pad = 0;
        Packer packer(opts(64), [&](const PackedSequence& seq) {
            CHECK(seq.tokens.size() == 64);
            non_pad += seq.pad_start;
        });
        for (const auto& doc : docs) packer.add_document(doc);
        packer.finish();
        CHECK(non_pad == doc_tokens + docs.size());
    }
}

TEST_CASE("segment ids are recomputable from EOS positions alone") {
    std::mt19937_64 rng(37);
    const auto docs = random_docs(rng, 60, 30);
    for (const auto& seq : pack(docs, opts(32))) {
        CHECK(segments_from_tokens(seq.tokens, EOS) == seq.segment_ids);
        // non-decreasing, starting at zero
        CHECK(seq.segment_ids.front() == 0);
        for (size_t i = 1; i < seq.segment_ids.size(); ++i) {
            CHECK(seq.segment_ids[i] >= seq.segment_ids[i - 1]);
            const bool bumped = seq.segment_ids[i] == seq.segment_ids[i - 1] + 1;
            const bool flat = seq.segment_ids[i] == seq.segment_ids[i - 1];
            CHECK((bumped || flat));
            CHECK(bumped == (seq.tokens[i - 1] == EOS));
        }
    }
}

TEST_CASE("mask_rule: causality, self-attention, and segment blocking") {
    const auto seqs = pack({{1, 1, 1}, {2, 2, 2}}, opts(8));
    const PackedSequence& seq = seqs[0];
    for (size_t i = 0; i < 8; ++i) CHECK(mask_rule(seq, i, i));
    for (size_t i = 0; i < 8; ++i)
        for (size_t j = i + 1; j < 8; ++j) CHECK(!mask_rule(seq, i, j));
    CHECK(!mask_rule(seq, 5, 2));  // cross-segment
    CHECK(mask_rule(seq, 5, 4));
    CHECK_THROWS_AS(mask_rule(seq, 8, 0), Error);
}

TEST_CASE("within a segment the mask equals the plain causal mask") {
    std::mt19937_64 rng(41);
    const auto seqs = pack(random_docs(rng, 40, 20), opts(48));
    for (const auto& seq : seqs) {
        for (size_t i = 0; i < seq.tokens.size(); ++i) {
            for (size_t j = 0; j <= i; ++j) {
                const bool same_segment = seq.segment_ids[i] == seq.segment_ids[j];
                CHECK(mask_rule(seq, i, j) == same_segment);
            }
        }
    }
}

TEST_CASE("oversized documents are rejected when a cap is set") {
    PackOptions o = opts(16);
    o.max_doc_tokens = 10;
    Packer packer(o, [](const PackedSequence&) {});
    CHECK_THROWS_AS(packer.add_document(std::vector<uint32_t>(11, 1)), Error);
}

TEST_CASE("packed shard files round trip with checksums") {
    testutil::TempDir tmp;
    std::mt19937_64 rng(53);
    const auto docs = random_docs(rng, 50, 40);
    const auto seqs = pack(docs, opts(64));

    const auto path = tmp / "pack.cfts";
    PackedShardWriter writer(path, 64);
    for (const auto& seq : seqs) writer.add(seq);
    CHECK(writer.finish() == seqs.size());

    const PackedShard shard = read_packed_shard(path);
    CHECK(shard.seq_len == 64);
    REQUIRE(shard.sequences.size() == seqs.size());
    for (size_t i = 0; i < seqs.size(); ++i) {
        CHECK(shard.sequences[i].tokens == seqs[i].tokens);
        CHECK(shard.sequences[i].segment_ids == seqs[i].segment_ids);
    }

    // corrupting one byte breaks the checksum
    auto bytes = corpusforge::read_text_file(path);
    bytes[20] = static_cast<char>(bytes[20] ^ 0x1);
    corpusforge::write_text_file(tmp / "bad.cfts", bytes);
    CHECK_THROWS_AS(read_packed_shard(tmp / "bad.cfts"), Error);
}

TEST_CASE("token doc shards round trip") {
    testutil::TempDir tmp;
    TokenShard shard;
    shard.source = "web";
    shard.docs.push_back({"d0", {1, 2, 3}});
    shard.docs.push_back({"d1", {}});
    shard.docs.push_back({"d2", {99, 100000, 4294967295u}});
    write_token_shard(shard, tmp / "web.cftd");
    const TokenShard loaded = read_token_shard(tmp / "web.cftd");
    CHECK(loaded.source == "web");
    REQUIRE(loaded.docs.size() == 3);
    CHECK(loaded.docs[0].id == "d0");
    CHECK(loaded.docs[1].tokens.empty());
    CHECK(loaded.docs[2].tokens == std::vector<uint32_t>{99, 100000, 4294967295u});
    CHECK(loaded.total_tokens() == 6);
}
