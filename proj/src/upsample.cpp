#include "corpusforge/upsample.hpp"

#include <random>

#include "corpusforge/error.hpp"
#include "corpusforge/hash.hpp"

namespace corpusforge {

UpsampleWeights length_upsample_weights(std::span<const uint64_t> doc_token_lens,
                                        uint64_t min_long_len, double target_long_frac) {
    if (!(target_long_frac > 0.0) || !(target_long_frac < 1.0))
        fail_data("target long-token fraction must lie in (0,1)");
    uint64_t long_tokens = 0, short_tokens = 0, long_docs = 0, short_docs = 0;
    for (uint64_t len : doc_token_lens) {
        if (len >= min_long_len) {
            long_tokens += len;
            ++long_docs;
        } else {
            short_tokens += len;
            ++short_docs;
        }
    }
    if (long_docs == 0)
        fail_data("corpus has no documents of length >= " + std::to_string(min_long_len) +
                  "; synthesize long documents before upsampling");

    UpsampleWeights w;
    w.min_long_len = min_long_len;
    w.target_frac = target_long_frac;
    w.long_docs = long_docs;
    w.short_docs = short_docs;
    w.observed_frac = static_cast<double>(long_tokens) /
                      static_cast<double>(long_tokens + short_tokens);
    if (short_tokens == 0) {
        w.long_weight = 1.0;  // everything is long already
    } else {
        w.long_weight = (target_long_frac * static_cast<double>(short_tokens)) /
                        ((1.0 - target_long_frac) * static_cast<double>(long_tokens));
    }
    return w;
}

UpsampleRun sample_upsampled(std::span<const uint64_t> doc_token_lens,
                             const UpsampleWeights& weights, uint64_t token_budget,
                             uint64_t seed) {
    if (doc_token_lens.empty()) fail_data("cannot sample from an empty corpus");
    std::vector<uint32_t> long_idx, short_idx;
    for (uint32_t i = 0; i < doc_token_lens.size(); ++i) {
        (doc_token_lens[i] >= weights.min_long_len ? long_idx : short_idx).push_back(i);
    }

    // P(class = long) = w * n_long / (w * n_long + n_short); documents are
    // uniform within their class.
    const double long_mass = weights.long_weight * static_cast<double>(long_idx.size());
    const double total_mass = long_mass + static_cast<double>(short_idx.size());

    std::mt19937_64 rng(mix64(seed));
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    UpsampleRun run;
    while (run.total_tokens < token_budget) {
        const bool pick_long =
            short_idx.empty() || (!long_idx.empty() && unit(rng) * total_mass < long_mass);
        const auto& pool = pick_long ? long_idx : short_idx;
        const uint32_t doc = pool[rng() % pool.size()];
        run.order.push_back(doc);
        run.total_tokens += doc_token_lens[doc];
        if (pick_long) run.long_tokens += doc_token_lens[doc];
    }
    return run;
}

Document synthesize_long_doc(const std::vector<Document>& parts, uint64_t target_len,
                             const BpeModel& tokenizer) {
    if (parts.empty()) fail_data("cannot synthesize a long document from no parts");
    Document synth;
    synth.source = parts.front().source;
    synth.category = parts.front().category;
    synth.lang = parts.front().lang;

    std::string provenance;
    uint64_t tokens = 0;
    uint64_t estimate = 0;
    size_t used = 0;
    for (const auto& part : parts) {
        if (!synth.text.empty()) synth.text += "\n\n";
        synth.text += part.text;
        if (!provenance.empty()) provenance += ",";
        provenance += part.id;
        ++used;
        // Per-part counts estimate the total; merges across the separator can
        // only shrink it, so confirm with a full encode before stopping.
        estimate += tokenizer.encode(part.text).size() + 1;
        if (estimate >= target_len) {
            tokens = tokenizer.encode(synth.text).size();
            if (tokens >= target_len) break;
            estimate = tokens;
        }
    }
    if (tokens < target_len) tokens = tokenizer.encode(synth.text).size();
    if (tokens < target_len)
        fail_data("parts supply only " + std::to_string(tokens) + " tokens, need " +
                  std::to_string(target_len));
    synth.id = "synthetic:" + parts.front().id + "+" + std::to_string(used);
    synth.meta["synthesized_from"] = provenance;
    synth.meta["token_count"] = std::to_string(tokens);
    return synth;
}

}  // namespace corpusforge
