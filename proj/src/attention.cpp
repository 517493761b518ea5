#include "corpusforge/attention.hpp"

#include <cmath>

#include "corpusforge/error.hpp"
#include "corpusforge/hash.hpp"

namespace corpusforge {

namespace {

// Uniform in [-1, 1) from a hash chain; keeps the probe reproducible without
// dragging a generator through the per-element loops.
double probe_value(uint64_t seed, uint64_t pos, uint64_t token, uint64_t dim, uint64_t which) {
    uint64_t h = mix64(seed);
    h = mix64(h ^ mix64(pos));
    h = mix64(h ^ mix64(token));
    h = mix64(h ^ mix64(dim * 2 + which));
    return static_cast<double>(h >> 11) * (2.0 / 9007199254740992.0) - 1.0;
}

}  // namespace

AttentionMatrix tiny_attention_forward(const PackedSequence& seq, const RopeConfig& cfg,
                                       uint64_t probe_seed, size_t cap) {
    validate(cfg);
    const size_t L = seq.tokens.size();
    if (L == 0) fail_data("cannot run attention over an empty sequence");
    if (L > cap)
        fail_data("sequence length " + std::to_string(L) + " exceeds the validator cap " +
                  std::to_string(cap));
    if (seq.segment_ids.size() != L) fail_data("sequence is missing segment ids");

    const int dim = cfg.head_dim;
    const int pairs = dim / 2;
    std::vector<long double> freq(pairs);
    for (int p = 0; p < pairs; ++p)
        freq[p] = std::pow(static_cast<long double>(cfg.base),
                           static_cast<long double>(-2.0L * p / dim));

    // Rotated Q and K for every position; scores then reduce to plain dots.
    std::vector<double> q(L * dim), k(L * dim);
    constexpr long double two_pi = 6.283185307179586476925286766559L;
    for (size_t i = 0; i < L; ++i) {
        for (int p = 0; p < pairs; ++p) {
            const long double angle = std::fmod(static_cast<long double>(i) * freq[p], two_pi);
            const double c = static_cast<double>(std::cos(angle));
            const double s = static_cast<double>(std::sin(angle));
            const double qx = probe_value(probe_seed, i, seq.tokens[i], 2 * p, 0);
            const double qy = probe_value(probe_seed, i, seq.tokens[i], 2 * p + 1, 0);
            const double kx = probe_value(probe_seed, i, seq.tokens[i], 2 * p, 1);
            const double ky = probe_value(probe_seed, i, seq.tokens[i], 2 * p + 1, 1);
            q[i * dim + 2 * p] = qx * c - qy * s;
            q[i * dim + 2 * p + 1] = qx * s + qy * c;
            k[i * dim + 2 * p] = kx * c - ky * s;
            k[i * dim + 2 * p + 1] = kx * s + ky * c;
        }
    }

    AttentionMatrix out;
    out.length = L;
    out.weights.assign(L * L, 0.0);
    const double scale = 1.0 / std::sqrt(static_cast<double>(dim));
    std::vector<double> scores(L);
    for (size_t i = 0; i < L; ++i) {
        double max_score = 0.0;
        bool any = false;
        for (size_t j = 0; j <= i; ++j) {
            if (seq.segment_ids[j] != seq.segment_ids[i]) continue;
            double dot = 0.0;
            for (int d = 0; d < dim; ++d) dot += q[i * dim + d] * k[j * dim + d];
            scores[j] = dot * scale;
            if (!any || scores[j] > max_score) max_score = scores[j];
            any = true;
        }
        // j == i is always visible, so the row is never empty.
        double denom = 0.0;
        for (size_t j = 0; j <= i; ++j) {
            if (seq.segment_ids[j] != seq.segment_ids[i]) continue;
            scores[j] = std::exp(scores[j] - max_score);
            denom += scores[j];
        }
        for (size_t j = 0; j <= i; ++j) {
            if (seq.segment_ids[j] != seq.segment_ids[i]) continue;
            out.weights[i * L + j] = scores[j] / denom;
        }
    }
    return out;
}

}  // namespace corpusforge
