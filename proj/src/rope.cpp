#include "corpusforge/rope.hpp"

#include <json.hpp>

#include <cmath>
#include <fstream>
#include <random>

#include "corpusforge/error.hpp"
#include "corpusforge/hash.hpp"

namespace corpusforge {

void validate(const RopeConfig& cfg) {
    if (cfg.head_dim <= 0 || cfg.head_dim % 2 != 0)
        fail_data("head_dim must be positive and even, got " + std::to_string(cfg.head_dim));
    if (!(cfg.base > 1.0)) fail_data("rope base must be > 1");
}

double pair_frequency(const RopeConfig& cfg, int pair_index) {
    validate(cfg);
    if (pair_index < 0 || pair_index >= cfg.head_dim / 2)
        fail_data("rope pair index out of range");
    return std::pow(cfg.base, -2.0 * pair_index / cfg.head_dim);
}

namespace {

// Angles grow with position (up to ~1M * freq); reduce and evaluate in long
// double so the 1e-9 shift-invariance budget holds at million-token range.
void rotation(long double angle, double& c, double& s) {
    constexpr long double two_pi = 6.283185307179586476925286766559L;
    angle = std::fmod(angle, two_pi);
    c = static_cast<double>(std::cos(angle));
    s = static_cast<double>(std::sin(angle));
}

}  // namespace

std::vector<double> rope_rotate(std::span<const double> v, uint64_t pos, const RopeConfig& cfg) {
    validate(cfg);
    if (v.size() != static_cast<size_t>(cfg.head_dim))
        fail_data("rope_rotate expects a vector of head_dim = " + std::to_string(cfg.head_dim) +
                  ", got " + std::to_string(v.size()));
    std::vector<double> out(v.size());
    for (int i = 0; i < cfg.head_dim / 2; ++i) {
        const long double freq =
            std::pow(static_cast<long double>(cfg.base),
                     static_cast<long double>(-2.0L * i / cfg.head_dim));
        double c, s;
        rotation(static_cast<long double>(pos) * freq, c, s);
        const double x = v[2 * i];
        const double y = v[2 * i + 1];
        out[2 * i] = x * c - y * s;
        out[2 * i + 1] = x * s + y * c;
    }
    return out;
}

double rope_dot(std::span<const double> q, uint64_t m, std::span<const double> k, uint64_t n,
                const RopeConfig& cfg) {
    if (q.size() != k.size()) fail_data("rope_dot dimension mismatch");
    const std::vector<double> qr = rope_rotate(q, m, cfg);
    const std::vector<double> kr = rope_rotate(k, n, cfg);
    double dot = 0.0;
    for (size_t i = 0; i < qr.size(); ++i) dot += qr[i] * kr[i];
    return dot;
}

double abf_base(const RopeConfig& cfg, uint64_t target_len, uint64_t orig_len) {
    validate(cfg);
    if (orig_len == 0) fail_data("original context length must be positive");
    if (target_len < orig_len)
        fail_data("target context " + std::to_string(target_len) +
                  " is shorter than original " + std::to_string(orig_len));
    return cfg.base * (static_cast<double>(target_len) / static_cast<double>(orig_len));
}

RopeValidationReport validate_rope(const RopeConfig& cfg, uint64_t samples, uint64_t seed) {
    validate(cfg);
    RopeValidationReport report;
    report.samples = samples;
    std::mt19937_64 rng(mix64(seed));
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    const uint64_t pos_range = cfg.max_pos > 0 ? cfg.max_pos : 4096;

    std::vector<double> q(cfg.head_dim), k(cfg.head_dim);
    for (uint64_t trial = 0; trial < samples; ++trial) {
        for (auto& x : q) x = unit(rng);
        for (auto& x : k) x = unit(rng);
        const uint64_t m = rng() % pos_range;
        const uint64_t n = rng() % pos_range;
        const uint64_t delta = rng() % pos_range;

        const double base_dot = rope_dot(q, m, k, n, cfg);
        const double shifted = rope_dot(q, m + delta, k, n + delta, cfg);
        report.max_shift_deviation =
            std::max(report.max_shift_deviation, std::abs(base_dot - shifted));

        double norm2 = 0.0;
        for (double x : q) norm2 += x * x;
        const auto rotated = rope_rotate(q, m, cfg);
        double rot_norm2 = 0.0;
        for (double x : rotated) rot_norm2 += x * x;
        report.max_norm_deviation = std::max(
            report.max_norm_deviation, std::abs(std::sqrt(norm2) - std::sqrt(rot_norm2)));
    }
    report.pass = report.max_shift_deviation <= 1e-9 && report.max_norm_deviation <= 1e-12;
    return report;
}

void save_rope_report(const RopeValidationReport& report, const RopeConfig& cfg,
                      const std::filesystem::path& path) {
    nlohmann::json doc{{"head_dim", cfg.head_dim},
                       {"base", cfg.base},
                       {"max_pos", cfg.max_pos},
                       {"samples", report.samples},
                       {"max_shift_deviation", report.max_shift_deviation},
                       {"max_norm_deviation", report.max_norm_deviation},
                       {"pass", report.pass}};
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) fail_data("cannot write rope report: " + path.string());
    out << doc.dump(2) << "\n";
}

}  // namespace corpusforge
