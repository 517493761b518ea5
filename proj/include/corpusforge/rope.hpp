#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

namespace corpusforge {

// Rotary embedding geometry. Pair i rotates at angular frequency
// base^(-2i/head_dim); head_dim 64 matches hidden 2048 over 32 heads.
struct RopeConfig {
    int head_dim = 64;
    double base = 10000.0;
    uint64_t max_pos = 4096;
};

void validate(const RopeConfig& cfg);

double pair_frequency(const RopeConfig& cfg, int pair_index);

// Rotates each consecutive pair (v[2i], v[2i+1]) by pos * freq_i.
// Norm-preserving. Throws Error(Data) on a dimension mismatch.
std::vector<double> rope_rotate(std::span<const double> v, uint64_t pos, const RopeConfig& cfg);

// <rotate(q, m), rotate(k, n)>; a function of m - n only.
double rope_dot(std::span<const double> q, uint64_t m, std::span<const double> k, uint64_t n,
                const RopeConfig& cfg);

// Adjusted base frequency for a context extension: base * target / orig.
// Throws Error(Data) when target < orig.
double abf_base(const RopeConfig& cfg, uint64_t target_len, uint64_t orig_len);

struct RopeValidationReport {
    uint64_t samples = 0;
    double max_shift_deviation = 0.0;  // |rope_dot(m,n) - rope_dot(m+d,n+d)|
    double max_norm_deviation = 0.0;   // | ||rotate(v)|| - ||v|| |
    bool pass = false;
};

// Randomized sweep over (q, k, m, n, delta) tuples with positions up to
// max_pos; pass thresholds are 1e-9 for shift invariance and 1e-12 for norm
// preservation.
RopeValidationReport validate_rope(const RopeConfig& cfg, uint64_t samples, uint64_t seed);

void save_rope_report(const RopeValidationReport& report, const RopeConfig& cfg,
                      const std::filesystem::path& path);

}  // namespace corpusforge
