#pragma once

#include <cstdint>
#include <string_view>

namespace corpusforge {

// splitmix64 finalizer. All seeded hashing in the toolkit derives from this
// so results are identical across platforms and runs.
constexpr uint64_t mix64(uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// FNV-1a over raw bytes. Used for shingle hashing and file checksums.
constexpr uint64_t fnv1a64(std::string_view bytes, uint64_t h = 0xcbf29ce484222325ULL) {
    for (char c : bytes) {
        h ^= static_cast<unsigned char>(c);
        h *= 0x100000001b3ULL;
    }
    return h;
}

constexpr uint64_t fnv1a64_u64(uint64_t v, uint64_t h = 0xcbf29ce484222325ULL) {
    for (int i = 0; i < 8; ++i) {
        h ^= (v >> (8 * i)) & 0xff;
        h *= 0x100000001b3ULL;
    }
    return h;
}

// Independent sub-seed for stream `index` of a master seed.
constexpr uint64_t substream_seed(uint64_t seed, uint64_t index) {
    return mix64(seed ^ mix64(index + 0x51e03daf3899a525ULL));
}

// Incremental FNV-1a accumulator, for checksumming streamed writes.
class Fnv1a {
public:
    void update(std::string_view bytes) { h_ = fnv1a64(bytes, h_); }
    void update(const void* data, size_t n) {
        update(std::string_view(static_cast<const char*>(data), n));
    }
    uint64_t digest() const { return h_; }

private:
    uint64_t h_ = 0xcbf29ce484222325ULL;
};

}  // namespace corpusforge
