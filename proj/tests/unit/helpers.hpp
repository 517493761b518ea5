#pragma once

#include <algorithm>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "corpusforge/dedup.hpp"
#include "corpusforge/document.hpp"

namespace testutil {

// Scratch directory removed on destruction.
class TempDir {
public:
    TempDir() {
        const auto base = std::filesystem::temp_directory_path();
        std::random_device rd;
        for (int attempt = 0; attempt < 64; ++attempt) {
            auto candidate = base / ("corpusforge-test-" + std::to_string(rd()));
            if (std::filesystem::create_directory(candidate)) {
                path_ = candidate;
                return;
            }
        }
        throw std::runtime_error("cannot create temp dir");
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    const std::filesystem::path& path() const { return path_; }
    std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

private:
    std::filesystem::path path_;
};

inline corpusforge::Document make_doc(std::string id, std::string text,
                                      std::string source = "web", std::string lang = "en") {
    corpusforge::Document doc;
    doc.id = std::move(id);
    doc.source = std::move(source);
    doc.category = "test";
    doc.lang = std::move(lang);
    doc.text = std::move(text);
    return doc;
}

inline std::string random_word(std::mt19937_64& rng, int len = 6) {
    std::string word;
    for (int i = 0; i < len; ++i) word.push_back(static_cast<char>('a' + rng() % 26));
    return word;
}

inline std::string random_words(std::mt19937_64& rng, int count, int len = 6) {
    std::string text;
    for (int i = 0; i < count; ++i) {
        if (!text.empty()) text.push_back(' ');
        text += random_word(rng, len);
    }
    return text;
}

// Independent oracle: exact Jaccard over shingle hash sets.
inline double exact_jaccard(const corpusforge::ShingleSet& a, const corpusforge::ShingleSet& b) {
    if (a.hashes.empty() && b.hashes.empty()) return 1.0;
    std::vector<uint64_t> inter;
    std::set_intersection(a.hashes.begin(), a.hashes.end(), b.hashes.begin(), b.hashes.end(),
                          std::back_inserter(inter));
    const size_t uni = a.hashes.size() + b.hashes.size() - inter.size();
    return uni == 0 ? 1.0 : static_cast<double>(inter.size()) / static_cast<double>(uni);
}

}  // namespace testutil
