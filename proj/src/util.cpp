#include "corpusforge/util.hpp"

#include <algorithm>
#include <atomic>
#include <fstream>
#include <mutex>
#include <sstream>
#include <thread>

#include "corpusforge/error.hpp"
#include "corpusforge/hash.hpp"

namespace corpusforge {

unsigned default_jobs() {
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : hw;
}

void parallel_for(size_t count, unsigned jobs, const std::function<void(size_t)>& fn) {
    if (count == 0) return;
    if (jobs == 0) jobs = default_jobs();
    jobs = static_cast<unsigned>(std::min<size_t>(jobs, count));
    if (jobs <= 1) {
        for (size_t i = 0; i < count; ++i) fn(i);
        return;
    }
    std::atomic<size_t> next{0};
    std::vector<std::thread> workers;
    workers.reserve(jobs);
    std::atomic<bool> failed{false};
    std::string first_error;
    std::mutex error_mutex;
    for (unsigned w = 0; w < jobs; ++w) {
        workers.emplace_back([&] {
            while (!failed.load(std::memory_order_relaxed)) {
                const size_t i = next.fetch_add(1);
                if (i >= count) break;
                try {
                    fn(i);
                } catch (const std::exception& e) {
                    std::lock_guard<std::mutex> lock(error_mutex);
                    if (!failed.exchange(true)) first_error = e.what();
                }
            }
        });
    }
    for (auto& worker : workers) worker.join();
    if (failed) fail_stage("parallel task failed: " + first_error);
}

uint64_t hash_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail_data("cannot open file for hashing: " + path.string());
    Fnv1a hash;
    char buffer[1 << 16];
    while (in.read(buffer, sizeof(buffer)) || in.gcount() > 0)
        hash.update(buffer, static_cast<size_t>(in.gcount()));
    return hash.digest();
}

uint64_t hash_tree(const std::filesystem::path& path) {
    if (std::filesystem::is_regular_file(path)) return hash_file(path);
    if (!std::filesystem::is_directory(path))
        fail_data("cannot hash missing path: " + path.string());
    std::vector<std::filesystem::path> files;
    for (const auto& entry : std::filesystem::recursive_directory_iterator(path))
        if (entry.is_regular_file()) files.push_back(entry.path());
    std::sort(files.begin(), files.end());
    Fnv1a hash;
    for (const auto& file : files) {
        const std::string rel = std::filesystem::relative(file, path).string();
        hash.update(rel);
        const uint64_t h = hash_file(file);
        hash.update(&h, sizeof(h));
    }
    return hash.digest();
}

std::string read_text_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail_data("cannot open file: " + path.string());
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) fail_data("cannot write file: " + path.string());
    out << text;
}

}  // namespace corpusforge
