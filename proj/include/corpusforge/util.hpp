#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <string>
#include <vector>

namespace corpusforge {

// Index-chunked parallel loop; results must be written to disjoint slots so
// the merge stays deterministic. jobs <= 1 runs inline.
void parallel_for(size_t count, unsigned jobs, const std::function<void(size_t)>& fn);

unsigned default_jobs();

// FNV-1a64 of a file's contents. Throws Error(Data) if unreadable.
uint64_t hash_file(const std::filesystem::path& path);

// Hash of a directory tree: file paths (relative, sorted) and contents.
uint64_t hash_tree(const std::filesystem::path& path);

std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, const std::string& text);

}  // namespace corpusforge
