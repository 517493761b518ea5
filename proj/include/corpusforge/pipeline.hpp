#pragma once

#include <json.hpp>

#include <filesystem>
#include <string>
#include <vector>

namespace corpusforge {

inline constexpr const char* kToolVersion = "0.1.0";

struct StageSpec {
    std::string name;
    std::string kind;
    uint64_t seed = 0;
    nlohmann::json config;  // resolved, with workspace-relative paths expanded
};

struct PipelineConfig {
    std::filesystem::path workspace;
    std::vector<StageSpec> stages;
    uint64_t config_hash = 0;  // covers the pipeline file and referenced configs
};

// Loads a pipeline file. Stage entries carry their config inline or via
// "config_file"; relative paths in input/output keys resolve against the
// workspace. Every stage must have an explicit seed.
PipelineConfig load_pipeline(const std::filesystem::path& path,
                             const std::filesystem::path& workspace_override = {});

struct StageOutcome {
    std::string name;
    std::string kind;
    bool executed = false;  // false = memoized skip
    nlohmann::json summary;
};

struct RunReport {
    std::vector<StageOutcome> stages;
    uint64_t executed = 0;
    uint64_t skipped = 0;
};

// Executes stages in order. A stage whose fingerprint (tool version, config,
// input contents) matches its manifest and whose outputs are intact is
// skipped. Outputs are written to a staging area and moved into place only
// on success, so a failed stage never leaves partial outputs in output
// position. Throws Error(Stage) naming the failing stage.
RunReport run_pipeline(const PipelineConfig& config, unsigned jobs = 0);

// Tool version, config hash, and per-stage seeds; embedded in manifests.
nlohmann::json version_stamp(const PipelineConfig& config);

}  // namespace corpusforge
