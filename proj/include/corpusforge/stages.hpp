#pragma once

#include <json.hpp>

#include <string>
#include <vector>

namespace corpusforge::stages {

// One entry point per CLI subcommand; the pipeline runner calls the same
// functions so `corpusforge run` and individual invocations behave alike.
// Each takes a JSON config (the CLI builds it from flags) and returns a
// summary object for reports and stage manifests.
nlohmann::json run_stage(const std::string& kind, const nlohmann::json& config, unsigned jobs = 0);

// Config keys naming input files/dirs (string or array values) per kind.
std::vector<std::string> input_keys(const std::string& kind);
// Config keys naming output files/dirs per kind.
std::vector<std::string> output_keys(const std::string& kind);

bool known_kind(const std::string& kind);

}  // namespace corpusforge::stages
