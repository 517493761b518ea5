#include "corpusforge/pipeline.hpp"

#include <cstdlib>
#include <set>

#include "corpusforge/error.hpp"
#include "corpusforge/hash.hpp"
#include "corpusforge/stages.hpp"
#include "corpusforge/util.hpp"

namespace corpusforge {

using nlohmann::json;

namespace {

std::filesystem::path resolve(const std::filesystem::path& workspace, const std::string& value) {
    const std::filesystem::path p(value);
    return p.is_absolute() ? p : workspace / p;
}

// Rewrites the path-valued keys of a stage config in place.
void map_paths(json& config, const std::vector<std::string>& keys,
               const std::function<std::string(const std::string&)>& fn) {
    for (const auto& key : keys) {
        if (!config.contains(key)) continue;
        auto& value = config[key];
        if (value.is_string()) {
            value = fn(value.get<std::string>());
        } else if (value.is_array()) {
            for (auto& item : value)
                if (item.is_string()) item = fn(item.get<std::string>());
        }
    }
}

uint64_t stage_fingerprint(const StageSpec& stage) {
    Fnv1a hash;
    hash.update(std::string(kToolVersion));
    hash.update(stage.kind);
    hash.update(stage.config.dump());
    std::vector<std::string> paths;
    for (const auto& key : stages::input_keys(stage.kind)) {
        if (!stage.config.contains(key)) continue;
        const auto& value = stage.config[key];
        if (value.is_string())
            paths.push_back(value.get<std::string>());
        else if (value.is_array())
            for (const auto& item : value) paths.push_back(item.get<std::string>());
    }
    // pack reads the token shards named inside its plan file; they are inputs
    // even though the config never lists them directly.
    if (stage.kind == "pack" && stage.config.contains("plan") &&
        std::filesystem::exists(stage.config["plan"].get<std::string>())) {
        try {
            const json plan =
                json::parse(read_text_file(stage.config["plan"].get<std::string>()));
            for (const auto& entry : plan.value("entries", json::array()))
                for (const auto& shard : entry.value("shards", json::array()))
                    paths.push_back(shard.get<std::string>());
        } catch (const json::exception&) {
            // a malformed plan fails properly inside the stage itself
        }
    }
    for (const auto& path : paths) {
        hash.update(path);
        if (!std::filesystem::exists(path))
            fail_data("stage '" + stage.name + "' input does not exist: " + path);
        const uint64_t h = hash_tree(path);
        hash.update(&h, sizeof(h));
    }
    return hash.digest();
}

json output_hashes(const StageSpec& stage) {
    json out = json::object();
    for (const auto& key : stages::output_keys(stage.kind)) {
        if (!stage.config.contains(key)) continue;
        const std::string path = stage.config[key].get<std::string>();
        if (!std::filesystem::exists(path)) continue;
        out[path] = hash_tree(path);
    }
    return out;
}

bool outputs_intact(const json& recorded) {
    for (const auto& [path, hash] : recorded.items()) {
        if (!std::filesystem::exists(path)) return false;
        if (hash_tree(path) != hash.get<uint64_t>()) return false;
    }
    return true;
}

}  // namespace

PipelineConfig load_pipeline(const std::filesystem::path& path,
                             const std::filesystem::path& workspace_override) {
    json doc;
    try {
        doc = json::parse(read_text_file(path));
    } catch (const json::exception& e) {
        fail_data("malformed pipeline config " + path.string() + ": " + e.what());
    }

    PipelineConfig config;
    if (!workspace_override.empty()) {
        config.workspace = workspace_override;
    } else if (doc.contains("workspace")) {
        config.workspace = doc["workspace"].get<std::string>();
    } else if (const char* env = std::getenv("CORPUSFORGE_WORKSPACE")) {
        config.workspace = env;
    } else {
        fail_usage("no workspace: set it in the pipeline file, pass --workspace, or export "
                   "CORPUSFORGE_WORKSPACE");
    }
    if (config.workspace.is_relative())
        config.workspace = std::filesystem::absolute(config.workspace);

    Fnv1a config_hash;
    config_hash.update(read_text_file(path));

    std::set<std::string> names;
    for (const auto& entry : doc.value("stages", json::array())) {
        StageSpec stage;
        stage.name = entry.value("name", "");
        stage.kind = entry.value("kind", "");
        if (stage.name.empty()) fail_data("pipeline stage without a name");
        if (!stages::known_kind(stage.kind))
            fail_data("stage '" + stage.name + "' has unknown kind '" + stage.kind + "'");
        if (!names.insert(stage.name).second)
            fail_data("duplicate stage name '" + stage.name + "'");
        if (!entry.contains("seed"))
            fail_data("stage '" + stage.name + "' is missing an explicit seed");
        stage.seed = entry["seed"].get<uint64_t>();

        stage.config = entry.value("config", json::object());
        if (entry.contains("config_file")) {
            const std::filesystem::path cfg_path =
                resolve(path.parent_path(), entry["config_file"].get<std::string>());
            const std::string text = read_text_file(cfg_path);
            config_hash.update(text);
            json file_config;
            try {
                file_config = json::parse(text);
            } catch (const json::exception& e) {
                fail_data("malformed stage config " + cfg_path.string() + ": " + e.what());
            }
            file_config.update(stage.config);  // inline keys win
            stage.config = file_config;
        }
        stage.config["seed"] = stage.seed;

        const auto resolver = [&](const std::string& value) {
            return resolve(config.workspace, value).string();
        };
        map_paths(stage.config, stages::input_keys(stage.kind), resolver);
        map_paths(stage.config, stages::output_keys(stage.kind), resolver);
        config.stages.push_back(std::move(stage));
    }
    config.config_hash = config_hash.digest();
    return config;
}

json version_stamp(const PipelineConfig& config) {
    json seeds = json::object();
    for (const auto& stage : config.stages) seeds[stage.name] = stage.seed;
    return json{{"tool", "corpusforge"},
                {"version", kToolVersion},
                {"config_hash", config.config_hash},
                {"seeds", seeds}};
}

RunReport run_pipeline(const PipelineConfig& config, unsigned jobs) {
    const std::filesystem::path manifests_dir = config.workspace / "manifests";
    const std::filesystem::path staging_root = config.workspace / ".staging";
    std::filesystem::create_directories(config.workspace);
    std::filesystem::create_directories(manifests_dir);

    RunReport report;
    const json stamp = version_stamp(config);

    for (const auto& stage : config.stages) {
        const std::filesystem::path manifest_path = manifests_dir / (stage.name + ".json");
        uint64_t fingerprint = 0;
        try {
            fingerprint = stage_fingerprint(stage);
        } catch (const Error& e) {
            throw Error(ErrorKind::Stage, "stage '" + stage.name + "': " + e.what());
        }

        if (std::filesystem::exists(manifest_path)) {
            try {
                const json manifest = json::parse(read_text_file(manifest_path));
                if (manifest.value("fingerprint", 0ull) == fingerprint &&
                    outputs_intact(manifest.value("outputs", json::object()))) {
                    report.stages.push_back(
                        {stage.name, stage.kind, false, manifest.value("result", json{})});
                    ++report.skipped;
                    continue;
                }
            } catch (const json::exception&) {
                // unreadable manifest: fall through and re-run the stage
            }
        }

        // Quarantine outputs: run against a staging area, then move into
        // final position only after the stage succeeds.
        const std::filesystem::path staging = staging_root / stage.name;
        std::filesystem::remove_all(staging);
        std::filesystem::create_directories(staging);

        StageSpec staged = stage;
        std::vector<std::pair<std::filesystem::path, std::filesystem::path>> moves;
        size_t output_index = 0;
        map_paths(staged.config, stages::output_keys(stage.kind),
                  [&](const std::string& final_path) {
                      const std::filesystem::path staged_path =
                          staging / std::to_string(output_index++) /
                          std::filesystem::path(final_path).filename();
                      moves.emplace_back(staged_path, final_path);
                      return staged_path.string();
                  });

        json result;
        try {
            result = stages::run_stage(stage.kind, staged.config, jobs);
        } catch (const Error& e) {
            std::filesystem::remove_all(staging);
            throw Error(ErrorKind::Stage, "stage '" + stage.name + "' failed: " + e.what());
        } catch (const std::exception& e) {
            std::filesystem::remove_all(staging);
            throw Error(ErrorKind::Stage, "stage '" + stage.name + "' failed: " + e.what());
        }

        for (const auto& [from, to] : moves) {
            if (!std::filesystem::exists(from)) continue;  // optional output not produced
            std::filesystem::create_directories(std::filesystem::path(to).parent_path());
            std::filesystem::remove_all(to);
            std::filesystem::rename(from, to);
        }
        std::filesystem::remove_all(staging);

        // Stage summaries may quote output paths; rewrite staged paths to
        // their final locations so manifests never reference the staging area.
        {
            std::string dumped = result.dump();
            for (const auto& [from, to] : moves) {
                const std::string needle = from.string();
                const std::string replacement = to.string();
                size_t at = 0;
                while ((at = dumped.find(needle, at)) != std::string::npos) {
                    dumped.replace(at, needle.size(), replacement);
                    at += replacement.size();
                }
            }
            result = json::parse(dumped);
        }

        json manifest{{"name", stage.name},
                      {"kind", stage.kind},
                      {"fingerprint", fingerprint},
                      {"stamp", stamp},
                      {"result", result},
                      {"outputs", output_hashes(stage)}};
        write_text_file(manifest_path, manifest.dump(2) + "\n");

        report.stages.push_back({stage.name, stage.kind, true, result});
        ++report.executed;
    }
    return report;
}

}  // namespace corpusforge
