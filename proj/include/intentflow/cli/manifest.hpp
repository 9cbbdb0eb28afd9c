#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "intentflow/core/serialize.hpp"

namespace intentflow::cli {

struct ManifestInput {
    std::string path;
    std::string sha256;  // empty for directories
};

/// Provenance record written next to every command's outputs.
struct RunManifest {
    std::string command;
    std::vector<std::string> argv;
    json config;  // every setting that affects results
    std::uint64_t seed = 0;
    std::vector<ManifestInput> inputs;
    std::string output;
    std::string started_at;
    std::string finished_at;
    std::string version = INTENTFLOW_VERSION;

    /// sha256 over the canonical dump of {command, config, seed, inputs}.
    [[nodiscard]] std::string config_digest() const;
};

json to_json(const RunManifest& m);

/// Writes `<dir>/manifest.json`.
void write_manifest(const std::filesystem::path& dir, const RunManifest& m);

/// UTC ISO-8601 time; SOURCE_DATE_EPOCH, when set, pins it for reproducible outputs.
std::string utc_timestamp();

/// Input entry with the file's content digest (directories get no digest).
ManifestInput describe_input(const std::filesystem::path& p);

}  // namespace intentflow::cli
