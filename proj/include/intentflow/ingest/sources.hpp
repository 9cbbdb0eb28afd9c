#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "intentflow/core/types.hpp"
#include "intentflow/gateway/gateway.hpp"
#include "intentflow/ingest/imageops.hpp"

namespace intentflow::ingest {

enum class SourceLayout { mind2web, androidcontrol };

SourceLayout parse_source_layout(std::string_view name);
std::string_view to_string(SourceLayout layout) noexcept;

struct IngestOptions {
    SourceLayout layout = SourceLayout::mind2web;
    std::filesystem::path source_dir;
    // Screenshots are written under <out_dir>/screenshots/<id>/ and
    // referenced relative to out_dir.
    std::filesystem::path out_dir;
    std::uint64_t seed = 0;
    // Label cleaner for the android layout; labels are only restructured
    // when absent.
    gateway::Gateway* cleaner = nullptr;
    std::size_t parallelism = 1;
    int crop_width = 1280;
    int crop_height = 768;
};

struct IngestDiagnostic {
    std::string episode;  // episode directory name
    std::string message;
    bool fatal = true;    // the episode was skipped
};

struct IngestResult {
    std::vector<Trajectory> trajectories;  // sorted by episode directory
    std::vector<IngestDiagnostic> diagnostics;
    std::vector<CallRecord> calls;

    [[nodiscard]] std::size_t skipped() const;
};

/// Reads every `<source_dir>/<episode>/episode.json`, preprocesses the
/// screenshots, resolves action targets, restructures (and for android,
/// cleans) the goal label, validates the result, and writes the PNGs.
/// Episodes with missing or undecodable screenshots or invalid records are
/// skipped with a diagnostic.
IngestResult ingest_source(const IngestOptions& options);

/// File-system-safe form of an episode id used for the screenshot directory.
std::string safe_component(std::string_view id);

}  // namespace intentflow::ingest
