#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "intentflow/core/types.hpp"

namespace intentflow {

using json = nlohmann::ordered_json;

void to_json(json& j, const Rect& r);
void from_json(const json& j, Rect& r);
void to_json(json& j, const ActionRecord& a);
void from_json(const json& j, ActionRecord& a);
void to_json(json& j, const ImageRef& r);
void from_json(const json& j, ImageRef& r);
void to_json(json& j, const Interaction& i);
void from_json(const json& j, Interaction& i);
void to_json(json& j, const IntentStatement& s);
void from_json(const json& j, IntentStatement& s);
void to_json(json& j, const Trajectory& t);
void from_json(const json& j, Trajectory& t);
void to_json(json& j, const InteractionSummary& s);
void from_json(const json& j, InteractionSummary& s);
void to_json(json& j, const AblationConfig& c);
void from_json(const json& j, AblationConfig& c);
void to_json(json& j, const CallRecord& c);
void from_json(const json& j, CallRecord& c);
void to_json(json& j, const PipelineTrace& t);
void from_json(const json& j, PipelineTrace& t);

/// One trajectory per line, keys in a fixed order so output is byte-stable.
std::string to_jsonl_line(const Trajectory& t);
Trajectory trajectory_from_jsonl_line(std::string_view line);

struct DatasetLoadResult {
    std::vector<Trajectory> trajectories;
    std::vector<std::string> errors;  // "line N: message"
};

/// Reads a trajectory JSONL file. Malformed lines are reported, not thrown.
DatasetLoadResult read_trajectory_jsonl(const std::filesystem::path& file);
void write_trajectory_jsonl(const std::filesystem::path& file,
                            const std::vector<Trajectory>& trajectories);

std::string trace_to_string(const PipelineTrace& trace);
PipelineTrace trace_from_string(std::string_view text);

std::string read_file(const std::filesystem::path& file);
void write_file(const std::filesystem::path& file, std::string_view contents);

}  // namespace intentflow
