#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "intentflow/core/types.hpp"
#include "intentflow/gateway/gateway.hpp"
#include "intentflow/pipeline/methods.hpp"

namespace intentflow::pipeline {

struct RefineOutcome {
    std::string target;
    bool refined = false;  // target differs from the gold text
    bool flagged = false;  // empty refinement; gold text kept
};

/// Asks the backend to drop details from `gold` that the summaries do not
/// support. Only the intent text is refined; the platform identifier is
/// re-attached unchanged.
RefineOutcome refine_label(const IntentStatement& gold, const std::vector<InteractionSummary>& summaries,
                           gateway::Gateway& backend, bool structured, const CallContext& ctx);

/// "prefix; text", or just the text when there is no platform identifier.
std::string label_string(const IntentStatement& s);

struct FinetuneExample {
    std::string trajectory_id;
    std::vector<InteractionSummary> input_summaries;  // speculative fields empty
    std::string input;                                // rendered stage-2 prompt
    std::string original_target;
    std::string target_intent;
    bool target_was_refined = false;
    bool refine_flagged = false;
};

struct FinetuneSkip {
    std::string trajectory_id;
    std::string reason;
};

struct FinetuneBuild {
    std::vector<FinetuneExample> examples;  // input order
    std::vector<FinetuneSkip> skips;
    std::vector<std::string> warnings;
    std::vector<CallRecord> calls;

    [[nodiscard]] std::size_t refined_count() const;
};

struct FinetuneBackends {
    gateway::Gateway& stage1;
    gateway::Gateway* refine = nullptr;  // required when cfg.refine_labels
};

/// One example per trajectory: stage-1 summaries (frame-dropped with the same
/// per-trajectory seed as the run commands), the stage-2 prompt they render
/// to, and the target (refined when cfg.refine_labels). Trajectories whose
/// calls fail are skipped and reported.
FinetuneBuild build_finetune_dataset(const std::vector<Trajectory>& trajectories, const AblationConfig& cfg,
                                     FinetuneBackends backends, std::uint64_t seed, std::size_t parallelism);

/// Writes {"input", "target"} lines to `file` and the before/after record
/// for each example to `<file>.meta.jsonl`.
void write_finetune_jsonl(const std::filesystem::path& file, const std::vector<FinetuneExample>& examples);

std::filesystem::path finetune_meta_path(const std::filesystem::path& file);

}  // namespace intentflow::pipeline
