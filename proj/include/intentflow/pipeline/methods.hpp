#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "intentflow/core/types.hpp"
#include "intentflow/gateway/gateway.hpp"
#include "intentflow/pipeline/frames.hpp"

namespace intentflow::pipeline {

/// Backends for the two stages. For single-call methods only `stage1` is used.
struct Stages {
    gateway::Gateway& stage1;
    gateway::Gateway& stage2;
};

struct CallContext {
    std::string trajectory_id;
    gateway::CallRecorder* recorder = nullptr;
    bool end_of_session = false;
};

struct SummaryOutcome {
    InteractionSummary summary;
    std::vector<std::string> warnings;
};

/// Stage 1 for one interaction. With `use_context_window` the neighbouring
/// screenshots and actions are included; otherwise only the current step is
/// sent. Structured output that fails to parse is requested once more; a
/// second failure keeps the raw text as a single user action and sets
/// parse_fallback.
SummaryOutcome summarize_interaction(const ContextWindow& window, const AblationConfig& cfg,
                                     gateway::Gateway& backend, const CallContext& ctx);

/// The final step handed directly to stage 2 in the latency-optimized variant.
struct FinalFrame {
    Interaction step;
};

/// Stage 2: one call over all (already stripped) summaries. Throws
/// InvalidArgument if any summary still carries speculative content.
IntentStatement fuse_intent(const std::vector<InteractionSummary>& summaries, gateway::Gateway& backend,
                            const std::optional<FinalFrame>& final_frame, const AblationConfig& cfg,
                            const CallContext& ctx);

/// The stage-2 request variables, shared with the fine-tuning export.
gateway::Variables fusion_variables(const std::vector<InteractionSummary>& summaries,
                                    const std::optional<FinalFrame>& final_frame, bool structured);

/// Stage 1 for the first `count` steps of an already frame-dropped
/// trajectory, concurrently up to the gateway's in-flight cap. Summaries,
/// call records and warnings are appended to `trace` in step order. On
/// failure `trace.error` names the lowest failing step and false is returned.
/// `last_is_end_of_session` marks the summary of the final step.
bool summarize_steps(const Trajectory& dropped, std::size_t count, const AblationConfig& cfg,
                     gateway::Gateway& backend, bool last_is_end_of_session, PipelineTrace& trace);

// Each run_* applies frame dropping with a per-trajectory seed derived from
// `seed`, and never throws on backend failures: the returned trace carries
// `error` and whatever was completed before the failure.
PipelineTrace run_cot(const Trajectory& t, const AblationConfig& cfg, gateway::Gateway& backend,
                      std::uint64_t seed);
PipelineTrace run_e2e(const Trajectory& t, const AblationConfig& cfg, gateway::Gateway& backend,
                      std::uint64_t seed);
PipelineTrace run_decomposed(const Trajectory& t, const AblationConfig& cfg, Stages stages,
                             std::uint64_t seed);
PipelineTrace run_decomposed_latency_opt(const Trajectory& t, const AblationConfig& cfg, Stages stages,
                                         std::uint64_t seed);

PipelineTrace run_method(Method method, const Trajectory& t, const AblationConfig& cfg, Stages stages,
                         std::uint64_t seed);

/// The seed drop_frames receives for trajectory `t` under run seed `seed`.
std::uint64_t frame_seed(std::uint64_t seed, const std::string& trajectory_id);

}  // namespace intentflow::pipeline
