#pragma once

#include <cstdint>
#include <functional>
#include <string>

#include "intentflow/core/serialize.hpp"
#include "intentflow/core/types.hpp"
#include "intentflow/eval/facts.hpp"

namespace intentflow::eval {

/// Where facts are lost or introduced along the two-stage pipeline.
struct FunnelReport {
    // Recall side: fate of each gold fact.
    std::int64_t gold_total = 0;
    std::int64_t summarization_miss = 0;
    std::int64_t intent_extraction_miss = 0;
    std::int64_t survived = 0;
    // Precision side: origin of each predicted fact.
    std::int64_t predicted_total = 0;
    std::int64_t intent_extraction_hallucinated = 0;
    std::int64_t summarization_introduced = 0;
    std::int64_t correct = 0;

    [[nodiscard]] bool partition_holds() const noexcept;
    FunnelReport& operator+=(const FunnelReport& other) noexcept;

    friend bool operator==(const FunnelReport&, const FunnelReport&) = default;
};

using SupportFn = std::function<bool(const std::string& fact, const FactSet& against)>;

/// Classifies facts given the three fact sets.
///
/// Gold fact: not supported by the summary pool -> summarization_miss; else
/// not supported by the prediction -> intent_extraction_miss; else survived.
/// Predicted fact: not supported by the pool -> intent_extraction_hallucinated;
/// else not supported by the gold -> summarization_introduced; else correct.
FunnelReport funnel_partition(const FactSet& gold, const FactSet& pool, const FactSet& predicted,
                              const SupportFn& supported);

/// Funnel for one decomposed-run trace. The summary pool is decomposed from
/// the stripped summaries. Throws UnsupportedMethodError for traces without
/// summaries (CoT, E2E).
FunnelReport funnel(const PipelineTrace& trace, const FactSet& gold, FactJudge& judge);

/// Two-sided text rendering with counts and percentages.
std::string render_funnel(const FunnelReport& report);
json funnel_to_json(const FunnelReport& report);

}  // namespace intentflow::eval
