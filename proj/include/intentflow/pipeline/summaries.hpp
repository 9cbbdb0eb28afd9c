#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "intentflow/core/types.hpp"

namespace intentflow::pipeline {

/// Parses stage-1 output of the form
///
///   SCREEN CONTEXT:
///   - ...
///   USER ACTION:
///   - ...
///   SPECULATIVE INTENT:
///   - ...
///
/// Headers are matched case-insensitively and may carry markdown emphasis;
/// "USER ACTIONS" is accepted. Returns nullopt unless both the screen-context
/// and user-action headers are present and at least one of them has an item.
std::optional<InteractionSummary> parse_structured_summary(std::string_view text, int step_index);

/// Summary with speculative_intent emptied; every other field unchanged.
InteractionSummary strip_speculative(InteractionSummary s);

/// Stage-2 input block: one "Interaction k:" section per summary. Structured
/// summaries list their screen context and user actions; free-form and
/// fallback summaries print their text. Speculative fields are never printed.
std::string render_summaries(const std::vector<InteractionSummary>& summaries, bool structured);

/// Text of a summary pool for fact decomposition: screen context and user
/// actions of every summary, one per line.
std::string summary_pool_text(const std::vector<InteractionSummary>& summaries);

/// Final answer of a reasoning-style reply: the text after the last line
/// starting with "Intent:" (case-insensitive). nullopt if there is none.
std::optional<std::string> extract_labeled_intent(std::string_view text);

}  // namespace intentflow::pipeline
