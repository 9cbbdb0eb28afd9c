#pragma once

#include <optional>
#include <string>
#include <string_view>

#include "intentflow/core/types.hpp"
#include "intentflow/gateway/gateway.hpp"

namespace intentflow::ingest {

/// Separates the platform identifier from a goal label: every occurrence of
/// `app` (case-insensitive, whole words), together with a directly preceding
/// preposition such as "on" or "from", is removed from the text and `app`
/// becomes the prefix. Without an app name the label is only trimmed.
/// Throws InvalidArgument if nothing of the intent remains.
IntentStatement restructure_label(std::string_view label, const std::optional<std::string>& app);

/// Rewrites a noisy goal label through the clean_label template. The reply is
/// trimmed; an empty reply throws InvalidArgument. Backend failures propagate
/// with the trajectory id in the message.
std::string clean_label(const std::string& raw, gateway::Gateway& backend, const std::string& trajectory_id,
                        gateway::CallRecorder* recorder = nullptr);

}  // namespace intentflow::ingest
