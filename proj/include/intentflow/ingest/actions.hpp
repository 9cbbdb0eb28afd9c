#pragma once

#include <string>

#include "intentflow/core/types.hpp"

namespace intentflow::ingest {

/// Renders an action the way prompts show it:
///   "[Adirondack] click", "[Menu] hover", "type 'pizza' into [Search]", "scroll".
/// The result never contains line breaks.
std::string format_action_string(const ActionRecord& a);

}  // namespace intentflow::ingest
