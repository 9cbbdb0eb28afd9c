#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "intentflow/core/types.hpp"

namespace intentflow {

struct ValidateOptions {
    // When set, path screenshots are resolved against this directory and
    // decoded. Inline screenshots are always decoded.
    std::optional<std::filesystem::path> image_root;
};

/// Checks every Trajectory/Interaction/ActionRecord/IntentStatement
/// invariant. Returns one human-readable line per violation; empty iff valid.
std::vector<std::string> validate_trajectory(const Trajectory& t, const ValidateOptions& options = {});

std::vector<std::string> validate_action(const ActionRecord& a);

/// Splits "app-name/website; intent" at the first "; ".
/// Throws InvalidArgument on an empty label.
IntentStatement split_platform_prefix(std::string_view label);

/// The text handed to evaluation: intent text with the platform identifier removed.
std::string evaluation_text(const IntentStatement& s);

}  // namespace intentflow
