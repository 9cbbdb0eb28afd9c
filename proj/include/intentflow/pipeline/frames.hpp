#pragma once

#include <cstdint>
#include <optional>

#include "intentflow/core/types.hpp"

namespace intentflow::pipeline {

/// Caps a trajectory at `max_steps` by removing uniformly random steps.
/// Kept steps stay in their original order, are re-indexed 1..max_steps,
/// and carry their source position in `original_index`. Trajectories at or
/// under the cap are returned unchanged.
Trajectory drop_frames(const Trajectory& t, int max_steps, std::uint64_t seed);

struct ContextWindow {
    std::optional<Interaction> previous;
    Interaction current;
    std::optional<Interaction> next;
    int step_count = 1;
};

/// Window around step `i` (1-based). Throws InvalidArgument when out of range.
ContextWindow build_context_window(const Trajectory& t, int i);

}  // namespace intentflow::pipeline
