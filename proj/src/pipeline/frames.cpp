#include "intentflow/pipeline/frames.hpp"

#include <algorithm>
#include <numeric>
#include <vector>

#include "intentflow/core/digest.hpp"
#include "intentflow/core/error.hpp"

namespace intentflow::pipeline {

Trajectory drop_frames(const Trajectory& t, int max_steps, std::uint64_t seed) {
    if (max_steps < 1) throw InvalidArgument("max_steps must be >= 1");
    const auto n = t.steps.size();
    const auto keep = static_cast<std::size_t>(max_steps);
    if (n <= keep) return t;

    // Partial Fisher-Yates: the first `keep` slots become a uniform sample.
    std::vector<std::size_t> positions(n);
    std::iota(positions.begin(), positions.end(), std::size_t{0});
    Rng rng(seed);
    for (std::size_t i = 0; i < keep; ++i) {
        const auto j = i + static_cast<std::size_t>(rng.below(n - i));
        std::swap(positions[i], positions[j]);
    }
    positions.resize(keep);
    std::sort(positions.begin(), positions.end());

    Trajectory out = t;
    out.steps.clear();
    for (std::size_t k = 0; k < keep; ++k) {
        Interaction step = t.steps[positions[k]];
        step.original_index = step.original_index.value_or(step.index);
        step.index = static_cast<int>(k + 1);
        out.steps.push_back(std::move(step));
    }
    return out;
}

ContextWindow build_context_window(const Trajectory& t, int i) {
    const int n = static_cast<int>(t.steps.size());
    if (i < 1 || i > n) {
        throw InvalidArgument("step " + std::to_string(i) + " out of range 1.." + std::to_string(n));
    }
    ContextWindow w;
    w.current = t.steps[static_cast<std::size_t>(i - 1)];
    if (i > 1) w.previous = t.steps[static_cast<std::size_t>(i - 2)];
    if (i < n) w.next = t.steps[static_cast<std::size_t>(i)];
    w.step_count = n;
    return w;
}

}  // namespace intentflow::pipeline
