#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace intentflow {

/// Axis-aligned rectangle in pixel units. Origin is the top-left corner;
/// the rectangle covers [x, x + width) × [y, y + height).
struct Rect {
    std::int64_t x = 0;
    std::int64_t y = 0;
    std::int64_t width = 0;
    std::int64_t height = 0;

    [[nodiscard]] std::int64_t right() const noexcept { return x + width; }
    [[nodiscard]] std::int64_t bottom() const noexcept { return y + height; }
    [[nodiscard]] std::int64_t area() const noexcept { return width * height; }
    [[nodiscard]] bool empty() const noexcept { return width <= 0 || height <= 0; }
    [[nodiscard]] bool contains(std::int64_t px, std::int64_t py) const noexcept {
        return px >= x && py >= y && px < right() && py < bottom();
    }
    [[nodiscard]] bool contains(const Rect& other) const noexcept {
        return other.x >= x && other.y >= y && other.right() <= right() &&
               other.bottom() <= bottom();
    }

    friend bool operator==(const Rect&, const Rect&) = default;
};

[[nodiscard]] Rect intersection(const Rect& a, const Rect& b) noexcept;
[[nodiscard]] double intersection_over_union(const Rect& a, const Rect& b) noexcept;

enum class Platform { web, android };

enum class ActionKind { click, hover, type_text, scroll, navigate, other };

struct ActionRecord {
    ActionKind kind = ActionKind::other;
    std::string other_kind;  // set iff kind == other
    std::optional<std::string> element_name;
    std::optional<Rect> element_bbox;
    std::optional<std::string> typed_text;

    /// Canonical lower-case kind label; the preserved raw label for `other`.
    [[nodiscard]] std::string kind_name() const;

    friend bool operator==(const ActionRecord&, const ActionRecord&) = default;
};

/// Screenshot stored either as a path (relative to the dataset file) or as
/// inline PNG bytes.
struct ImageRef {
    std::string path;
    std::vector<std::uint8_t> png;

    [[nodiscard]] bool is_inline() const noexcept { return path.empty() && !png.empty(); }
    [[nodiscard]] bool empty() const noexcept { return path.empty() && png.empty(); }

    friend bool operator==(const ImageRef&, const ImageRef&) = default;
};

struct Interaction {
    int index = 1;
    ImageRef screenshot;
    ActionRecord action;
    // Position in the source trajectory before frame dropping.
    std::optional<int> original_index;

    friend bool operator==(const Interaction&, const Interaction&) = default;
};

struct IntentStatement {
    std::string text;
    std::optional<std::string> platform_prefix;

    friend bool operator==(const IntentStatement&, const IntentStatement&) = default;
};

struct Trajectory {
    std::string id;
    Platform platform = Platform::web;
    std::optional<std::string> app_or_site;
    std::vector<Interaction> steps;
    IntentStatement gold_intent;
    std::optional<std::string> gold_intent_raw;

    friend bool operator==(const Trajectory&, const Trajectory&) = default;
};

struct InteractionSummary {
    int step_index = 1;
    std::vector<std::string> screen_context;
    std::vector<std::string> user_actions;
    std::vector<std::string> speculative_intent;
    bool parse_fallback = false;

    friend bool operator==(const InteractionSummary&, const InteractionSummary&) = default;
};

enum class Method { cot, e2e, decomposed, decomposed_latency_opt };

[[nodiscard]] bool is_decomposed(Method m) noexcept;

struct AblationConfig {
    bool use_context_window = true;
    bool structured_summaries = true;
    bool refine_labels = true;
    // false selects the prompt-only stage-2 backend ("no fine-tuning").
    bool finetuned_stage2 = true;
    int max_steps = 15;

    friend bool operator==(const AblationConfig&, const AblationConfig&) = default;
};

/// One generation call as seen by the gateway.
struct CallRecord {
    std::string call_role;
    std::string template_id;
    std::optional<int> step_index;
    std::optional<std::int64_t> input_tokens;
    std::optional<std::int64_t> output_tokens;
    int attempts = 1;
    // Counts toward latency measured from the last user interaction.
    bool end_of_session = false;
    std::string request_text;
    int image_count = 0;

    friend bool operator==(const CallRecord&, const CallRecord&) = default;
};

struct PipelineTrace {
    std::string trajectory_id;
    Method method = Method::decomposed;
    AblationConfig config;
    std::uint64_t seed = 0;
    // Original indices of the steps kept after frame dropping.
    std::vector<int> retained_steps;
    std::vector<InteractionSummary> summaries;      // speculative fields stripped
    std::vector<InteractionSummary> raw_summaries;  // as parsed from stage 1
    std::optional<IntentStatement> predicted_intent;
    std::vector<CallRecord> calls;
    std::vector<std::string> warnings;
    std::optional<std::string> error;

    [[nodiscard]] const InteractionSummary* summary_at(int step_index) const;
    [[nodiscard]] const InteractionSummary* raw_summary_at(int step_index) const;

    friend bool operator==(const PipelineTrace&, const PipelineTrace&) = default;
};

std::string_view to_string(Platform p) noexcept;
std::string_view to_string(Method m) noexcept;
Platform parse_platform(std::string_view s);
Method parse_method(std::string_view s);
ActionRecord make_action(std::string_view kind);

}  // namespace intentflow
