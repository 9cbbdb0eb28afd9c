#include "intentflow/core/types.hpp"

#include <algorithm>

#include "intentflow/core/error.hpp"

namespace intentflow {

Rect intersection(const Rect& a, const Rect& b) noexcept {
    const auto x0 = std::max(a.x, b.x);
    const auto y0 = std::max(a.y, b.y);
    const auto x1 = std::min(a.right(), b.right());
    const auto y1 = std::min(a.bottom(), b.bottom());
    if (x1 <= x0 || y1 <= y0) {
        return Rect{x0, y0, 0, 0};
    }
    return Rect{x0, y0, x1 - x0, y1 - y0};
}

double intersection_over_union(const Rect& a, const Rect& b) noexcept {
    const auto inter = intersection(a, b).area();
    const auto uni = a.area() + b.area() - inter;
    if (uni <= 0) {
        return 0.0;
    }
    return static_cast<double>(inter) / static_cast<double>(uni);
}

std::string ActionRecord::kind_name() const {
    switch (kind) {
        case ActionKind::click: return "click";
        case ActionKind::hover: return "hover";
        case ActionKind::type_text: return "type_text";
        case ActionKind::scroll: return "scroll";
        case ActionKind::navigate: return "navigate";
        case ActionKind::other: return other_kind.empty() ? "other" : other_kind;
    }
    return "other";
}

ActionRecord make_action(std::string_view kind) {
    ActionRecord a;
    if (kind == "click") {
        a.kind = ActionKind::click;
    } else if (kind == "hover") {
        a.kind = ActionKind::hover;
    } else if (kind == "type_text") {
        a.kind = ActionKind::type_text;
    } else if (kind == "scroll") {
        a.kind = ActionKind::scroll;
    } else if (kind == "navigate") {
        a.kind = ActionKind::navigate;
    } else {
        a.kind = ActionKind::other;
        a.other_kind = std::string(kind);
    }
    return a;
}

bool is_decomposed(Method m) noexcept {
    return m == Method::decomposed || m == Method::decomposed_latency_opt;
}

const InteractionSummary* PipelineTrace::summary_at(int step_index) const {
    for (const auto& s : summaries) {
        if (s.step_index == step_index) return &s;
    }
    return nullptr;
}

const InteractionSummary* PipelineTrace::raw_summary_at(int step_index) const {
    for (const auto& s : raw_summaries) {
        if (s.step_index == step_index) return &s;
    }
    return nullptr;
}

std::string_view to_string(Platform p) noexcept {
    return p == Platform::web ? "web" : "android";
}

std::string_view to_string(Method m) noexcept {
    switch (m) {
        case Method::cot: return "cot";
        case Method::e2e: return "e2e";
        case Method::decomposed: return "decomposed";
        case Method::decomposed_latency_opt: return "decomposed_latency_opt";
    }
    return "decomposed";
}

Platform parse_platform(std::string_view s) {
    if (s == "web") return Platform::web;
    if (s == "android") return Platform::android;
    throw ParseError("unknown platform '" + std::string(s) + "'");
}

Method parse_method(std::string_view s) {
    if (s == "cot") return Method::cot;
    if (s == "e2e") return Method::e2e;
    if (s == "decomposed") return Method::decomposed;
    if (s == "decomposed_latency_opt" || s == "decomposed-latency-opt") {
        return Method::decomposed_latency_opt;
    }
    throw InvalidArgument("unknown method '" + std::string(s) + "'");
}

}  // namespace intentflow
