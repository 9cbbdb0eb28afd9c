#include "intentflow/core/validate.hpp"

#include "intentflow/core/error.hpp"
#include "intentflow/core/text.hpp"
#include "intentflow/image/image.hpp"

namespace intentflow {

namespace {
constexpr std::string_view kPrefixDelimiter = "; ";
}

std::vector<std::string> validate_action(const ActionRecord& a) {
    std::vector<std::string> out;
    const bool has_name = a.element_name && !text::trim(*a.element_name).empty();
    if ((a.kind == ActionKind::click || a.kind == ActionKind::hover) && !has_name && !a.element_bbox) {
        out.push_back(a.kind_name() + " requires element_name or element_bbox");
    }
    if (a.kind == ActionKind::type_text && !a.typed_text) {
        out.emplace_back("type_text requires typed_text");
    }
    if (a.kind == ActionKind::other && a.other_kind.empty()) {
        out.emplace_back("other action kind has no label");
    }
    if (a.element_bbox && (a.element_bbox->width < 0 || a.element_bbox->height < 0)) {
        out.emplace_back("element_bbox has negative size");
    }
    return out;
}

std::vector<std::string> validate_trajectory(const Trajectory& t, const ValidateOptions& options) {
    std::vector<std::string> out;
    if (t.id.empty()) out.emplace_back("id: empty trajectory id");
    if (t.steps.empty()) out.emplace_back("steps: trajectory has no steps");

    for (std::size_t pos = 0; pos < t.steps.size(); ++pos) {
        const auto& step = t.steps[pos];
        const int expected = pos == 0 ? 1 : t.steps[pos - 1].index + 1;
        if (step.index != expected) {
            out.push_back("non-contiguous step index at position " + std::to_string(pos + 1));
        }
        const auto where = "step " + std::to_string(step.index) + ": ";
        for (const auto& v : validate_action(step.action)) {
            out.push_back(where + "action: " + v);
        }
        if (step.screenshot.empty()) {
            out.push_back(where + "screenshot: missing");
        } else if (step.screenshot.is_inline() || options.image_root) {
            try {
                if (step.screenshot.is_inline()) {
                    (void)decode_png(step.screenshot.png);
                } else {
                    (void)read_png(*options.image_root / step.screenshot.path);
                }
            } catch (const Error& e) {
                out.push_back(where + "screenshot: " + e.what());
            }
        }
    }

    if (text::trim(t.gold_intent.text).empty()) {
        out.emplace_back("gold_intent.text: empty");
    }
    if (const auto& p = t.gold_intent.platform_prefix) {
        if (p->empty() || p->find(kPrefixDelimiter) != std::string::npos) {
            out.emplace_back("gold_intent.platform_prefix: not a valid platform identifier");
        }
    }
    if (t.app_or_site) {
        if (t.app_or_site->empty()) {
            out.emplace_back("app_or_site: empty");
        } else if (t.gold_intent.text.find(*t.app_or_site) != std::string::npos) {
            out.emplace_back("app_or_site: appears verbatim inside gold_intent.text");
        }
    }
    return out;
}

IntentStatement split_platform_prefix(std::string_view label) {
    if (label.empty()) throw InvalidArgument("empty intent label");
    const auto pos = label.find(kPrefixDelimiter);
    if (pos == std::string_view::npos) {
        return IntentStatement{std::string(label), std::nullopt};
    }
    return IntentStatement{std::string(label.substr(pos + kPrefixDelimiter.size())),
                           std::string(label.substr(0, pos))};
}

std::string evaluation_text(const IntentStatement& s) {
    return text::trim(s.text);
}

}  // namespace intentflow
