#include "intentflow/pipeline/summaries.hpp"

#include "intentflow/core/text.hpp"

namespace intentflow::pipeline {

namespace {

enum class Section { none, screen, action, speculative };

// Recognizes a section header line; `rest` receives any text after the colon.
std::optional<Section> header_of(const std::string& line, std::string& rest) {
    std::string t = text::trim(line);
    while (!t.empty() && (t.front() == '#' || t.front() == '*' || t.front() == '_')) t.erase(0, 1);
    t = text::trim(t);
    const auto colon = t.find(':');
    if (colon == std::string::npos) return std::nullopt;
    std::string label = t.substr(0, colon);
    while (!label.empty() && (label.back() == '*' || label.back() == '_')) label.pop_back();
    label = text::to_lower(text::trim(label));
    rest = t.substr(colon + 1);
    while (!rest.empty() && (rest.front() == '*' || rest.front() == '_')) rest.erase(0, 1);
    rest = text::trim(rest);

    if (label == "screen context") return Section::screen;
    if (label == "user action" || label == "user actions") return Section::action;
    if (label == "speculative intent" || label == "speculative intents") return Section::speculative;
    return std::nullopt;
}

}  // namespace

std::optional<InteractionSummary> parse_structured_summary(std::string_view body, int step_index) {
    InteractionSummary s;
    s.step_index = step_index;
    bool saw_screen = false;
    bool saw_action = false;
    Section section = Section::none;

    auto add = [&](std::string item) {
        if (item.empty()) return;
        switch (section) {
            case Section::screen: s.screen_context.push_back(std::move(item)); break;
            case Section::action: s.user_actions.push_back(std::move(item)); break;
            case Section::speculative: s.speculative_intent.push_back(std::move(item)); break;
            case Section::none: break;
        }
    };

    for (const auto& line : text::split_lines(body)) {
        if (text::trim(line).empty()) continue;
        std::string rest;
        if (auto h = header_of(line, rest)) {
            section = *h;
            saw_screen |= section == Section::screen;
            saw_action |= section == Section::action;
            add(std::move(rest));
            continue;
        }
        std::string item;
        if (!text::strip_bullet(line, item)) item = text::trim(line);
        add(std::move(item));
    }

    if (!saw_screen || !saw_action) return std::nullopt;
    if (s.screen_context.empty() && s.user_actions.empty()) return std::nullopt;
    return s;
}

InteractionSummary strip_speculative(InteractionSummary s) {
    s.speculative_intent.clear();
    return s;
}

std::string render_summaries(const std::vector<InteractionSummary>& summaries, bool structured) {
    std::string out;
    for (const auto& s : summaries) {
        if (!out.empty()) out += "\n";
        out += "Interaction " + std::to_string(s.step_index) + ":\n";
        if (!structured || s.parse_fallback) {
            for (const auto& a : s.user_actions) out += text::single_line(a) + "\n";
            continue;
        }
        out += "Screen context:\n";
        for (const auto& c : s.screen_context) out += "- " + text::single_line(c) + "\n";
        out += "User actions:\n";
        for (const auto& a : s.user_actions) out += "- " + text::single_line(a) + "\n";
    }
    return out;
}

std::string summary_pool_text(const std::vector<InteractionSummary>& summaries) {
    std::string out;
    for (const auto& s : summaries) {
        for (const auto& c : s.screen_context) out += text::single_line(c) + "\n";
        for (const auto& a : s.user_actions) out += text::single_line(a) + "\n";
    }
    return out;
}

std::optional<std::string> extract_labeled_intent(std::string_view body) {
    std::optional<std::string> found;
    for (const auto& line : text::split_lines(body)) {
        auto t = text::trim(line);
        while (!t.empty() && (t.front() == '*' || t.front() == '#')) t.erase(0, 1);
        t = text::trim(t);
        if (text::istarts_with(t, "intent:")) {
            auto rest = t.substr(7);
            while (!rest.empty() && rest.front() == '*') rest.erase(0, 1);
            rest = text::trim(rest);
            if (!rest.empty()) found = rest;
        }
    }
    return found;
}

}  // namespace intentflow::pipeline
