#include "intentflow/ingest/labels.hpp"

#include <array>
#include <cctype>

#include "intentflow/core/error.hpp"
#include "intentflow/core/text.hpp"

namespace intentflow::ingest {

namespace {

constexpr std::array kPrepositions = {"on", "in", "from", "using", "via", "at", "with", "through"};

bool is_word_char(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) != 0 || c == '_' || c == '\'';
}

std::string collapse_spaces(std::string_view s) {
    std::string out;
    for (char c : s) {
        if (c == ' ' && (out.empty() || out.back() == ' ')) continue;
        out += c;
    }
    // No space before punctuation left behind by a removal.
    std::string fixed;
    for (std::size_t i = 0; i < out.size(); ++i) {
        if (out[i] == ' ' && i + 1 < out.size() && (out[i + 1] == ',' || out[i + 1] == '.')) continue;
        fixed += out[i];
    }
    return fixed;
}

std::string tidy(std::string_view s) {
    std::string t = text::trim(collapse_spaces(s));
    while (!t.empty() && (t.back() == ',' || t.back() == ';' || t.back() == ' ')) t.pop_back();
    while (!t.empty() && (t.front() == ',' || t.front() == ';' || t.front() == ' ')) t.erase(0, 1);
    return t;
}

// Removes whole-word occurrences of `app` plus a directly preceding preposition.
std::string remove_app(std::string s, std::string_view app) {
    std::size_t from = 0;
    while (true) {
        auto pos = text::ifind(s, app, from);
        if (pos == std::string::npos) break;
        const auto end = pos + app.size();
        const bool left_ok = pos == 0 || !is_word_char(s[pos - 1]);
        const bool right_ok = end >= s.size() || !is_word_char(s[end]);
        if (!left_ok || !right_ok) {
            from = pos + 1;
            continue;
        }
        auto start = pos;
        // Preceding preposition: "<prep> <app>".
        auto k = start;
        while (k > 0 && s[k - 1] == ' ') --k;
        auto w = k;
        while (w > 0 && is_word_char(s[w - 1])) --w;
        const auto word = text::to_lower(std::string_view(s).substr(w, k - w));
        for (const auto* p : kPrepositions) {
            if (word == p) {
                start = w;
                break;
            }
        }
        auto stop = end;
        // "the DoorDash app" style suffix.
        if (text::istarts_with(std::string_view(s).substr(stop), " app") &&
            (stop + 4 >= s.size() || !is_word_char(s[stop + 4]))) {
            stop += 4;
        }
        s.erase(start, stop - start);
        s.insert(start, " ");
        from = start;
    }
    return s;
}

}  // namespace

IntentStatement restructure_label(std::string_view label, const std::optional<std::string>& app) {
    IntentStatement out;
    const auto trimmed = text::trim(label);
    if (trimmed.empty()) throw InvalidArgument("empty goal label");
    if (!app || text::trim(*app).empty()) {
        out.text = trimmed;
        return out;
    }
    const auto name = text::trim(*app);
    auto body = remove_app(trimmed, name);
    // The removal may leave a dangling "the" ("order from the DoorDash").
    body = tidy(body);
    if (text::to_lower(body).ends_with(" the")) body = tidy(body.substr(0, body.size() - 4));
    if (body.empty()) throw InvalidArgument("label '" + trimmed + "' is only the platform name");
    // A word-internal match (e.g. the app name inside a longer word) is left
    // alone above; the verbatim-absence invariant still has to hold.
    if (body.find(name) != std::string::npos) {
        while (true) {
            const auto pos = body.find(name);
            if (pos == std::string::npos) break;
            body.erase(pos, name.size());
        }
        body = tidy(body);
        if (body.empty()) throw InvalidArgument("label '" + trimmed + "' is only the platform name");
    }
    out.text = body;
    out.platform_prefix = name;
    return out;
}

std::string clean_label(const std::string& raw, gateway::Gateway& backend, const std::string& trajectory_id,
                        gateway::CallRecorder* recorder) {
    gateway::GenerationRequest req;
    req.template_id = gateway::TemplateId::clean_label;
    req.variables["label"] = raw;
    req.max_output_tokens = 128;
    req.trajectory_id = trajectory_id;
    req.call_role = "clean_label";
    const auto result = backend.generate(req, recorder);
    auto cleaned = text::trim(result.text);
    if (cleaned.empty()) {
        throw InvalidArgument("trajectory '" + trajectory_id + "': cleaning returned an empty label");
    }
    return cleaned;
}

}  // namespace intentflow::ingest
