#include "intentflow/gateway/stub_backend.hpp"

#include "intentflow/core/error.hpp"
#include "intentflow/core/serialize.hpp"
#include "intentflow/core/text.hpp"

namespace intentflow::gateway {

namespace {

std::string var(const RenderedRequest& r, const std::string& name) {
    auto it = r.variables.find(name);
    return it == r.variables.end() ? std::string() : it->second;
}

// Bullet lines under "User actions:" headers plus free-form summary lines.
std::vector<std::string> actions_from_summaries(const std::string& block) {
    std::vector<std::string> actions;
    enum class Section { none, screen, action, freeform } section = Section::none;
    for (const auto& raw : text::split_lines(block)) {
        const auto line = text::trim(raw);
        if (line.empty()) continue;
        if (text::istarts_with(line, "interaction ")) {
            section = Section::freeform;
            continue;
        }
        if (text::istarts_with(line, "screen context")) {
            section = Section::screen;
            continue;
        }
        if (text::istarts_with(line, "user action")) {
            section = Section::action;
            continue;
        }
        std::string item;
        const bool bullet = text::strip_bullet(line, item);
        if (section == Section::action && bullet && !item.empty()) {
            actions.push_back(item);
        } else if (section == Section::freeform && !bullet) {
            actions.push_back(line);
        }
    }
    return actions;
}

std::vector<std::string> bullets(const std::string& block) {
    std::vector<std::string> out;
    for (const auto& line : text::split_lines(block)) {
        std::string item;
        if (text::strip_bullet(line, item) && !item.empty()) out.push_back(item);
    }
    return out;
}

std::vector<std::string> split_clauses(const std::string& intent) {
    std::vector<std::string> parts{intent};
    for (std::string_view sep : {", then ", "; ", ", ", " and "}) {
        std::vector<std::string> next;
        for (const auto& p : parts) {
            std::size_t start = 0;
            while (true) {
                auto pos = p.find(sep, start);
                next.push_back(text::trim(p.substr(start, pos == std::string::npos ? std::string::npos : pos - start)));
                if (pos == std::string::npos) break;
                start = pos + sep.size();
            }
        }
        parts = std::move(next);
    }
    std::vector<std::string> out;
    for (auto& p : parts) {
        if (!p.empty()) out.push_back(std::move(p));
    }
    return out;
}

std::string join_actions(const std::vector<std::string>& actions) {
    if (actions.empty()) return "browse the app";
    return text::join(actions, ", then ");
}

}  // namespace

BackendReply synthetic_reply(const RenderedRequest& r) {
    BackendReply reply;
    const auto step = var(r, "step_index");
    switch (r.template_id) {
        case TemplateId::summarize:
            reply.text = "SCREEN CONTEXT:\n- Screen " + step + " of " + var(r, "step_count") +
                         "\nUSER ACTION:\n- " + var(r, "current_action") +
                         "\nSPECULATIVE INTENT:\n- The user may be pursuing an unstated goal (guess " +
                         r.trajectory_id + "/" + step + ")\n";
            break;
        case TemplateId::summarize_unstructured:
            reply.text = "At step " + step + " the user performed " + var(r, "current_action") + ".";
            break;
        case TemplateId::fuse_intent:
            reply.text = join_actions(actions_from_summaries(var(r, "summaries")));
            break;
        case TemplateId::fuse_intent_visual: {
            auto actions = actions_from_summaries(var(r, "summaries"));
            actions.push_back(var(r, "final_action"));
            reply.text = join_actions(actions);
            break;
        }
        case TemplateId::cot:
        case TemplateId::e2e: {
            std::vector<std::string> actions;
            for (const auto& line : text::split_lines(var(r, "actions"))) {
                const auto colon = line.find(": ");
                if (colon != std::string::npos) actions.push_back(text::trim(line.substr(colon + 2)));
            }
            if (r.template_id == TemplateId::cot) {
                std::string out;
                for (std::size_t i = 0; i < actions.size(); ++i) {
                    out += "Interaction " + std::to_string(i + 1) + ": the user performed " + actions[i] + ".\n";
                }
                reply.text = out + "Intent: " + join_actions(actions);
            } else {
                reply.text = join_actions(actions);
            }
            break;
        }
        case TemplateId::refine_label:
            reply.text = var(r, "intent");
            break;
        case TemplateId::clean_label:
            reply.text = var(r, "label");
            break;
        case TemplateId::decompose_facts: {
            std::string out;
            for (const auto& f : split_clauses(var(r, "intent"))) out += "- " + f + "\n";
            reply.text = out;
            break;
        }
        case TemplateId::judge_entailment: {
            const auto fact = text::to_lower(text::trim(var(r, "fact")));
            bool found = false;
            for (const auto& f : bullets(var(r, "facts"))) {
                if (text::to_lower(f) == fact) found = true;
            }
            reply.text = found ? "yes" : "no";
            break;
        }
    }
    return reply;
}

StubBackend::StubBackend(StubFallback fallback) : fallback_(fallback) {}

StubBackend& StubBackend::add_rule(StubRule rule) {
    std::lock_guard lock(mutex_);
    rules_.push_back(std::move(rule));
    return *this;
}

StubBackend& StubBackend::set_responder(Responder responder) {
    std::lock_guard lock(mutex_);
    responder_ = std::move(responder);
    return *this;
}

void StubBackend::load_script(const json& script) {
    if (!script.is_object()) throw ConfigError("stub script must be a JSON object");
    try {
        if (auto it = script.find("fallback"); it != script.end()) {
            const auto f = it->get<std::string>();
            if (f == "synthetic") {
                fallback_ = StubFallback::synthetic;
            } else if (f == "echo") {
                fallback_ = StubFallback::echo;
            } else if (f == "error") {
                fallback_ = StubFallback::error;
            } else {
                throw ConfigError("unknown stub fallback '" + f + "'");
            }
        }
        for (const auto& j : script.value("rules", json::array())) {
            StubRule rule;
            if (j.contains("template")) rule.template_id = parse_template_id(j.at("template").get<std::string>());
            if (j.contains("step")) rule.step_index = j.at("step").get<int>();
            if (j.contains("trajectory")) rule.trajectory_id = j.at("trajectory").get<std::string>();
            if (j.contains("contains")) rule.prompt_contains = j.at("contains").get<std::string>();
            if (j.contains("response")) rule.responses.push_back(j.at("response").get<std::string>());
            if (j.contains("responses")) {
                for (const auto& r : j.at("responses")) rule.responses.push_back(r.get<std::string>());
            }
            if (j.contains("input_tokens")) rule.input_tokens = j.at("input_tokens").get<std::int64_t>();
            if (j.contains("output_tokens")) rule.output_tokens = j.at("output_tokens").get<std::int64_t>();
            rule.fail_times = j.value("fail_times", 0);
            rule.fail_permanently = j.value("fail_permanently", false);
            add_rule(std::move(rule));
        }
    } catch (const json::exception& e) {
        throw ConfigError(std::string("stub script: ") + e.what());
    }
}

BackendReply StubBackend::complete(const RenderedRequest& request) {
    Responder responder;
    std::optional<std::size_t> matched;
    int attempt = 0;
    {
        std::lock_guard lock(mutex_);
        received_.push_back(request);
        for (std::size_t i = 0; i < rules_.size(); ++i) {
            const auto& rule = rules_[i];
            if (rule.template_id && *rule.template_id != request.template_id) continue;
            if (rule.step_index && request.step_index != rule.step_index) continue;
            if (rule.trajectory_id && *rule.trajectory_id != request.trajectory_id) continue;
            if (rule.prompt_contains && request.prompt.find(*rule.prompt_contains) == std::string::npos) continue;
            matched = i;
            break;
        }
        if (matched) {
            attempt = ++attempts_[{*matched, request.trajectory_id, request.step_index.value_or(-1)}];
        }
        responder = responder_;
    }

    if (matched) {
        const auto& rule = rules_[*matched];
        if (rule.fail_permanently) throw BackendError("stub: scripted permanent failure", false);
        if (attempt <= rule.fail_times) {
            throw BackendError("stub: scripted transient failure " + std::to_string(attempt), true);
        }
        BackendReply reply;
        if (!rule.responses.empty()) {
            const auto k = std::min<std::size_t>(static_cast<std::size_t>(attempt - rule.fail_times - 1),
                                                 rule.responses.size() - 1);
            reply.text = rule.responses[k];
        } else {
            reply = synthetic_reply(request);
        }
        reply.input_tokens = rule.input_tokens;
        reply.output_tokens = rule.output_tokens;
        return reply;
    }
    if (responder) {
        if (auto reply = responder(request)) return *reply;
    }
    switch (fallback_) {
        case StubFallback::synthetic: return synthetic_reply(request);
        case StubFallback::echo: return BackendReply{request.prompt, std::nullopt, std::nullopt};
        case StubFallback::error: break;
    }
    throw BackendError("stub: no scripted response for template '" +
                           std::string(to_string(request.template_id)) + "'",
                       false);
}

std::vector<RenderedRequest> StubBackend::requests() const {
    std::lock_guard lock(mutex_);
    return received_;
}

std::size_t StubBackend::request_count() const {
    std::lock_guard lock(mutex_);
    return received_.size();
}

std::shared_ptr<StubBackend> make_stub_backend(const BackendConfig& config) {
    StubFallback fallback = StubFallback::synthetic;
    if (config.stub_fallback == "echo") fallback = StubFallback::echo;
    if (config.stub_fallback == "error") fallback = StubFallback::error;
    auto stub = std::make_shared<StubBackend>(fallback);
    if (!config.stub_script.empty()) {
        try {
            stub->load_script(json::parse(read_file(config.stub_script)));
        } catch (const json::exception& e) {
            throw ConfigError("cannot parse stub script " + config.stub_script.string() + ": " + e.what());
        }
    }
    return stub;
}

}  // namespace intentflow::gateway
