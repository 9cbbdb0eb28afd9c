#include "intentflow/gateway/templates.hpp"

#include <cctype>
#include <cstdlib>

#include "intentflow/core/error.hpp"
#include "intentflow/core/serialize.hpp"

namespace intentflow::gateway {

namespace {

bool is_ident_start(char c) {
    return std::isalpha(static_cast<unsigned char>(c)) || c == '_';
}
bool is_ident(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
}

// Calls on_text for literal runs and on_placeholder for `{name}` tokens.
template <typename OnText, typename OnPlaceholder>
void scan(std::string_view s, OnText&& on_text, OnPlaceholder&& on_placeholder) {
    std::size_t i = 0;
    while (i < s.size()) {
        const char c = s[i];
        if (c == '{' && i + 1 < s.size() && s[i + 1] == '{') {
            on_text(std::string_view("{"));
            i += 2;
            continue;
        }
        if (c == '}' && i + 1 < s.size() && s[i + 1] == '}') {
            on_text(std::string_view("}"));
            i += 2;
            continue;
        }
        if (c == '{' && i + 1 < s.size() && is_ident_start(s[i + 1])) {
            std::size_t j = i + 1;
            while (j < s.size() && is_ident(s[j])) ++j;
            if (j < s.size() && s[j] == '}') {
                on_placeholder(s.substr(i + 1, j - i - 1));
                i = j + 1;
                continue;
            }
        }
        on_text(s.substr(i, 1));
        ++i;
    }
}

}  // namespace

std::string_view to_string(TemplateId id) noexcept {
    switch (id) {
        case TemplateId::cot: return "cot";
        case TemplateId::e2e: return "e2e";
        case TemplateId::summarize: return "summarize";
        case TemplateId::summarize_unstructured: return "summarize_unstructured";
        case TemplateId::fuse_intent: return "fuse_intent";
        case TemplateId::fuse_intent_visual: return "fuse_intent_visual";
        case TemplateId::refine_label: return "refine_label";
        case TemplateId::clean_label: return "clean_label";
        case TemplateId::decompose_facts: return "decompose_facts";
        case TemplateId::judge_entailment: return "judge_entailment";
    }
    return "unknown";
}

TemplateId parse_template_id(std::string_view name) {
    for (auto id : kAllTemplates) {
        if (to_string(id) == name) return id;
    }
    throw ConfigError("unknown prompt template '" + std::string(name) + "'");
}

bool accepts_images(TemplateId id) noexcept {
    switch (id) {
        case TemplateId::cot:
        case TemplateId::e2e:
        case TemplateId::summarize:
        case TemplateId::summarize_unstructured:
        case TemplateId::fuse_intent_visual:
            return true;
        default:
            return false;
    }
}

PromptTemplate::PromptTemplate(TemplateId id, std::string text) : id_(id), text_(std::move(text)) {
    scan(text_, [](std::string_view) {},
         [this](std::string_view name) { placeholders_.emplace(name); });
}

std::string PromptTemplate::render(const Variables& vars) const {
    std::string missing;
    for (const auto& p : placeholders_) {
        if (!vars.contains(p)) {
            if (!missing.empty()) missing += ", ";
            missing += "{" + p + "}";
        }
    }
    if (!missing.empty()) {
        throw ConfigError("template '" + std::string(to_string(id_)) + "' has unbound placeholders: " + missing);
    }
    std::string out;
    out.reserve(text_.size());
    scan(text_, [&](std::string_view t) { out += t; },
         [&](std::string_view name) { out += vars.at(std::string(name)); });
    return out;
}

TemplateLibrary::TemplateLibrary(std::map<TemplateId, PromptTemplate> templates)
    : templates_(std::move(templates)) {}

std::shared_ptr<const TemplateLibrary> TemplateLibrary::load(const std::filesystem::path& dir) {
    std::map<TemplateId, PromptTemplate> templates;
    for (auto id : kAllTemplates) {
        const auto file = dir / (std::string(to_string(id)) + ".txt");
        if (!std::filesystem::exists(file)) {
            throw ConfigError("missing prompt template " + file.string());
        }
        templates.emplace(id, PromptTemplate(id, read_file(file)));
    }
    return std::make_shared<const TemplateLibrary>(std::move(templates));
}

std::filesystem::path TemplateLibrary::default_dir() {
    if (const char* env = std::getenv("INTENTFLOW_PROMPT_DIR"); env && *env) return env;
    return INTENTFLOW_PROMPT_DIR;
}

std::shared_ptr<const TemplateLibrary> TemplateLibrary::load_default() {
    return load(default_dir());
}

const PromptTemplate& TemplateLibrary::get(TemplateId id) const {
    auto it = templates_.find(id);
    if (it == templates_.end()) {
        throw ConfigError("prompt template '" + std::string(to_string(id)) + "' not loaded");
    }
    return it->second;
}

bool TemplateLibrary::has(TemplateId id) const noexcept {
    return templates_.contains(id);
}

}  // namespace intentflow::gateway
