#pragma once

#include <filesystem>
#include <map>
#include <memory>
#include <set>
#include <string>
#include <string_view>

namespace intentflow::gateway {

enum class TemplateId {
    cot,
    e2e,
    summarize,
    summarize_unstructured,
    fuse_intent,
    fuse_intent_visual,
    refine_label,
    clean_label,
    decompose_facts,
    judge_entailment,
};

inline constexpr TemplateId kAllTemplates[] = {
    TemplateId::cot,          TemplateId::e2e,
    TemplateId::summarize,    TemplateId::summarize_unstructured,
    TemplateId::fuse_intent,  TemplateId::fuse_intent_visual,
    TemplateId::refine_label, TemplateId::clean_label,
    TemplateId::decompose_facts, TemplateId::judge_entailment,
};

std::string_view to_string(TemplateId id) noexcept;
TemplateId parse_template_id(std::string_view name);

/// Templates that may carry screenshots.
bool accepts_images(TemplateId id) noexcept;

using Variables = std::map<std::string, std::string>;

/// Prompt text with `{name}` placeholders. `{{` and `}}` produce literal braces;
/// braces around anything that is not an identifier are left as-is.
class PromptTemplate {
public:
    PromptTemplate(TemplateId id, std::string text);

    [[nodiscard]] TemplateId id() const noexcept { return id_; }
    [[nodiscard]] const std::string& text() const noexcept { return text_; }
    [[nodiscard]] const std::set<std::string>& placeholders() const noexcept { return placeholders_; }

    /// Throws ConfigError naming every unbound placeholder.
    [[nodiscard]] std::string render(const Variables& vars) const;

private:
    TemplateId id_;
    std::string text_;
    std::set<std::string> placeholders_;
};

class TemplateLibrary {
public:
    /// Loads `<dir>/<template_id>.txt` for every template id.
    static std::shared_ptr<const TemplateLibrary> load(const std::filesystem::path& dir);
    /// The prompt directory shipped with the source tree.
    static std::shared_ptr<const TemplateLibrary> load_default();
    static std::filesystem::path default_dir();

    explicit TemplateLibrary(std::map<TemplateId, PromptTemplate> templates);

    [[nodiscard]] const PromptTemplate& get(TemplateId id) const;
    [[nodiscard]] bool has(TemplateId id) const noexcept;

private:
    std::map<TemplateId, PromptTemplate> templates_;
};

}  // namespace intentflow::gateway
