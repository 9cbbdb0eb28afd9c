#include "intentflow/ingest/actions.hpp"

#include "intentflow/core/text.hpp"

namespace intentflow::ingest {

std::string format_action_string(const ActionRecord& a) {
    std::optional<std::string> name;
    if (a.element_name) {
        auto n = text::trim(text::single_line(*a.element_name));
        if (!n.empty()) name = std::move(n);
    }
    const auto kind = text::single_line(a.kind_name());

    if (a.kind == ActionKind::type_text) {
        std::string out = "type '" + text::single_line(a.typed_text.value_or("")) + "'";
        if (name) out += " into [" + *name + "]";
        return out;
    }
    if (name) return "[" + *name + "] " + kind;
    return kind;
}

}  // namespace intentflow::ingest
