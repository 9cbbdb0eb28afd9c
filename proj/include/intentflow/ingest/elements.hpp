#pragma once

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "intentflow/core/types.hpp"

namespace intentflow::ingest {

/// Accessibility-tree node. Child boxes are not required to nest inside
/// their parent's box.
struct A11yNode {
    std::string name;
    Rect bbox;
    std::vector<A11yNode> children;
};

struct Point {
    std::int64_t x = 0;
    std::int64_t y = 0;
};

struct ResolvedElement {
    std::string name;
    Rect bbox;

    friend bool operator==(const ResolvedElement&, const ResolvedElement&) = default;
};

/// Finds the element a tap/click refers to.
///
/// Point queries return the deepest named node whose box contains the point.
/// Box queries return the named node with the highest intersection-over-union
/// with the query box; ties go to the deeper node. Remaining ties in either
/// mode go to the node with the smallest area, then to document order.
/// Unnamed (empty or whitespace) nodes are traversed but never returned.
std::optional<ResolvedElement> resolve_element(const A11yNode& tree,
                                               const std::variant<Point, Rect>& query);

A11yNode a11y_from_json(const nlohmann::ordered_json& j);

}  // namespace intentflow::ingest
