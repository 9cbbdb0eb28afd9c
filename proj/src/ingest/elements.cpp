#include "intentflow/ingest/elements.hpp"

#include "intentflow/core/error.hpp"
#include "intentflow/core/serialize.hpp"
#include "intentflow/core/text.hpp"

namespace intentflow::ingest {

namespace {

struct Candidate {
    const A11yNode* node = nullptr;
    double score = 0.0;  // IoU for box queries, unused for points
    int depth = -1;
};

bool better(const Candidate& c, const Candidate& best, bool by_score) {
    if (!best.node) return true;
    if (by_score && c.score != best.score) return c.score > best.score;
    if (c.depth != best.depth) return c.depth > best.depth;
    return c.node->bbox.area() < best.node->bbox.area();
}

void visit(const A11yNode& node, int depth, const std::variant<Point, Rect>& query, Candidate& best) {
    if (!text::trim(node.name).empty() && !node.bbox.empty()) {
        Candidate c{&node, 0.0, depth};
        bool eligible = false;
        if (const auto* p = std::get_if<Point>(&query)) {
            eligible = node.bbox.contains(p->x, p->y);
        } else {
            c.score = intersection_over_union(node.bbox, std::get<Rect>(query));
            eligible = c.score > 0.0;
        }
        if (eligible && better(c, best, std::holds_alternative<Rect>(query))) best = c;
    }
    for (const auto& child : node.children) visit(child, depth + 1, query, best);
}

}  // namespace

std::optional<ResolvedElement> resolve_element(const A11yNode& tree,
                                               const std::variant<Point, Rect>& query) {
    Candidate best;
    visit(tree, 0, query, best);
    if (!best.node) return std::nullopt;
    return ResolvedElement{text::trim(best.node->name), best.node->bbox};
}

A11yNode a11y_from_json(const nlohmann::ordered_json& j) {
    A11yNode node;
    if (auto it = j.find("name"); it != j.end() && it->is_string()) node.name = it->get<std::string>();
    if (auto it = j.find("bbox"); it != j.end()) {
        node.bbox = it->get<Rect>();
        if (node.bbox.width < 0 || node.bbox.height < 0) {
            throw ParseError("accessibility node '" + node.name + "' has a negative-size bbox");
        }
    }
    if (auto it = j.find("children"); it != j.end()) {
        for (const auto& child : *it) node.children.push_back(a11y_from_json(child));
    }
    return node;
}

}  // namespace intentflow::ingest
