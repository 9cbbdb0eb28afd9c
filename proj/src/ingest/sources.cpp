#include "intentflow/ingest/sources.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <optional>

#include "intentflow/core/digest.hpp"
#include "intentflow/core/error.hpp"
#include "intentflow/core/parallel.hpp"
#include "intentflow/core/serialize.hpp"
#include "intentflow/core/text.hpp"
#include "intentflow/core/validate.hpp"
#include "intentflow/image/image.hpp"
#include "intentflow/ingest/elements.hpp"
#include "intentflow/ingest/labels.hpp"

namespace fs = std::filesystem;

namespace intentflow::ingest {

namespace {

constexpr std::int64_t kTapBox = 16;

struct Skip : Error {
    using Error::Error;
};

struct Episode {
    std::optional<Trajectory> trajectory;
    std::vector<IngestDiagnostic> diagnostics;
    std::vector<CallRecord> calls;
};

std::string json_string(const json& j, const char* key) {
    if (!j.contains(key) || j[key].is_null()) return {};
    const auto& v = j[key];
    if (v.is_string()) return v.get<std::string>();
    return v.dump();
}

Image load_screenshot(const fs::path& dir, const std::string& name, int step) {
    if (name.empty()) throw Skip("step " + std::to_string(step) + ": no screenshot listed");
    const auto file = dir / name;
    if (!fs::exists(file)) throw Skip("step " + std::to_string(step) + ": missing screenshot " + file.string());
    try {
        return read_png(file);
    } catch (const Error& e) {
        throw Skip("step " + std::to_string(step) + ": " + e.what());
    }
}

ImageRef store_screenshot(const IngestOptions& opt, const std::string& id, int step, const Image& image) {
    const auto rel = fs::path("screenshots") / safe_component(id) / (std::to_string(step) + ".png");
    write_png(opt.out_dir / rel, image);
    return ImageRef{rel.generic_string(), {}};
}

ActionRecord web_action(const json& a) {
    std::string op;
    std::string value;
    if (a.contains("operation")) {
        const auto& o = a["operation"];
        op = o.is_string() ? o.get<std::string>() : json_string(o, "op");
        if (o.is_object()) value = json_string(o, "value");
    }
    op = text::to_lower(text::trim(op));
    ActionRecord r;
    if (op == "click") {
        r.kind = ActionKind::click;
    } else if (op == "hover") {
        r.kind = ActionKind::hover;
    } else if (op == "type") {
        r.kind = ActionKind::type_text;
        r.typed_text = value;
    } else if (op == "scroll") {
        r.kind = ActionKind::scroll;
    } else {
        r = make_action(op.empty() ? "unknown" : op);
    }
    if (a.contains("target") && a["target"].is_object()) {
        const auto name = text::trim(json_string(a["target"], "name"));
        if (!name.empty()) r.element_name = name;
    }
    return r;
}

Episode ingest_web(const fs::path& dir, const IngestOptions& opt) {
    Episode ep;
    const auto j = json::parse(read_file(dir / "episode.json"));
    Trajectory t;
    t.id = json_string(j, "annotation_id");
    if (t.id.empty()) throw Skip("missing annotation_id");
    t.platform = Platform::web;
    const auto site = text::trim(json_string(j, "website"));
    if (!site.empty()) t.app_or_site = site;
    t.gold_intent = restructure_label(json_string(j, "confirmed_task"), t.app_or_site);

    const auto& actions = j.at("actions");
    int k = 0;
    for (const auto& a : actions) {
        ++k;
        Interaction step;
        step.index = k;
        step.action = web_action(a);
        auto image = load_screenshot(dir, json_string(a, "screenshot"), k);

        std::optional<Rect> bbox;
        if (a.contains("target") && a["target"].is_object() && a["target"].contains("bbox")) {
            bbox = a["target"]["bbox"].get<Rect>();
        }
        CropSpec spec{opt.crop_width, opt.crop_height, derive_seed(opt.seed, t.id, k)};
        const Rect anchor = bbox ? *bbox
                                 : Rect{0, 0, std::min<std::int64_t>(image.width(), spec.target_width),
                                        std::min<std::int64_t>(image.height(), spec.target_height)};
        auto crop = crop_for_web(image, anchor, spec);
        for (auto& w : crop.warnings) ep.diagnostics.push_back({dir.filename().string(), "step " + std::to_string(k) + ": " + w, false});
        if (bbox) {
            const auto box = intersection(crop.bbox_in_crop, Rect{0, 0, crop.image.width(), crop.image.height()});
            crop.image = highlight_element(crop.image, box);
            step.action.element_bbox = box;
        }
        step.screenshot = store_screenshot(opt, t.id, k, crop.image);
        t.steps.push_back(std::move(step));
    }
    ep.trajectory = std::move(t);
    return ep;
}

ActionRecord android_action(const json& a, std::optional<Point>& point) {
    const auto type = text::to_lower(text::trim(json_string(a, "action_type")));
    ActionRecord r;
    if (type == "click" || type == "tap") {
        r.kind = ActionKind::click;
    } else if (type == "input_text" || type == "type") {
        r.kind = ActionKind::type_text;
        r.typed_text = json_string(a, "text");
    } else if (type == "scroll" || type == "swipe") {
        r.kind = ActionKind::scroll;
    } else if (type == "navigate_back" || type == "navigate_home") {
        r.kind = ActionKind::navigate;
    } else if (type == "open_app") {
        r = make_action("open_app");
        const auto app = text::trim(json_string(a, "app_name"));
        if (!app.empty()) r.element_name = app;
    } else {
        r = make_action(type.empty() ? "unknown" : type);
    }
    if (a.contains("x") && a.contains("y") && a["x"].is_number() && a["y"].is_number()) {
        point = Point{a["x"].get<std::int64_t>(), a["y"].get<std::int64_t>()};
    }
    return r;
}

Rect scale_down(const Rect& r, int factor) {
    const auto x0 = r.x / factor;
    const auto y0 = r.y / factor;
    const auto x1 = (r.right() + factor - 1) / factor;
    const auto y1 = (r.bottom() + factor - 1) / factor;
    return Rect{x0, y0, x1 - x0, y1 - y0};
}

Episode ingest_android(const fs::path& dir, const IngestOptions& opt) {
    Episode ep;
    const auto j = json::parse(read_file(dir / "episode.json"));
    Trajectory t;
    t.id = json_string(j, "episode_id");
    if (t.id.empty()) throw Skip("missing episode_id");
    t.platform = Platform::android;
    const auto app = text::trim(json_string(j, "app"));
    if (!app.empty()) t.app_or_site = app;

    std::string label = text::trim(json_string(j, "goal"));
    if (label.empty()) throw Skip("empty goal label");
    if (opt.cleaner != nullptr) {
        gateway::CallRecorder recorder;
        try {
            t.gold_intent_raw = label;
            label = clean_label(label, *opt.cleaner, t.id, &recorder);
        } catch (const InvalidArgument& e) {
            ep.diagnostics.push_back({dir.filename().string(), std::string(e.what()) + "; raw label kept", false});
        } catch (const BackendError& e) {
            for (auto& c : recorder.records()) ep.calls.push_back(std::move(c));
            throw Skip(e.what());
        }
        for (auto& c : recorder.records()) ep.calls.push_back(std::move(c));
    }
    t.gold_intent = restructure_label(label, t.app_or_site);

    const auto& actions = j.at("actions");
    const json screenshots = j.value("screenshots", json::array());
    const json trees = j.value("accessibility_trees", json::array());
    if (screenshots.size() < actions.size()) {
        throw Skip("episode lists " + std::to_string(actions.size()) + " actions but " +
                   std::to_string(screenshots.size()) + " screenshots");
    }
    for (std::size_t i = 0; i < actions.size(); ++i) {
        const int k = static_cast<int>(i + 1);
        Interaction step;
        step.index = k;
        std::optional<Point> point;
        step.action = android_action(actions[i], point);
        auto image = load_screenshot(dir, screenshots[i].is_string() ? screenshots[i].get<std::string>() : "", k);

        std::optional<Rect> box;
        if (point) {
            if (i < trees.size() && !trees[i].is_null()) {
                if (auto el = resolve_element(a11y_from_json(trees[i]), *point)) {
                    step.action.element_name = el->name;
                    box = el->bbox;
                }
            }
            if (!box) {
                box = intersection(Rect{point->x - kTapBox / 2, point->y - kTapBox / 2, kTapBox, kTapBox},
                                   Rect{0, 0, image.width(), image.height()});
                if (box->empty()) box.reset();
                ep.diagnostics.push_back({dir.filename().string(),
                                          "step " + std::to_string(k) + ": no named element at tap point", false});
            }
        }
        if (box) {
            const auto clipped = intersection(*box, Rect{0, 0, image.width(), image.height()});
            if (!clipped.empty()) {
                image = highlight_element(image, clipped);
                step.action.element_bbox = scale_down(clipped, kAndroidDownsizeFactor);
            }
        }
        image = downsize(image, kAndroidDownsizeFactor);
        step.screenshot = store_screenshot(opt, t.id, k, image);
        t.steps.push_back(std::move(step));
    }
    ep.trajectory = std::move(t);
    return ep;
}

}  // namespace

SourceLayout parse_source_layout(std::string_view name) {
    const auto n = text::to_lower(name);
    if (n == "mind2web" || n == "web") return SourceLayout::mind2web;
    if (n == "androidcontrol" || n == "android") return SourceLayout::androidcontrol;
    throw InvalidArgument("unknown source layout '" + std::string(name) + "' (expected mind2web or androidcontrol)");
}

std::string_view to_string(SourceLayout layout) noexcept {
    return layout == SourceLayout::mind2web ? "mind2web" : "androidcontrol";
}

std::string safe_component(std::string_view id) {
    std::string out;
    for (char c : id) {
        const bool ok = std::isalnum(static_cast<unsigned char>(c)) != 0 || c == '-' || c == '_' || c == '.';
        out += ok ? c : '_';
    }
    if (out.empty() || out == "." || out == "..") out = "_" + out;
    return out;
}

std::size_t IngestResult::skipped() const {
    return static_cast<std::size_t>(
        std::count_if(diagnostics.begin(), diagnostics.end(), [](const auto& d) { return d.fatal; }));
}

IngestResult ingest_source(const IngestOptions& opt) {
    if (!fs::is_directory(opt.source_dir)) {
        throw InvalidArgument("source directory not found: " + opt.source_dir.string());
    }
    std::vector<fs::path> dirs;
    for (const auto& entry : fs::directory_iterator(opt.source_dir)) {
        if (entry.is_directory() && fs::exists(entry.path() / "episode.json")) dirs.push_back(entry.path());
    }
    std::sort(dirs.begin(), dirs.end());

    std::vector<Episode> episodes(dirs.size());
    parallel_for(dirs.size(), opt.parallelism, [&](std::size_t i) {
        const auto name = dirs[i].filename().string();
        try {
            episodes[i] = opt.layout == SourceLayout::mind2web ? ingest_web(dirs[i], opt)
                                                               : ingest_android(dirs[i], opt);
        } catch (const Skip& e) {
            episodes[i].diagnostics.push_back({name, e.what(), true});
        } catch (const std::exception& e) {
            episodes[i].diagnostics.push_back({name, e.what(), true});
        }
        auto& ep = episodes[i];
        if (ep.trajectory) {
            ValidateOptions vo;
            vo.image_root = opt.out_dir;
            const auto violations = validate_trajectory(*ep.trajectory, vo);
            if (!violations.empty()) {
                for (const auto& v : violations) ep.diagnostics.push_back({name, v, true});
                ep.trajectory.reset();
            }
        }
    });

    IngestResult out;
    std::vector<std::string> seen;
    for (std::size_t i = 0; i < episodes.size(); ++i) {
        auto& ep = episodes[i];
        for (auto& d : ep.diagnostics) out.diagnostics.push_back(std::move(d));
        for (auto& c : ep.calls) out.calls.push_back(std::move(c));
        if (!ep.trajectory) continue;
        if (std::find(seen.begin(), seen.end(), ep.trajectory->id) != seen.end()) {
            out.diagnostics.push_back({dirs[i].filename().string(), "duplicate trajectory id '" + ep.trajectory->id + "'", true});
            continue;
        }
        seen.push_back(ep.trajectory->id);
        out.trajectories.push_back(std::move(*ep.trajectory));
    }
    return out;
}

}  // namespace intentflow::ingest
