#include "intentflow/core/serialize.hpp"

#include <fstream>
#include <sstream>

#include "intentflow/core/digest.hpp"
#include "intentflow/core/error.hpp"
#include "intentflow/core/text.hpp"

namespace intentflow {

namespace {

template <typename T>
void put_optional(json& j, const char* key, const std::optional<T>& v) {
    if (v) j[key] = *v;
}

template <typename T>
void get_optional(const json& j, const char* key, std::optional<T>& out) {
    auto it = j.find(key);
    if (it == j.end() || it->is_null()) {
        out.reset();
    } else {
        out = it->template get<T>();
    }
}

template <typename T>
T get_or(const json& j, const char* key, T fallback) {
    auto it = j.find(key);
    if (it == j.end() || it->is_null()) return fallback;
    return it->template get<T>();
}

}  // namespace

void to_json(json& j, const Rect& r) {
    j = json{{"x", r.x}, {"y", r.y}, {"width", r.width}, {"height", r.height}};
}

void from_json(const json& j, Rect& r) {
    if (j.is_array()) {
        if (j.size() != 4) throw ParseError("bbox array must have 4 entries [x, y, width, height]");
        r = Rect{j[0].get<std::int64_t>(), j[1].get<std::int64_t>(), j[2].get<std::int64_t>(),
                 j[3].get<std::int64_t>()};
        return;
    }
    r.x = j.at("x").get<std::int64_t>();
    r.y = j.at("y").get<std::int64_t>();
    r.width = j.at("width").get<std::int64_t>();
    r.height = j.at("height").get<std::int64_t>();
}

void to_json(json& j, const ActionRecord& a) {
    j = json::object();
    j["kind"] = a.kind_name();
    put_optional(j, "element_name", a.element_name);
    put_optional(j, "element_bbox", a.element_bbox);
    put_optional(j, "typed_text", a.typed_text);
}

void from_json(const json& j, ActionRecord& a) {
    a = make_action(j.at("kind").get<std::string>());
    get_optional(j, "element_name", a.element_name);
    get_optional(j, "element_bbox", a.element_bbox);
    get_optional(j, "typed_text", a.typed_text);
}

void to_json(json& j, const ImageRef& r) {
    j = json::object();
    if (!r.path.empty()) j["path"] = r.path;
    if (!r.png.empty()) j["png_base64"] = base64_encode(r.png);
}

void from_json(const json& j, ImageRef& r) {
    if (j.is_string()) {
        r.path = j.get<std::string>();
        r.png.clear();
        return;
    }
    r.path = get_or<std::string>(j, "path", "");
    r.png = base64_decode(get_or<std::string>(j, "png_base64", ""));
}

void to_json(json& j, const Interaction& i) {
    j = json::object();
    j["index"] = i.index;
    j["screenshot"] = i.screenshot;
    j["action"] = i.action;
    put_optional(j, "original_index", i.original_index);
}

void from_json(const json& j, Interaction& i) {
    i.index = j.at("index").get<int>();
    i.screenshot = j.at("screenshot").get<ImageRef>();
    i.action = j.at("action").get<ActionRecord>();
    get_optional(j, "original_index", i.original_index);
}

void to_json(json& j, const IntentStatement& s) {
    j = json::object();
    j["text"] = s.text;
    put_optional(j, "platform_prefix", s.platform_prefix);
}

void from_json(const json& j, IntentStatement& s) {
    s.text = j.at("text").get<std::string>();
    get_optional(j, "platform_prefix", s.platform_prefix);
}

void to_json(json& j, const Trajectory& t) {
    j = json::object();
    j["id"] = t.id;
    j["platform"] = std::string(to_string(t.platform));
    put_optional(j, "app_or_site", t.app_or_site);
    j["steps"] = t.steps;
    j["gold_intent"] = t.gold_intent;
    put_optional(j, "gold_intent_raw", t.gold_intent_raw);
}

void from_json(const json& j, Trajectory& t) {
    t.id = j.at("id").get<std::string>();
    t.platform = parse_platform(j.at("platform").get<std::string>());
    get_optional(j, "app_or_site", t.app_or_site);
    t.steps = j.at("steps").get<std::vector<Interaction>>();
    t.gold_intent = j.at("gold_intent").get<IntentStatement>();
    get_optional(j, "gold_intent_raw", t.gold_intent_raw);
}

void to_json(json& j, const InteractionSummary& s) {
    j = json::object();
    j["step_index"] = s.step_index;
    j["screen_context"] = s.screen_context;
    j["user_actions"] = s.user_actions;
    j["speculative_intent"] = s.speculative_intent;
    if (s.parse_fallback) j["parse_fallback"] = true;
}

void from_json(const json& j, InteractionSummary& s) {
    s.step_index = j.at("step_index").get<int>();
    s.screen_context = get_or<std::vector<std::string>>(j, "screen_context", {});
    s.user_actions = get_or<std::vector<std::string>>(j, "user_actions", {});
    s.speculative_intent = get_or<std::vector<std::string>>(j, "speculative_intent", {});
    s.parse_fallback = get_or<bool>(j, "parse_fallback", false);
}

void to_json(json& j, const AblationConfig& c) {
    j = json{{"use_context_window", c.use_context_window},
             {"structured_summaries", c.structured_summaries},
             {"refine_labels", c.refine_labels},
             {"finetuned_stage2", c.finetuned_stage2},
             {"max_steps", c.max_steps}};
}

void from_json(const json& j, AblationConfig& c) {
    AblationConfig d;
    c.use_context_window = get_or<bool>(j, "use_context_window", d.use_context_window);
    c.structured_summaries = get_or<bool>(j, "structured_summaries", d.structured_summaries);
    c.refine_labels = get_or<bool>(j, "refine_labels", d.refine_labels);
    c.finetuned_stage2 = get_or<bool>(j, "finetuned_stage2", d.finetuned_stage2);
    c.max_steps = get_or<int>(j, "max_steps", d.max_steps);
}

void to_json(json& j, const CallRecord& c) {
    j = json::object();
    j["call_role"] = c.call_role;
    j["template_id"] = c.template_id;
    put_optional(j, "step_index", c.step_index);
    j["input_tokens"] = c.input_tokens ? json(*c.input_tokens) : json(nullptr);
    j["output_tokens"] = c.output_tokens ? json(*c.output_tokens) : json(nullptr);
    j["attempts"] = c.attempts;
    j["end_of_session"] = c.end_of_session;
    j["image_count"] = c.image_count;
    j["request_text"] = c.request_text;
}

void from_json(const json& j, CallRecord& c) {
    c.call_role = j.at("call_role").get<std::string>();
    c.template_id = get_or<std::string>(j, "template_id", "");
    get_optional(j, "step_index", c.step_index);
    get_optional(j, "input_tokens", c.input_tokens);
    get_optional(j, "output_tokens", c.output_tokens);
    c.attempts = get_or<int>(j, "attempts", 1);
    c.end_of_session = get_or<bool>(j, "end_of_session", false);
    c.image_count = get_or<int>(j, "image_count", 0);
    c.request_text = get_or<std::string>(j, "request_text", "");
}

void to_json(json& j, const PipelineTrace& t) {
    j = json::object();
    j["trajectory_id"] = t.trajectory_id;
    j["method"] = std::string(to_string(t.method));
    j["config"] = t.config;
    j["seed"] = t.seed;
    j["retained_steps"] = t.retained_steps;
    j["summaries"] = t.summaries;
    j["raw_summaries"] = t.raw_summaries;
    j["predicted_intent"] = t.predicted_intent ? json(*t.predicted_intent) : json(nullptr);
    j["calls"] = t.calls;
    j["warnings"] = t.warnings;
    j["error"] = t.error ? json(*t.error) : json(nullptr);
}

void from_json(const json& j, PipelineTrace& t) {
    t.trajectory_id = j.at("trajectory_id").get<std::string>();
    t.method = parse_method(j.at("method").get<std::string>());
    t.config = get_or<AblationConfig>(j, "config", {});
    t.seed = get_or<std::uint64_t>(j, "seed", 0);
    t.retained_steps = get_or<std::vector<int>>(j, "retained_steps", {});
    t.summaries = get_or<std::vector<InteractionSummary>>(j, "summaries", {});
    t.raw_summaries = get_or<std::vector<InteractionSummary>>(j, "raw_summaries", {});
    get_optional(j, "predicted_intent", t.predicted_intent);
    t.calls = get_or<std::vector<CallRecord>>(j, "calls", {});
    t.warnings = get_or<std::vector<std::string>>(j, "warnings", {});
    get_optional(j, "error", t.error);
}

std::string to_jsonl_line(const Trajectory& t) {
    return json(t).dump();
}

Trajectory trajectory_from_jsonl_line(std::string_view line) {
    try {
        return json::parse(line).get<Trajectory>();
    } catch (const json::exception& e) {
        throw ParseError(e.what());
    }
}

DatasetLoadResult read_trajectory_jsonl(const std::filesystem::path& file) {
    std::ifstream in(file);
    if (!in) throw Error("cannot open dataset " + file.string());
    DatasetLoadResult result;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (text::trim(line).empty()) continue;
        try {
            result.trajectories.push_back(trajectory_from_jsonl_line(line));
        } catch (const Error& e) {
            result.errors.push_back("line " + std::to_string(lineno) + ": " + e.what());
        }
    }
    return result;
}

void write_trajectory_jsonl(const std::filesystem::path& file,
                            const std::vector<Trajectory>& trajectories) {
    std::string out;
    for (const auto& t : trajectories) {
        out += to_jsonl_line(t);
        out += '\n';
    }
    write_file(file, out);
}

std::string trace_to_string(const PipelineTrace& trace) {
    return json(trace).dump(2) + "\n";
}

PipelineTrace trace_from_string(std::string_view text) {
    try {
        return json::parse(text).get<PipelineTrace>();
    } catch (const json::exception& e) {
        throw ParseError(e.what());
    }
}

std::string read_file(const std::filesystem::path& file) {
    std::ifstream in(file, std::ios::binary);
    if (!in) throw Error("cannot open " + file.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const std::filesystem::path& file, std::string_view contents) {
    if (file.has_parent_path()) std::filesystem::create_directories(file.parent_path());
    std::ofstream out(file, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write " + file.string());
    out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
}

}  // namespace intentflow
