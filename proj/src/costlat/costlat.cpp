#include "intentflow/costlat/costlat.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>

#include "intentflow/core/error.hpp"

namespace intentflow::costlat {

void PriceModel::validate() const {
    if (!(input_rate > 0) || !(output_rate > 0)) throw ConfigError("price rates must be > 0");
}

void LatencyModel::validate() const {
    if (!(ttft >= 0)) throw ConfigError("ttft must be >= 0");
    if (!(output_tokens_per_second > 0)) throw ConfigError("output_tokens_per_second must be > 0");
}

ModelsConfig models_from_json(const json& j) {
    ModelsConfig m;
    try {
        if (j.contains("price")) {
            const auto& p = j["price"];
            m.price.input_rate = p.value("input_rate", m.price.input_rate);
            m.price.output_rate = p.value("output_rate", m.price.output_rate);
        }
        if (j.contains("latency")) {
            const auto& l = j["latency"];
            m.latency.ttft = l.value("ttft_s", m.latency.ttft);
            m.latency.output_tokens_per_second = l.value("output_tokens_per_second", m.latency.output_tokens_per_second);
            m.latency.ttft_per_call = l.value("ttft_per_call", m.latency.ttft_per_call);
        }
    } catch (const json::exception& e) {
        throw ConfigError(std::string("models config: ") + e.what());
    }
    m.price.validate();
    m.latency.validate();
    return m;
}

json to_json(const ModelsConfig& m) {
    json j;
    j["price"] = {{"input_rate", m.price.input_rate}, {"output_rate", m.price.output_rate}};
    j["latency"] = {{"ttft_s", m.latency.ttft},
                    {"output_tokens_per_second", m.latency.output_tokens_per_second},
                    {"ttft_per_call", m.latency.ttft_per_call}};
    return j;
}

double price(std::int64_t input_tokens, std::int64_t output_tokens, const PriceModel& m) {
    if (input_tokens < 0 || output_tokens < 0) throw InvalidArgument("token counts must be >= 0");
    return m.input_rate * static_cast<double>(input_tokens) + m.output_rate * static_cast<double>(output_tokens);
}

double latency(std::int64_t end_of_session_output_tokens, const LatencyModel& m, int end_of_session_calls) {
    if (end_of_session_output_tokens < 0) throw InvalidArgument("token counts must be >= 0");
    if (end_of_session_calls < 1) throw InvalidArgument("at least one end-of-session call is required");
    const int ttft_count = m.ttft_per_call ? end_of_session_calls : 1;
    return m.ttft * ttft_count + static_cast<double>(end_of_session_output_tokens) / m.output_tokens_per_second;
}

CostLatencyEstimate estimate_trace(const PipelineTrace& trace, const ModelsConfig& models) {
    if (trace.calls.empty()) throw InvalidArgument("trace '" + trace.trajectory_id + "' records no calls");
    std::string missing;
    CostLatencyEstimate e;
    for (std::size_t i = 0; i < trace.calls.size(); ++i) {
        const auto& c = trace.calls[i];
        if (!c.input_tokens || !c.output_tokens || *c.input_tokens < 0 || *c.output_tokens < 0) {
            if (!missing.empty()) missing += ", ";
            missing += "#" + std::to_string(i + 1) + " " + c.call_role;
            if (c.step_index) missing += " (step " + std::to_string(*c.step_index) + ")";
            continue;
        }
        e.total_input_tokens += *c.input_tokens;
        e.total_output_tokens += *c.output_tokens;
        if (c.end_of_session) {
            e.end_of_session_output_tokens += *c.output_tokens;
            ++e.end_of_session_calls;
        }
    }
    if (!missing.empty()) {
        throw InvalidArgument("trace '" + trace.trajectory_id + "' has calls without token counts: " + missing);
    }
    e.price_per_million_runs_usd = price(e.total_input_tokens, e.total_output_tokens, models.price);
    e.end_of_session_latency_s =
        e.end_of_session_calls == 0
            ? 0.0
            : latency(e.end_of_session_output_tokens, models.latency, e.end_of_session_calls);
    return e;
}

std::vector<ShapeRow> parse_shape_spec(const json& j) {
    const json* rows = &j;
    if (j.is_object()) {
        if (!j.contains("rows")) throw InvalidArgument("shape spec needs a \"rows\" array");
        rows = &j["rows"];
    }
    if (!rows->is_array() || rows->empty()) throw InvalidArgument("shape spec has no rows");
    std::vector<ShapeRow> out;
    for (const auto& r : *rows) {
        try {
            ShapeRow s;
            s.name = r.at("name").get<std::string>();
            s.input_tokens = r.at("input_tokens").get<std::int64_t>();
            s.output_tokens = r.at("output_tokens").get<std::int64_t>();
            s.end_of_session_output_tokens = r.value("end_of_session_output_tokens", s.output_tokens);
            s.end_of_session_calls = r.value("end_of_session_calls", 1);
            if (r.contains("reported_price") && !r["reported_price"].is_null()) {
                s.reported_price = r["reported_price"].get<double>();
            }
            if (r.contains("reported_latency") && !r["reported_latency"].is_null()) {
                s.reported_latency = r["reported_latency"].get<double>();
            }
            if (s.input_tokens < 0 || s.output_tokens < 0 || s.end_of_session_output_tokens < 0) {
                throw InvalidArgument("row '" + s.name + "': negative token count");
            }
            if (s.end_of_session_calls < 1) throw InvalidArgument("row '" + s.name + "': end_of_session_calls < 1");
            out.push_back(std::move(s));
        } catch (const json::exception& e) {
            throw InvalidArgument(std::string("malformed shape row: ") + e.what());
        }
    }
    return out;
}

namespace {

std::string fmt(const char* f, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, f, v);
    return buf;
}

void compare(CostRow& row) {
    if (row.reported_price && std::fabs(row.price - *row.reported_price) > kPriceTolerance) {
        row.notes.push_back(row.name + ": reported price " + fmt("%g", *row.reported_price) +
                            " does not match the price formula on its own token counts (" +
                            fmt("%.1f", row.price) + "); the computed value is shown");
    }
    if (row.reported_latency && std::fabs(row.latency - *row.reported_latency) > kLatencyTolerance) {
        row.notes.push_back(row.name + ": reported latency " + fmt("%g", *row.reported_latency) +
                            " s differs from the computed " + fmt("%.3f", row.latency) + " s");
    }
}

}  // namespace

CostRow evaluate_shape(const ShapeRow& s, const ModelsConfig& models) {
    CostRow row;
    row.name = s.name;
    row.input_tokens = static_cast<double>(s.input_tokens);
    row.output_tokens = static_cast<double>(s.output_tokens);
    row.end_of_session_output_tokens = static_cast<double>(s.end_of_session_output_tokens);
    row.end_of_session_calls = s.end_of_session_calls;
    row.price = price(s.input_tokens, s.output_tokens, models.price);
    row.latency = latency(s.end_of_session_output_tokens, models.latency, s.end_of_session_calls);
    row.reported_price = s.reported_price;
    row.reported_latency = s.reported_latency;
    compare(row);
    return row;
}

std::vector<CostRow> rows_from_traces(const std::vector<PipelineTrace>& traces, const ModelsConfig& models,
                                      std::vector<std::string>& skipped) {
    std::map<Method, CostRow> by_method;
    for (const auto& t : traces) {
        CostLatencyEstimate e;
        try {
            e = estimate_trace(t, models);
        } catch (const InvalidArgument& err) {
            skipped.emplace_back(err.what());
            continue;
        }
        auto& row = by_method[t.method];
        row.name = std::string(to_string(t.method));
        row.input_tokens += static_cast<double>(e.total_input_tokens);
        row.output_tokens += static_cast<double>(e.total_output_tokens);
        row.end_of_session_output_tokens += static_cast<double>(e.end_of_session_output_tokens);
        row.end_of_session_calls += e.end_of_session_calls;
        row.price += e.price_per_million_runs_usd;
        row.latency += e.end_of_session_latency_s;
        ++row.traces;
    }
    std::vector<CostRow> out;
    for (auto& [method, row] : by_method) {
        const auto n = static_cast<double>(row.traces);
        row.input_tokens /= n;
        row.output_tokens /= n;
        row.end_of_session_output_tokens /= n;
        row.end_of_session_calls /= n;
        row.price /= n;
        row.latency /= n;
        out.push_back(std::move(row));
    }
    return out;
}

std::string render_cost_table(const std::vector<CostRow>& rows) {
    std::string out;
    char buf[512];
    int width = 28;
    for (const auto& r : rows) width = std::max(width, static_cast<int>(r.name.size()));
    std::snprintf(buf, sizeof buf, "%-*s %10s %10s %14s %10s\n", width, "Method", "Input tok", "Output tok",
                  "USD/1M runs", "Latency s");
    out += buf;
    for (const auto& r : rows) {
        std::string price = fmt("%.1f", r.price);
        if (r.reported_price && std::fabs(r.price - *r.reported_price) > kPriceTolerance) price += "*";
        std::snprintf(buf, sizeof buf, "%-*s %10.0f %10.0f %14s %10.2f\n", width, r.name.c_str(), r.input_tokens,
                      r.output_tokens, price.c_str(), r.latency);
        out += buf;
    }
    bool header = false;
    for (const auto& r : rows) {
        for (const auto& n : r.notes) {
            if (!header) out += "\nNotes:\n";
            header = true;
            out += "  * " + n + "\n";
        }
    }
    return out;
}

json cost_table_json(const std::vector<CostRow>& rows) {
    json arr = json::array();
    for (const auto& r : rows) {
        json j;
        j["name"] = r.name;
        j["input_tokens"] = r.input_tokens;
        j["output_tokens"] = r.output_tokens;
        j["end_of_session_output_tokens"] = r.end_of_session_output_tokens;
        j["end_of_session_calls"] = r.end_of_session_calls;
        j["price_per_million_runs_usd"] = r.price;
        j["end_of_session_latency_s"] = r.latency;
        j["reported_price"] = r.reported_price ? json(*r.reported_price) : json(nullptr);
        j["reported_latency"] = r.reported_latency ? json(*r.reported_latency) : json(nullptr);
        if (r.traces) j["traces"] = r.traces;
        j["notes"] = r.notes;
        arr.push_back(std::move(j));
    }
    return json{{"rows", arr}};
}

}  // namespace intentflow::costlat
