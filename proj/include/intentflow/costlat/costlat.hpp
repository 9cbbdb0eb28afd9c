#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "intentflow/core/serialize.hpp"
#include "intentflow/core/types.hpp"

namespace intentflow::costlat {

/// USD per million runs = input_rate * input_tokens + output_rate * output_tokens.
struct PriceModel {
    double input_rate = 0.1;
    double output_rate = 0.4;

    void validate() const;
};

/// Seconds until the answer is available after the last user interaction.
struct LatencyModel {
    double ttft = 0.2;
    double output_tokens_per_second = 550.0;
    // Each sequential end-of-session call pays its own time to first token.
    bool ttft_per_call = true;

    void validate() const;
};

struct ModelsConfig {
    PriceModel price;
    LatencyModel latency;
};

/// {"price": {"input_rate", "output_rate"},
///  "latency": {"ttft_s", "output_tokens_per_second", "ttft_per_call"}};
/// missing keys keep their defaults.
ModelsConfig models_from_json(const json& j);
json to_json(const ModelsConfig& m);

double price(std::int64_t input_tokens, std::int64_t output_tokens, const PriceModel& m = {});

/// ttft * calls (or ttft once when !ttft_per_call) + tokens / rate.
double latency(std::int64_t end_of_session_output_tokens, const LatencyModel& m = {}, int end_of_session_calls = 1);

struct CostLatencyEstimate {
    std::int64_t total_input_tokens = 0;
    std::int64_t total_output_tokens = 0;
    double price_per_million_runs_usd = 0.0;
    double end_of_session_latency_s = 0.0;
    std::int64_t end_of_session_output_tokens = 0;
    int end_of_session_calls = 0;
};

/// Price over every recorded call; latency over the end-of-session calls.
/// Throws InvalidArgument for a trace without calls or with calls that lack
/// token counts (the message lists them).
CostLatencyEstimate estimate_trace(const PipelineTrace& trace, const ModelsConfig& models = {});

/// One row of a declarative pipeline shape.
struct ShapeRow {
    std::string name;
    std::int64_t input_tokens = 0;
    std::int64_t output_tokens = 0;
    std::int64_t end_of_session_output_tokens = 0;
    int end_of_session_calls = 1;
    std::optional<double> reported_price;
    std::optional<double> reported_latency;
};

/// {"rows": [{"name", "input_tokens", "output_tokens",
///   "end_of_session_output_tokens", "end_of_session_calls",
///   "reported_price", "reported_latency"}]} or the bare array.
/// Throws InvalidArgument for an empty or malformed spec.
std::vector<ShapeRow> parse_shape_spec(const json& j);

struct CostRow {
    std::string name;
    double input_tokens = 0;
    double output_tokens = 0;
    double end_of_session_output_tokens = 0;
    double end_of_session_calls = 0;
    double price = 0;
    double latency = 0;
    std::optional<double> reported_price;
    std::optional<double> reported_latency;
    std::size_t traces = 0;  // 0 for shape rows
    std::vector<std::string> notes;
};

/// Tolerances for comparing computed values against reported ones, which are
/// given to one (price) and two (latency) decimals.
inline constexpr double kPriceTolerance = 0.05 + 1e-9;
inline constexpr double kLatencyTolerance = 0.005 + 1e-9;

CostRow evaluate_shape(const ShapeRow& row, const ModelsConfig& models);

/// One row per method, averaging per-trace token counts, price and latency.
/// Traces that cannot be estimated are listed in `skipped`.
std::vector<CostRow> rows_from_traces(const std::vector<PipelineTrace>& traces, const ModelsConfig& models,
                                      std::vector<std::string>& skipped);

std::string render_cost_table(const std::vector<CostRow>& rows);
json cost_table_json(const std::vector<CostRow>& rows);

}  // namespace intentflow::costlat
