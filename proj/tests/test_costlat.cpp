#include <gtest/gtest.h>

#include <cmath>

#include "fixtures.hpp"
#include "intentflow/core/digest.hpp"
#include "intentflow/core/error.hpp"
#include "intentflow/costlat/costlat.hpp"
#include "intentflow/pipeline/methods.hpp"

using namespace intentflow;
using namespace intentflow::costlat;

namespace {

CallRecord call(std::string role, std::int64_t in, std::int64_t out, bool eos) {
    CallRecord c;
    c.call_role = std::move(role);
    c.template_id = c.call_role;
    c.input_tokens = in;
    c.output_tokens = out;
    c.end_of_session = eos;
    return c;
}

}  // namespace

TEST(Price, TableRows) {
    EXPECT_NEAR(price(1839, 20), 191.9, 1e-9);
    EXPECT_NEAR(price(1961, 127), 246.9, 1e-9);
    EXPECT_NEAR(price(2009, 514), 406.5, 1e-9);
    EXPECT_NEAR(price(2103, 622), 459.1, 1e-9);
    EXPECT_EQ(price(0, 0), 0.0);
    EXPECT_THROW(price(-1, 0), InvalidArgument);
}

TEST(Price, LinearProperty) {
    Rng rng(1);
    for (int i = 0; i < 200; ++i) {
        const auto a = rng.between(0, 5000), b = rng.between(0, 5000);
        const auto c = rng.between(0, 1000), d = rng.between(0, 1000);
        EXPECT_NEAR(price(a + b, c + d), price(a, c) + price(b, d), 1e-9);
    }
}

TEST(Latency, TableRows) {
    EXPECT_NEAR(latency(20), 0.24, 0.005);
    EXPECT_NEAR(latency(127), 0.43, 0.005);
    EXPECT_NEAR(latency(127), 0.2 + 127.0 / 550.0, 1e-12);
    EXPECT_DOUBLE_EQ(latency(0), 0.2);
    EXPECT_NEAR(latency(110, LatencyModel{}, 2), 0.6, 1e-12);
    LatencyModel once;
    once.ttft_per_call = false;
    EXPECT_NEAR(latency(110, once, 2), 0.4, 1e-12);
    EXPECT_THROW(latency(10, LatencyModel{}, 0), InvalidArgument);
}

TEST(Latency, MonotoneProperty) {
    double prev = -1;
    for (std::int64_t t = 0; t < 2000; t += 7) {
        const double v = latency(t);
        EXPECT_GE(v, prev);
        prev = v;
    }
}

TEST(Models, ValidationAndJson) {
    PriceModel p;
    p.input_rate = 0;
    EXPECT_THROW(p.validate(), Error);
    LatencyModel l;
    l.output_tokens_per_second = 0;
    EXPECT_THROW(l.validate(), Error);
    l = LatencyModel{};
    l.ttft = -0.1;
    EXPECT_THROW(l.validate(), Error);
    const auto m = models_from_json(json::parse(R"({"price":{"input_rate":0.2},"latency":{"ttft_s":0.5}})"));
    EXPECT_DOUBLE_EQ(m.price.input_rate, 0.2);
    EXPECT_DOUBLE_EQ(m.price.output_rate, 0.4);
    EXPECT_DOUBLE_EQ(m.latency.ttft, 0.5);
    EXPECT_DOUBLE_EQ(models_from_json(to_json(m)).latency.ttft, 0.5);
}

// Ledger written out by hand: three summaries, the last at end of session,
// then the fusion call.
//   input  = 600 + 610 + 620 + 173 = 2003
//   output =  40 +  45 +  50 +  12 =  147
//   price  = 0.1*2003 + 0.4*147 = 200.3 + 58.8 = 259.1
//   latency (2 eos calls, 62 tokens) = 0.4 + 62/550
TEST(EstimateTrace, MatchesHandLedger) {
    PipelineTrace t;
    t.method = Method::decomposed;
    t.calls = {call("summarize", 600, 40, false), call("summarize", 610, 45, false),
               call("summarize", 620, 50, true), call("fuse_intent", 173, 12, true)};
    const auto e = estimate_trace(t);
    EXPECT_EQ(e.total_input_tokens, 2003);
    EXPECT_EQ(e.total_output_tokens, 147);
    EXPECT_NEAR(e.price_per_million_runs_usd, 259.1, 1e-9);
    EXPECT_EQ(e.end_of_session_output_tokens, 62);
    EXPECT_EQ(e.end_of_session_calls, 2);
    EXPECT_NEAR(e.end_of_session_latency_s, 0.4 + 62.0 / 550.0, 1e-12);
}

TEST(EstimateTrace, LatencyOptimizedTotals) {
    PipelineTrace t;
    t.method = Method::decomposed_latency_opt;
    t.calls = {call("summarize", 1000, 250, false), call("summarize", 800, 242, false),
               call("fuse_intent", 209, 22, true)};
    const auto e = estimate_trace(t);
    EXPECT_EQ(e.total_input_tokens, 2009);
    EXPECT_EQ(e.total_output_tokens, 514);
    EXPECT_NEAR(e.price_per_million_runs_usd, 406.5, 1e-9);
    EXPECT_NEAR(e.end_of_session_latency_s, 0.24, 1e-12);
}

TEST(EstimateTrace, EmptyAndMissingTokensAreErrors) {
    PipelineTrace t;
    EXPECT_THROW(estimate_trace(t), InvalidArgument);
    auto missing = call("summarize", 1, 1, false);
    missing.output_tokens.reset();
    missing.step_index = 3;
    t.calls = {call("fuse_intent", 1, 1, true), missing};
    try {
        (void)estimate_trace(t);
        FAIL();
    } catch (const InvalidArgument& e) {
        EXPECT_NE(std::string(e.what()).find("summarize"), std::string::npos);
        EXPECT_NE(std::string(e.what()).find("step 3"), std::string::npos);
    }
}

TEST(EstimateTrace, TotalsEqualRecordedCallsProperty) {
    auto s1 = fixtures::make_stub_gateway();
    auto s2 = fixtures::make_stub_gateway();
    for (const auto& traj : fixtures::synthetic_corpus(8, 3)) {
        for (auto m : {Method::cot, Method::e2e, Method::decomposed, Method::decomposed_latency_opt}) {
            const auto tr = pipeline::run_method(m, traj, AblationConfig{}, pipeline::Stages{*s1.gateway, *s2.gateway}, 1);
            ASSERT_FALSE(tr.error);
            std::int64_t in = 0, out = 0;
            for (const auto& c : tr.calls) in += *c.input_tokens, out += *c.output_tokens;
            const auto e = estimate_trace(tr);
            EXPECT_EQ(e.total_input_tokens, in);
            EXPECT_EQ(e.total_output_tokens, out);
        }
    }
}

TEST(Shape, ParsesAndReproducesReportedRows) {
    const auto rows = parse_shape_spec(json::parse(read_file(std::filesystem::path(INTENTFLOW_SOURCE_DIR) /
                                                             "configs/cost_shape.json")));
    ASSERT_EQ(rows.size(), 4u);
    const ModelsConfig models;
    int discrepancies = 0;
    for (const auto& r : rows) {
        const auto c = evaluate_shape(r, models);
        EXPECT_LE(std::abs(c.latency - *r.reported_latency), kLatencyTolerance) << r.name;
        if (std::abs(c.price - *r.reported_price) > kPriceTolerance) {
            ++discrepancies;
            EXPECT_EQ(r.name, "Decomposed FT");
            EXPECT_NEAR(c.price, 459.1, 1e-9);
            ASSERT_EQ(c.notes.size(), 1u);
            EXPECT_NE(c.notes[0].find("459.1"), std::string::npos);
        } else {
            EXPECT_TRUE(c.notes.empty()) << r.name;
        }
    }
    EXPECT_EQ(discrepancies, 1);
}

TEST(Shape, RejectsEmptyAndMalformed) {
    EXPECT_THROW(parse_shape_spec(json::parse(R"({"rows":[]})")), InvalidArgument);
    EXPECT_THROW(parse_shape_spec(json::parse("[]")), InvalidArgument);
    EXPECT_THROW(parse_shape_spec(json::parse(R"([{"name":"x","input_tokens":"many"}])")), InvalidArgument);
    EXPECT_EQ(parse_shape_spec(json::parse(R"([{"name":"x","input_tokens":5,"output_tokens":1}])")).size(), 1u);
}

TEST(Shape, RenderedTableMarksMismatch) {
    const auto rows = parse_shape_spec(json::parse(read_file(std::filesystem::path(INTENTFLOW_SOURCE_DIR) /
                                                             "configs/cost_shape.json")));
    std::vector<CostRow> out;
    for (const auto& r : rows) out.push_back(evaluate_shape(r, ModelsConfig{}));
    const auto text = render_cost_table(out);
    EXPECT_NE(text.find("459.1*"), std::string::npos);
    EXPECT_NE(text.find("191.9"), std::string::npos);
    EXPECT_NE(text.find("Notes"), std::string::npos);
    EXPECT_EQ(cost_table_json(out)["rows"].size(), 4u);
}

TEST(Shape, RowsFromTracesAveragePerMethod) {
    PipelineTrace a, b, bad;
    a.method = b.method = Method::e2e;
    a.trajectory_id = "a";
    b.trajectory_id = "b";
    a.calls = {call("e2e", 1000, 10, true)};
    b.calls = {call("e2e", 2000, 30, true)};
    bad.trajectory_id = "bad";
    std::vector<std::string> skipped;
    const auto rows = rows_from_traces({a, b, bad}, ModelsConfig{}, skipped);
    ASSERT_EQ(rows.size(), 1u);
    EXPECT_DOUBLE_EQ(rows[0].input_tokens, 1500);
    EXPECT_DOUBLE_EQ(rows[0].output_tokens, 20);
    EXPECT_NEAR(rows[0].price, 158.0, 1e-9);
    EXPECT_EQ(rows[0].traces, 2u);
    EXPECT_EQ(skipped.size(), 1u);
}
