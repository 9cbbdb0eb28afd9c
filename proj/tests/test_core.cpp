#include <gtest/gtest.h>

#include <set>

#include "fixtures.hpp"
#include "intentflow/core/digest.hpp"
#include "intentflow/core/error.hpp"
#include "intentflow/core/parallel.hpp"
#include "intentflow/core/serialize.hpp"
#include "intentflow/core/text.hpp"
#include "intentflow/core/validate.hpp"

using namespace intentflow;

TEST(Validate, WellFormedTrajectoryHasNoViolations) {
    EXPECT_TRUE(validate_trajectory(fixtures::make_trajectory("t", 3)).empty());
}

TEST(Validate, GapInStepIndicesIsReportedAtItsPosition) {
    auto t = fixtures::make_trajectory("t", 2);
    t.steps[1].index = 3;
    const auto v = validate_trajectory(t);
    ASSERT_EQ(v.size(), 1u);
    EXPECT_EQ(v[0], "non-contiguous step index at position 2");
}

TEST(Validate, ClickWithoutTargetNamesTheStep) {
    auto t = fixtures::make_trajectory("t", 3);
    t.steps[1].action = make_action("click");
    const auto v = validate_trajectory(t);
    ASSERT_EQ(v.size(), 1u);
    EXPECT_NE(v[0].find("step 2"), std::string::npos);
    EXPECT_NE(v[0].find("click requires"), std::string::npos);
}

TEST(Validate, TypeTextNeedsText) {
    auto a = make_action("type_text");
    EXPECT_EQ(validate_action(a).size(), 1u);
    a.typed_text = "";
    EXPECT_TRUE(validate_action(a).empty());
}

TEST(Validate, AppNameInsideGoldTextIsAViolation) {
    auto t = fixtures::make_trajectory("t", 1);
    t.app_or_site = "DoorDash";
    t.gold_intent.text = "order pizza on DoorDash";
    EXPECT_EQ(validate_trajectory(t).size(), 1u);
    t.gold_intent.text = "order pizza";
    EXPECT_TRUE(validate_trajectory(t).empty());
}

TEST(Validate, UndecodableInlineScreenshot) {
    auto t = fixtures::make_trajectory("t", 1);
    t.steps[0].screenshot.png = {1, 2, 3};
    const auto v = validate_trajectory(t);
    ASSERT_EQ(v.size(), 1u);
    EXPECT_NE(v[0].find("step 1: screenshot"), std::string::npos);
}

TEST(Validate, EmptyGoldAndNoSteps) {
    Trajectory t;
    t.id = "x";
    const auto v = validate_trajectory(t);
    EXPECT_EQ(v.size(), 2u);
}

TEST(PlatformPrefix, SplitsAtFirstDelimiter) {
    auto s = split_platform_prefix("DoorDash; order an olive pizza");
    EXPECT_EQ(s.platform_prefix, "DoorDash");
    EXPECT_EQ(s.text, "order an olive pizza");

    s = split_platform_prefix("book a flight to LAX");
    EXPECT_FALSE(s.platform_prefix);
    EXPECT_EQ(s.text, "book a flight to LAX");

    s = split_platform_prefix("a; b; c");
    EXPECT_EQ(s.platform_prefix, "a");
    EXPECT_EQ(s.text, "b; c");

    EXPECT_THROW(split_platform_prefix(""), InvalidArgument);
}

TEST(PlatformPrefix, IdempotentOnTextWithoutDelimiter) {
    for (const std::string label : {"x; y", "plain text", "a;b", "s; t; u"}) {
        const auto once = split_platform_prefix(label);
        if (once.text.find("; ") != std::string::npos) continue;
        const auto twice = split_platform_prefix(once.text);
        EXPECT_EQ(twice.text, once.text);
        EXPECT_FALSE(twice.platform_prefix);
    }
}

TEST(PlatformPrefix, EvaluationTextNeverContainsPrefix) {
    const auto s = split_platform_prefix("Expedia; book a hotel in Rome");
    EXPECT_EQ(evaluation_text(s), "book a hotel in Rome");
    EXPECT_EQ(evaluation_text(s).find("Expedia"), std::string::npos);
}

TEST(Serialize, TrajectoryRoundTripProperty) {
    Rng rng(11);
    for (int i = 0; i < 50; ++i) {
        auto t = fixtures::make_trajectory("rt-" + std::to_string(i), static_cast<int>(rng.between(1, 8)), rng.below(50));
        if (i % 3 == 0) t.app_or_site = "Site" + std::to_string(i);
        if (i % 4 == 0) t.gold_intent.platform_prefix = "Site" + std::to_string(i);
        if (i % 5 == 0) t.gold_intent_raw = "raw label " + std::to_string(i);
        if (i % 2 == 0) t.platform = Platform::android;
        if (i % 6 == 0) {
            t.steps[0].screenshot = ImageRef{"screens/" + std::to_string(i) + ".png", {}};
            t.steps[0].original_index = 4;
        }
        if (i % 7 == 0) t.steps.back().action = make_action("long_press");
        const auto line = to_jsonl_line(t);
        EXPECT_EQ(line.find('\n'), std::string::npos);
        EXPECT_EQ(trajectory_from_jsonl_line(line), t);
        EXPECT_EQ(to_jsonl_line(trajectory_from_jsonl_line(line)), line);
    }
}

TEST(Serialize, UnknownActionKindIsPreserved) {
    auto t = fixtures::make_trajectory("u", 1);
    t.steps[0].action = make_action("double_tap");
    const auto back = trajectory_from_jsonl_line(to_jsonl_line(t));
    EXPECT_EQ(back.steps[0].action.kind, ActionKind::other);
    EXPECT_EQ(back.steps[0].action.kind_name(), "double_tap");
}

TEST(Serialize, MalformedLinesAreReportedNotThrown) {
    fixtures::TempDir dir;
    const auto good = to_jsonl_line(fixtures::make_trajectory("g", 2));
    write_file(dir / "d.jsonl", good + "\n{not json\n\n" + good + "\n");
    const auto r = read_trajectory_jsonl(dir / "d.jsonl");
    EXPECT_EQ(r.trajectories.size(), 2u);
    ASSERT_EQ(r.errors.size(), 1u);
    EXPECT_EQ(r.errors[0].rfind("line 2:", 0), 0u);
}

TEST(Serialize, TraceRoundTrip) {
    PipelineTrace tr;
    tr.trajectory_id = "x";
    tr.method = Method::decomposed_latency_opt;
    tr.seed = 42;
    tr.retained_steps = {1, 3};
    InteractionSummary s;
    s.step_index = 1;
    s.screen_context = {"page"};
    s.user_actions = {"click"};
    s.speculative_intent = {"guess"};
    tr.raw_summaries = {s};
    s.speculative_intent.clear();
    tr.summaries = {s};
    tr.predicted_intent = IntentStatement{"do it", "App"};
    CallRecord c;
    c.call_role = "summarize";
    c.template_id = "summarize";
    c.step_index = 1;
    c.input_tokens = 10;
    c.output_tokens = 3;
    tr.calls = {c, CallRecord{}};
    tr.warnings = {"w"};
    const auto text = trace_to_string(tr);
    EXPECT_EQ(trace_from_string(text), tr);
    ASSERT_NE(tr.raw_summary_at(1), nullptr);
    EXPECT_EQ(tr.raw_summary_at(1)->speculative_intent.size(), 1u);
    EXPECT_TRUE(tr.summary_at(1)->speculative_intent.empty());
}

TEST(Types, ParseMethodAcceptsCliSpelling) {
    EXPECT_EQ(parse_method("decomposed-latency-opt"), Method::decomposed_latency_opt);
    EXPECT_EQ(parse_method("cot"), Method::cot);
    EXPECT_THROW(parse_method("magic"), InvalidArgument);
}

TEST(Types, RectGeometry) {
    Rect a{0, 0, 10, 10};
    Rect b{5, 5, 10, 10};
    EXPECT_EQ(intersection(a, b), (Rect{5, 5, 5, 5}));
    EXPECT_DOUBLE_EQ(intersection_over_union(a, b), 25.0 / 175.0);
    EXPECT_TRUE(a.contains(9, 9));
    EXPECT_FALSE(a.contains(10, 0));
}

TEST(Digest, KnownVectors) {
    EXPECT_EQ(sha256_hex("abc"), "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
    const std::vector<std::uint8_t> bytes = {'f', 'o', 'o', 'b', 'a'};
    EXPECT_EQ(base64_encode(bytes), "Zm9vYmE=");
    EXPECT_EQ(base64_decode("Zm9vYmE="), bytes);
    EXPECT_EQ(fnv1a64(""), 0xcbf29ce484222325ULL);
}

TEST(Digest, RngIsSeededAndBounded) {
    Rng a(5), b(5);
    for (int i = 0; i < 100; ++i) {
        const auto x = a.between(-3, 3);
        EXPECT_EQ(x, b.between(-3, 3));
        EXPECT_GE(x, -3);
        EXPECT_LE(x, 3);
    }
    EXPECT_NE(derive_seed(1, "a"), derive_seed(1, "b"));
    EXPECT_NE(derive_seed(1, "a", 1), derive_seed(1, "a", 2));
    EXPECT_EQ(derive_seed(9, "z", 3), derive_seed(9, "z", 3));
}

TEST(Text, Helpers) {
    EXPECT_EQ(text::trim("  a b \n"), "a b");
    EXPECT_EQ(text::single_line("a\r\nb\tc"), "a b c");
    std::string item;
    EXPECT_TRUE(text::strip_bullet("  12) thing", item));
    EXPECT_EQ(item, "thing");
    EXPECT_FALSE(text::strip_bullet("plain", item));
    EXPECT_EQ(text::ifind("Hello World", "world"), 6u);
}

TEST(Parallel, EveryIndexRunsOnceAndLowestErrorWins) {
    std::vector<int> hits(100, 0);
    parallel_for(100, 8, [&](std::size_t i) { hits[i]++; });
    for (int h : hits) EXPECT_EQ(h, 1);
    try {
        parallel_for(10, 4, [](std::size_t i) {
            if (i == 7 || i == 3) throw std::runtime_error(std::to_string(i));
        });
        FAIL();
    } catch (const std::runtime_error& e) {
        EXPECT_STREQ(e.what(), "3");
    }
}
