// Acceptance checks: one PASS/FAIL line per criterion, with runtime.
// Exit status is non-zero when any criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "fixtures.hpp"
#include "intentflow/core/digest.hpp"
#include "intentflow/core/serialize.hpp"
#include "intentflow/core/text.hpp"
#include "intentflow/core/validate.hpp"
#include "intentflow/costlat/costlat.hpp"
#include "intentflow/eval/bifact.hpp"
#include "intentflow/eval/funnel.hpp"
#include "intentflow/gateway/backend_config.hpp"
#include "intentflow/ingest/actions.hpp"
#include "intentflow/ingest/imageops.hpp"
#include "intentflow/ingest/labels.hpp"
#include "intentflow/pipeline/finetune.hpp"
#include "intentflow/pipeline/methods.hpp"

using namespace intentflow;
namespace fs = std::filesystem;

namespace {

// Collects failed expectations for one criterion.
class Check {
public:
    void expect(bool ok, const std::string& what) {
        ++count_;
        if (!ok && failures_.size() < 5) failures_.push_back(what);
        if (!ok) ++failed_;
    }
    [[nodiscard]] bool ok() const { return failed_ == 0; }
    [[nodiscard]] std::string summary() const {
        std::string s = std::to_string(count_ - failed_) + "/" + std::to_string(count_) + " checks";
        for (const auto& f : failures_) s += "; " + f;
        return s;
    }

private:
    int count_ = 0;
    int failed_ = 0;
    std::vector<std::string> failures_;
};

struct Outcome {
    bool pass = false;
    std::string detail;
};

int g_failed = 0;

void criterion(int id, const char* name, double budget_s, const std::function<Outcome()>& body) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
        o = body();
    } catch (const std::exception& e) {
        o = {false, std::string("exception: ") + e.what()};
    }
    const std::chrono::duration<double> took = std::chrono::steady_clock::now() - start;
    bool pass = o.pass;
    std::string detail = o.detail;
    if (budget_s > 0 && took.count() >= budget_s) {
        pass = false;
        detail += "; over the time budget";
    }
    if (!pass) ++g_failed;
    char head[160];
    if (budget_s > 0) {
        std::snprintf(head, sizeof head, "%s [%d] %s (%.3f s, budget %.0f s)", pass ? "PASS" : "FAIL", id, name,
                      took.count(), budget_s);
    } else {
        std::snprintf(head, sizeof head, "%s [%d] %s (%.3f s)", pass ? "PASS" : "FAIL", id, name, took.count());
    }
    std::printf("%s: %s\n", head, detail.c_str());
    std::fflush(stdout);
}

std::string fmt(double v, int decimals) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", decimals, v);
    return buf;
}

// ------------------------------------------------------------------ 1

Outcome cost_model() {
    Check c;
    struct Row {
        std::int64_t in, out;
        double expected;
    };
    for (const auto& r : {Row{1839, 20, 191.9}, Row{1961, 127, 246.9}, Row{2009, 514, 406.5}, Row{2103, 622, 459.1}}) {
        const double p = costlat::price(r.in, r.out);
        c.expect(fmt(p, 1) == fmt(r.expected, 1), "price(" + std::to_string(r.in) + "," + std::to_string(r.out) +
                                                       ")=" + fmt(p, 4));
    }
    const auto rows = costlat::parse_shape_spec(
        json::parse(read_file(fs::path(INTENTFLOW_SOURCE_DIR) / "configs" / "cost_shape.json")));
    std::string note;
    for (const auto& r : rows) {
        const auto row = costlat::evaluate_shape(r, costlat::ModelsConfig{});
        if (r.name == "Decomposed FT") {
            c.expect(fmt(row.price, 1) == "459.1", "Decomposed FT formula price");
            c.expect(row.notes.size() == 1 && row.notes[0].find("600") != std::string::npos &&
                         row.notes[0].find("459.1") != std::string::npos,
                     "discrepancy note against the reported 600");
            if (!row.notes.empty()) note = row.notes[0];
        } else {
            c.expect(row.notes.empty(), r.name + " has no note");
        }
    }
    return {c.ok(), c.summary() + "; 191.9, 246.9, 406.5 reproduced; note: " + note};
}

// ------------------------------------------------------------------ 2

Outcome latency_model() {
    Check c;
    costlat::LatencyModel m;
    m.ttft = 0.2;
    m.output_tokens_per_second = 550;
    const double e2e = costlat::latency(20, m);
    const double cot = costlat::latency(127, m);
    c.expect(std::abs(e2e - 0.24) <= 0.005, "E2E latency " + fmt(e2e, 4));
    c.expect(std::abs(cot - 0.43) <= 0.005, "CoT latency " + fmt(cot, 4));
    return {c.ok(), c.summary() + "; E2E " + fmt(e2e, 4) + " s, CoT " + fmt(cot, 4) + " s"};
}

// ------------------------------------------------------------------ 3

Outcome bifact_oracle() {
    Check c;
    Rng rng(20240603);
    // (fact, listing of the set it is judged against) -> scripted verdict
    std::map<std::pair<std::string, std::string>, bool> table;
    auto stub = fixtures::make_stub_gateway(gateway::StubFallback::error);
    stub.stub->set_responder([&](const gateway::RenderedRequest& r) -> std::optional<gateway::BackendReply> {
        if (r.template_id != gateway::TemplateId::judge_entailment) return std::nullopt;
        return gateway::BackendReply{table.at({r.variables.at("fact"), r.variables.at("facts")}) ? "yes" : "no",
                                     std::nullopt, std::nullopt};
    });
    eval::FactJudge judge(*stub.gateway, std::make_shared<eval::JudgeCache>());

    std::vector<eval::FactAlignment> alignments;
    std::int64_t sum_mp = 0, sum_tp = 0, sum_mg = 0, sum_tg = 0;
    for (int e = 0; e < 200; ++e) {
        std::vector<std::string> gold, pred;
        const auto ng = rng.between(0, 6);
        const auto np = rng.between(0, 6);
        for (int i = 0; i < ng; ++i) gold.push_back("gold fact " + std::to_string(e) + "/" + std::to_string(i));
        for (int i = 0; i < np; ++i) pred.push_back("pred fact " + std::to_string(e) + "/" + std::to_string(i));
        std::string gold_list, pred_list;
        for (const auto& f : gold) gold_list += "- " + f + "\n";
        for (const auto& f : pred) pred_list += "- " + f + "\n";
        std::vector<bool> pred_hit, gold_hit;
        for (const auto& f : pred) {
            pred_hit.push_back(rng.below(2) == 1);
            table[{f, gold_list}] = pred_hit.back();
        }
        for (const auto& f : gold) {
            gold_hit.push_back(rng.below(2) == 1);
            table[{f, pred_list}] = gold_hit.back();
        }

        // Oracle: plain counting. Nothing can be matched against an empty set.
        std::int64_t mp = 0, mg = 0;
        for (std::size_t i = 0; i < pred.size(); ++i) mp += (pred_hit[i] && !gold.empty()) ? 1 : 0;
        for (std::size_t i = 0; i < gold.size(); ++i) mg += (gold_hit[i] && !pred.empty()) ? 1 : 0;

        const auto s = eval::bifact(eval::FactSet(eval::FactSource::gold, gold),
                                    eval::FactSet(eval::FactSource::predicted, pred), judge);
        const auto& a = s.alignment;
        const std::string tag = "example " + std::to_string(e);
        c.expect(a.matched_predicted == mp && a.total_predicted == np, tag + " precision counts");
        c.expect(a.matched_gold == mg && a.total_gold == ng, tag + " recall counts");
        if (np > 0) {
            c.expect(s.precision && *s.precision * static_cast<double>(np) == static_cast<double>(mp), tag + " P ratio");
        } else {
            c.expect(!s.precision, tag + " P undefined");
        }
        if (ng > 0) {
            c.expect(s.recall && *s.recall * static_cast<double>(ng) == static_cast<double>(mg), tag + " R ratio");
        }
        sum_mp += mp, sum_tp += np, sum_mg += mg, sum_tg += ng;
        alignments.push_back(a);
    }
    const auto m = eval::micro_average(alignments);
    c.expect(m.matched_predicted == sum_mp && m.total_predicted == sum_tp, "micro precision counts");
    c.expect(m.matched_gold == sum_mg && m.total_gold == sum_tg, "micro recall counts");
    c.expect(m.precision && *m.precision == static_cast<double>(sum_mp) / static_cast<double>(sum_tp), "micro P");
    c.expect(m.recall && *m.recall == static_cast<double>(sum_mg) / static_cast<double>(sum_tg), "micro R");
    return {c.ok(), c.summary() + "; micro " + std::to_string(sum_mp) + "/" + std::to_string(sum_tp) + " precision, " +
                        std::to_string(sum_mg) + "/" + std::to_string(sum_tg) + " recall"};
}

// ------------------------------------------------------------------ 4

std::optional<gateway::BackendReply> word_decomposer(const gateway::RenderedRequest& r) {
    if (r.template_id != gateway::TemplateId::decompose_facts) return std::nullopt;
    std::istringstream in(r.variables.at("intent"));
    std::string out, word;
    while (in >> word) out += "- " + word + "\n";
    return gateway::BackendReply{out, std::nullopt, std::nullopt};
}

Outcome funnel_laws() {
    Check c;
    Rng rng(99);
    eval::FunnelReport total;
    for (int e = 0; e < 100; ++e) {
        // Facts are single words over a small vocabulary; the scripted judge
        // says a fact is supported when it is listed verbatim, except for a
        // random blacklist of (fact, set) pairs.
        std::set<std::pair<std::string, std::string>> refused;
        auto stub = fixtures::make_stub_gateway();
        stub.stub->set_responder([&](const gateway::RenderedRequest& r) -> std::optional<gateway::BackendReply> {
            if (r.template_id == gateway::TemplateId::decompose_facts) return word_decomposer(r);
            if (r.template_id != gateway::TemplateId::judge_entailment) return std::nullopt;
            const auto& fact = r.variables.at("fact");
            const auto& facts = r.variables.at("facts");
            const bool listed = ("\n" + facts).find("\n- " + fact + "\n") != std::string::npos;
            return gateway::BackendReply{listed && !refused.count({fact, facts}) ? "yes" : "no", std::nullopt,
                                         std::nullopt};
        });
        eval::FactJudge judge(*stub.gateway, std::make_shared<eval::JudgeCache>());

        auto words = [&](const char* stem) {
            std::vector<std::string> out;
            for (int i = 0; i < 8; ++i) {
                if (rng.below(2)) out.push_back(std::string(stem) + std::to_string(i));
            }
            return out;
        };
        auto gold_words = words("w");
        if (gold_words.empty()) gold_words.push_back("w0");
        auto pool_words = words("w");
        auto pred_words = words("w");
        if (pred_words.empty()) pred_words.push_back("w7");
        pool_words.push_back("screen");

        PipelineTrace tr;
        tr.trajectory_id = "t" + std::to_string(e);
        tr.method = rng.below(2) ? Method::decomposed : Method::decomposed_latency_opt;
        InteractionSummary s;
        s.user_actions = {text::join(pool_words, " ")};
        tr.summaries = {s};
        tr.predicted_intent = IntentStatement{text::join(pred_words, " "), std::nullopt};
        const eval::FactSet gold(eval::FactSource::gold, gold_words);

        // Scripted refusals: a few verbatim matches are judged unsupported.
        std::string pool_list, pred_list, gold_list;
        for (const auto& w : pool_words) pool_list += "- " + w + "\n";
        for (const auto& w : pred_words) pred_list += "- " + w + "\n";
        for (const auto& w : gold_words) gold_list += "- " + w + "\n";
        for (const auto& w : gold_words) {
            if (rng.below(5) == 0) refused.insert({w, pool_list});
            if (rng.below(5) == 0) refused.insert({w, pred_list});
        }
        for (const auto& w : pred_words) {
            if (rng.below(5) == 0) refused.insert({w, pool_list});
            if (rng.below(5) == 0) refused.insert({w, gold_list});
        }

        const auto r = eval::funnel(tr, gold, judge);
        c.expect(r.partition_holds(), tr.trajectory_id + " partition");

        // Oracle recount straight from the word lists and the refusal set.
        auto supported = [&](const std::string& f, const std::vector<std::string>& set, const std::string& list) {
            return std::find(set.begin(), set.end(), f) != set.end() && !refused.count({f, list});
        };
        eval::FunnelReport o;
        for (const auto& g : gold_words) {
            ++o.gold_total;
            if (!supported(g, pool_words, pool_list)) ++o.summarization_miss;
            else if (!supported(g, pred_words, pred_list)) ++o.intent_extraction_miss;
            else ++o.survived;
        }
        for (const auto& p : pred_words) {
            ++o.predicted_total;
            if (!supported(p, pool_words, pool_list)) ++o.intent_extraction_hallucinated;
            else if (!supported(p, gold_words, gold_list)) ++o.summarization_introduced;
            else ++o.correct;
        }
        c.expect(r == o, tr.trajectory_id + " matches recount");
        total += r;
    }
    c.expect(total.partition_holds(), "aggregate partition");

    // Hand-built scenario, ten facts:
    //   gold g1 g2 survive, g3 is an extraction miss, g4 g5 summarization misses;
    //   predicted g1 g2 correct, p4 introduced by summarization, p3 p5 hallucinated.
    eval::FunnelReport expected;
    expected.gold_total = 5;
    expected.summarization_miss = 2;
    expected.intent_extraction_miss = 1;
    expected.survived = 2;
    expected.predicted_total = 5;
    expected.intent_extraction_hallucinated = 2;
    expected.summarization_introduced = 1;
    expected.correct = 2;
    auto stub = fixtures::make_stub_gateway();
    stub.stub->set_responder(word_decomposer);
    eval::FactJudge judge(*stub.gateway, std::make_shared<eval::JudgeCache>());
    PipelineTrace tr;
    tr.trajectory_id = "hand";
    tr.method = Method::decomposed;
    InteractionSummary s1, s2;
    s1.screen_context = {"g1 g2"};
    s1.user_actions = {"g3"};
    s2.user_actions = {"p4 noise"};
    tr.summaries = {s1, s2};
    tr.predicted_intent = IntentStatement{"g1 g2 p3 p4 p5", std::nullopt};
    const auto hand = eval::funnel(tr, eval::FactSet(eval::FactSource::gold, {"g1", "g2", "g3", "g4", "g5"}), judge);
    c.expect(hand == expected, "hand-built 10-fact scenario");
    return {c.ok(), c.summary() + "; aggregate gold " + std::to_string(total.gold_total) + " = " +
                        std::to_string(total.summarization_miss) + " + " + std::to_string(total.intent_extraction_miss) +
                        " + " + std::to_string(total.survived)};
}

// ------------------------------------------------------------------ 5

bool has_speculation(const std::string& s) {
    return s.find("SPECULATIVE") != std::string::npos || s.find("unstated goal") != std::string::npos;
}

Outcome pipeline_invariants() {
    Check c;
    const auto corpus = fixtures::synthetic_corpus(20, 7);
    AblationConfig cfg;

    auto run_corpus = [&](std::uint64_t seed, bool check) {
        auto s1 = fixtures::make_stub_gateway();
        auto s2 = fixtures::make_stub_gateway();
        std::string bytes;
        for (const auto& t : corpus) {
            const auto n = std::min<std::size_t>(t.steps.size(), 15);
            for (auto m : {Method::cot, Method::e2e, Method::decomposed, Method::decomposed_latency_opt}) {
                const auto before = s2.stub->request_count();
                const auto tr = pipeline::run_method(m, t, cfg, pipeline::Stages{*s1.gateway, *s2.gateway}, seed);
                bytes += trace_to_string(tr);
                if (!check) continue;
                const std::string tag = t.id + "/" + std::string(to_string(m));
                c.expect(!tr.error, tag + " ran");
                const std::size_t expected_calls = m == Method::decomposed               ? n + 1
                                                   : m == Method::decomposed_latency_opt ? n
                                                                                         : 1;
                c.expect(tr.calls.size() == expected_calls, tag + " call count " + std::to_string(tr.calls.size()));
                c.expect(tr.retained_steps.size() == n, tag + " retained steps");
                if (is_decomposed(m)) {
                    const auto reqs = s2.stub->requests();
                    c.expect(reqs.size() == before + 1, tag + " one stage-2 request");
                    for (std::size_t k = before; k < reqs.size(); ++k) {
                        c.expect(!has_speculation(reqs[k].prompt), tag + " stage-2 request free of speculation");
                    }
                    for (const auto& call : tr.calls) {
                        if (call.call_role == "fuse_intent") {
                            c.expect(!has_speculation(call.request_text), tag + " recorded stage-2 text");
                        }
                    }
                }
            }
        }
        return bytes;
    };
    const auto first = run_corpus(42, true);
    const auto second = run_corpus(42, false);
    c.expect(first == second, "byte-identical traces across runs with equal seeds");

    // Context windows.
    const auto t5 = fixtures::make_trajectory("win", 5);
    const auto w1 = pipeline::build_context_window(t5, 1);
    c.expect(!w1.previous && w1.next && w1.next->index == 2 && w1.current.index == 1, "window at i=1");
    const auto wn = pipeline::build_context_window(t5, 5);
    c.expect(wn.previous && wn.previous->index == 4 && !wn.next && wn.current.index == 5, "window at i=n");
    const auto ws = pipeline::build_context_window(fixtures::make_trajectory("single", 1), 1);
    c.expect(!ws.previous && !ws.next && ws.step_count == 1, "singleton window");

    // Frame dropping.
    for (const auto& t : corpus) {
        const auto d = pipeline::drop_frames(t, 15, pipeline::frame_seed(42, t.id));
        c.expect(d.steps.size() == std::min<std::size_t>(t.steps.size(), 15), t.id + " capped at 15");
        int last = 0;
        for (std::size_t k = 0; k < d.steps.size(); ++k) {
            const int orig = d.steps[k].original_index.value_or(d.steps[k].index);
            c.expect(orig > last && d.steps[k].action == t.steps[static_cast<std::size_t>(orig - 1)].action &&
                         d.steps[k].screenshot == t.steps[static_cast<std::size_t>(orig - 1)].screenshot,
                     t.id + " subsequence");
            last = orig;
        }
    }
    std::size_t longest = 0;
    for (const auto& t : corpus) longest = std::max(longest, t.steps.size());
    return {c.ok(), c.summary() + "; 20 trajectories (longest " + std::to_string(longest) + " steps), 4 methods"};
}

// ------------------------------------------------------------------ 6

Outcome ablation_flags() {
    Check c;
    const auto corpus = fixtures::synthetic_corpus(6, 13);

    AblationConfig no_ctx;
    no_ctx.use_context_window = false;
    AblationConfig unstructured;
    unstructured.structured_summaries = false;
    for (const auto& t : corpus) {
        auto s1 = fixtures::make_stub_gateway();
        auto s2 = fixtures::make_stub_gateway();
        const auto tr = pipeline::run_decomposed(t, no_ctx, pipeline::Stages{*s1.gateway, *s2.gateway}, 1);
        c.expect(!tr.error, t.id + " no-context run");
        const auto dropped = pipeline::drop_frames(t, no_ctx.max_steps, pipeline::frame_seed(1, t.id));
        for (const auto& req : s1.stub->requests()) {
            const int i = *req.step_index;
            c.expect(req.images.size() == 1 && req.images[0] == dropped.steps[static_cast<std::size_t>(i - 1)].screenshot,
                     t.id + " only the current screenshot");
            c.expect(req.prompt.find("Previous action") == std::string::npos &&
                         req.prompt.find("Next action") == std::string::npos,
                     t.id + " no neighbour actions");
            for (int j : {i - 1, i + 1}) {
                if (j < 1 || j > static_cast<int>(dropped.steps.size())) continue;
                const auto neighbour = ingest::format_action_string(dropped.steps[static_cast<std::size_t>(j - 1)].action);
                const auto current = ingest::format_action_string(dropped.steps[static_cast<std::size_t>(i - 1)].action);
                if (neighbour != current) {
                    c.expect(req.prompt.find(neighbour) == std::string::npos, t.id + " neighbour action text absent");
                }
            }
        }

        auto u1 = fixtures::make_stub_gateway();
        auto u2 = fixtures::make_stub_gateway();
        const auto ut = pipeline::run_decomposed(t, unstructured, pipeline::Stages{*u1.gateway, *u2.gateway}, 1);
        c.expect(!ut.error, t.id + " unstructured run");
        for (const auto& s : ut.summaries) {
            c.expect(s.user_actions.size() == 1 && s.screen_context.empty() && s.speculative_intent.empty(),
                     t.id + " single-field summary");
        }
    }

    // --no-refine: targets are the cleaned gold labels.
    std::vector<Trajectory> ts = corpus;
    ts[0].gold_intent.platform_prefix = "Shop";
    auto s1 = fixtures::make_stub_gateway();
    AblationConfig no_refine;
    no_refine.refine_labels = false;
    const auto build = pipeline::build_finetune_dataset(ts, no_refine, {*s1.gateway, nullptr}, 1, 2);
    c.expect(build.examples.size() == ts.size(), "every example exported");
    for (std::size_t i = 0; i < build.examples.size(); ++i) {
        c.expect(build.examples[i].target_intent == pipeline::label_string(ts[i].gold_intent) &&
                     !build.examples[i].target_was_refined,
                 ts[i].id + " target equals cleaned gold");
    }
    for (const auto& req : s1.stub->requests()) {
        c.expect(req.template_id != gateway::TemplateId::refine_label, "no refine calls");
    }

    // With refinement on, a scripted refiner changes the target.
    auto r1 = fixtures::make_stub_gateway();
    auto refiner = fixtures::make_stub_gateway();
    gateway::StubRule rule;
    rule.template_id = gateway::TemplateId::refine_label;
    rule.responses = {"open the item"};
    refiner.stub->add_rule(rule);
    const auto refined = pipeline::build_finetune_dataset({ts[0]}, AblationConfig{}, {*r1.gateway, refiner.gateway.get()}, 1, 1);
    c.expect(refined.examples.size() == 1 && refined.examples[0].target_intent == "Shop; open the item",
             "refinement active by default");
    return {c.ok(), c.summary()};
}

// ------------------------------------------------------------------ 7

Outcome preprocessing() {
    Check c;
    struct Label {
        const char* raw;
        const char* prefix;  // nullptr: none
        const char* text;
    };
    const Label labels[] = {
        {"DoorDash; order an olive pizza", "DoorDash", "order an olive pizza"},
        {"book a flight to LAX", nullptr, "book a flight to LAX"},
        {"Gmail; delete all promotional emails", "Gmail", "delete all promotional emails"},
        {"united.com; find a one-way flight from JFK", "united.com", "find a one-way flight from JFK"},
        {"a; b; c", "a", "b; c"},
        {"Spotify; play the top hits playlist", "Spotify", "play the top hits playlist"},
        {"search for hiking boots", nullptr, "search for hiking boots"},
        {"Amazon;buy socks", nullptr, "Amazon;buy socks"},
        {"Expedia; book a hotel in Rome", "Expedia", "book a hotel in Rome"},
        {"Google Maps; get directions to the airport", "Google Maps", "get directions to the airport"},
        {"set an alarm for 7 am", nullptr, "set an alarm for 7 am"},
        {"Uber;  request a ride home", "Uber", " request a ride home"},
        {"Zillow; list 2-bedroom rentals; under $2000", "Zillow", "list 2-bedroom rentals; under $2000"},
        {"Reddit; upvote the top post", "Reddit", "upvote the top post"},
        {"check the weather", nullptr, "check the weather"},
        {"Yelp; find sushi near me", "Yelp", "find sushi near me"},
        {"Settings; turn on dark mode", "Settings", "turn on dark mode"},
        {"add milk to the list", nullptr, "add milk to the list"},
        {"Kayak; compare car rentals in Denver", "Kayak", "compare car rentals in Denver"},
        {"Etsy; favorite a handmade mug", "Etsy", "favorite a handmade mug"},
    };
    int n = 0;
    for (const auto& l : labels) {
        ++n;
        const auto s = split_platform_prefix(l.raw);
        const bool prefix_ok = l.prefix ? (s.platform_prefix && *s.platform_prefix == l.prefix) : !s.platform_prefix;
        c.expect(prefix_ok && s.text == l.text, std::string("split '") + l.raw + "'");
        const auto stripped = evaluation_text(s);
        c.expect(stripped == text::trim(l.text), std::string("stripped '") + l.raw + "'");
        if (l.prefix && std::string(l.text).find(l.prefix) == std::string::npos) {
            c.expect(stripped.find(l.prefix) == std::string::npos, std::string("prefix absent from '") + l.raw + "'");
        }
        if (std::string(l.text).find("; ") == std::string::npos) {
            const auto again = split_platform_prefix(s.text);
            c.expect(!again.platform_prefix && again.text == s.text, std::string("idempotent '") + l.raw + "'");
        }
    }
    c.expect(n == 20, "20-label fixture");

    const auto small = ingest::downsize(Image(1080, 2400, Rgb{40, 50, 60}));
    c.expect(small.width() == 270 && small.height() == 600, "downsize 1080x2400 -> 270x600");

    Rng rng(7);
    const Image page(1400, 4000, Rgb{200, 200, 200});
    for (int i = 0; i < 200; ++i) {
        const auto bw = rng.between(1, 1280), bh = rng.between(1, 768);
        const Rect bbox{rng.between(0, 1400 - bw), rng.between(0, 4000 - bh), bw, bh};
        const auto r = ingest::crop_for_web(page, bbox, ingest::CropSpec{1280, 768, rng.below(1u << 20)});
        c.expect(r.image.width() == 1280 && r.image.height() == 768, "crop is 1280x768");
        c.expect(r.window.contains(bbox), "crop contains the bbox");
    }

    Image img(300, 200, Rgb{1, 2, 3});
    const Rect box{30, 40, 100, 50};
    const auto a = encode_png(ingest::highlight_element(img, box));
    const auto b = encode_png(ingest::highlight_element(img, box));
    c.expect(a == b, "highlight deterministic");
    return {c.ok(), c.summary()};
}

// ------------------------------------------------------------------ 8

Outcome quality_scores() {
    std::string detail =
        "BiFact and Bi-NLI quality scores need the original datasets, a fine-tuned model and an LLM judge; "
        "they are not reproducible at desk scale and are not asserted";
    const char* live = std::getenv("INTENTFLOW_LIVE_BACKEND");
    if (!live || !*live) return {true, detail + "; live smoke skipped (INTENTFLOW_LIVE_BACKEND unset)"};

    // Schema-only smoke against a real backend: one short trajectory, no scores.
    const auto backends = gateway::BackendSet::load(live);
    auto templates = gateway::TemplateLibrary::load_default();
    auto g1 = gateway::make_gateway(backends.for_role("stage1"), templates);
    auto g2 = gateway::make_gateway(backends.for_role("stage2"), templates);
    auto t = fixtures::make_trajectory("live-smoke", 3);
    for (auto& s : t.steps) s.screenshot.png = encode_png(Image(64, 48, Rgb{240, 240, 240}));
    const auto tr = pipeline::run_decomposed(t, AblationConfig{}, pipeline::Stages{*g1, *g2}, 1);
    Check c;
    c.expect(!tr.error, "live run: " + tr.error.value_or(""));
    c.expect(tr.predicted_intent && !tr.predicted_intent->text.empty(), "non-empty predicted intent");
    c.expect(tr.summaries.size() == 3, "three summaries");
    for (const auto& s : tr.summaries) c.expect(s.speculative_intent.empty(), "stripped summaries");
    c.expect(trace_from_string(trace_to_string(tr)) == tr, "trace round-trips");
    return {c.ok(), detail + "; live schema smoke: " + c.summary()};
}

}  // namespace

int main() {
    criterion(1, "cost model reproduces the reported price column", 1, cost_model);
    criterion(2, "latency model within 0.005 s", 1, latency_model);
    criterion(3, "BiFact and micro-average equal a brute-force oracle on 200 alignments", 5, bifact_oracle);
    criterion(4, "funnel partition laws on 100 traces and a hand-built scenario", 5, funnel_laws);
    criterion(5, "pipeline structural invariants under the stub", 10, pipeline_invariants);
    criterion(6, "ablation flags", 10, ablation_flags);
    criterion(7, "preprocessing", 5, preprocessing);
    criterion(8, "quality scores (not reproducible; schema-only live smoke)", 0, quality_scores);
    std::printf("%s: %d criteria failed\n", g_failed ? "FAIL" : "PASS", g_failed);
    return g_failed ? 1 : 0;
}
