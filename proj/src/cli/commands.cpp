#include "intentflow/cli/commands.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cstdlib>
#include <map>
#include <memory>
#include <optional>
#include <set>

#include "intentflow/cli/manifest.hpp"
#include "intentflow/core/digest.hpp"
#include "intentflow/core/error.hpp"
#include "intentflow/core/parallel.hpp"
#include "intentflow/core/serialize.hpp"
#include "intentflow/core/validate.hpp"
#include "intentflow/costlat/costlat.hpp"
#include "intentflow/eval/bifact.hpp"
#include "intentflow/eval/funnel.hpp"
#include "intentflow/gateway/backend_config.hpp"
#include "intentflow/gateway/nli.hpp"
#include "intentflow/gateway/templates.hpp"
#include "intentflow/ingest/sources.hpp"
#include "intentflow/pipeline/finetune.hpp"
#include "intentflow/pipeline/methods.hpp"

namespace fs = std::filesystem;

namespace intentflow::cli {

namespace {

using gateway::BackendConfig;
using gateway::BackendSet;
using gateway::TemplateId;
using gateway::TemplateLibrary;

struct Options {
    // shared
    std::uint64_t seed = 0;
    std::size_t parallelism = 4;
    std::string out;
    std::string dataset;
    std::string backend_config;
    std::string judge_config;
    std::string judge_cache;
    std::string prompts;
    // run / prep-finetune
    std::string method;
    int max_steps = 15;
    bool no_context = false;
    bool unstructured = false;
    bool no_refine = false;
    bool no_finetune = false;
    // ingest
    std::string layout;
    std::string source;
    bool no_clean = false;
    // eval / funnel / cost
    std::string traces;
    std::string shape;
    std::string models;
};

// Variables each template is rendered with; used to reject templates that
// reference anything else before any call is made.
const std::map<TemplateId, std::vector<std::string>>& variable_contract() {
    static const std::map<TemplateId, std::vector<std::string>> contract = {
        {TemplateId::cot, {"step_count", "actions"}},
        {TemplateId::e2e, {"step_count", "actions"}},
        {TemplateId::summarize, {"screens", "step_index", "step_count", "current_action", "context"}},
        {TemplateId::summarize_unstructured, {"screens", "step_index", "step_count", "current_action", "context"}},
        {TemplateId::fuse_intent, {"summaries"}},
        {TemplateId::fuse_intent_visual, {"summaries", "final_step_index", "final_action"}},
        {TemplateId::refine_label, {"summaries", "intent"}},
        {TemplateId::clean_label, {"label"}},
        {TemplateId::decompose_facts, {"intent"}},
        {TemplateId::judge_entailment, {"facts", "fact"}},
    };
    return contract;
}

void check_templates(const TemplateLibrary& lib, const std::vector<TemplateId>& ids) {
    for (auto id : ids) {
        gateway::Variables vars;
        for (const auto& name : variable_contract().at(id)) vars[name] = "x";
        try {
            (void)lib.get(id).render(vars);
        } catch (const ConfigError& e) {
            throw ConfigError("template '" + std::string(gateway::to_string(id)) + "': " + e.what());
        }
    }
}

void check_backend(const BackendConfig& c) {
    c.validate();
    if (c.provider != "stub" && !c.auth_env.empty() && std::getenv(c.auth_env.c_str()) == nullptr) {
        throw ConfigError("environment variable " + c.auth_env + " (auth for " + c.provider + ") is not set");
    }
}

std::shared_ptr<const TemplateLibrary> load_templates(const Options& o) {
    return o.prompts.empty() ? TemplateLibrary::load_default() : TemplateLibrary::load(o.prompts);
}

json template_digests(const TemplateLibrary& lib) {
    json j = json::object();
    for (auto id : gateway::kAllTemplates) j[std::string(gateway::to_string(id))] = sha256_hex(lib.get(id).text());
    return j;
}

BackendSet load_backends(const std::string& path) {
    if (path.empty()) {
        BackendConfig c;
        c.backoff_initial_ms = 0;
        return BackendSet::single(c);
    }
    return BackendSet::load(path);
}

AblationConfig ablation(const Options& o) {
    AblationConfig c;
    c.use_context_window = !o.no_context;
    c.structured_summaries = !o.unstructured;
    c.refine_labels = !o.no_refine;
    c.finetuned_stage2 = !o.no_finetune;
    c.max_steps = o.max_steps;
    if (c.max_steps < 1) throw InvalidArgument("--max-steps must be >= 1");
    return c;
}

const BackendConfig& stage2_config(const BackendSet& set, const AblationConfig& cfg) {
    if (cfg.finetuned_stage2) return set.for_role("stage2");
    return set.has_role("stage2_untuned") ? set.for_role("stage2_untuned") : set.for_role("stage1");
}

RunManifest start_manifest(const std::string& command, const std::vector<std::string>& args, const Options& o) {
    RunManifest m;
    m.command = command;
    m.argv = args;
    m.seed = o.seed;
    m.started_at = utc_timestamp();
    return m;
}

struct Dataset {
    std::vector<Trajectory> valid;
    std::vector<std::string> problems;
    fs::path image_root;
};

Dataset load_dataset(const std::string& path, bool check_images) {
    if (path.empty()) throw InvalidArgument("--dataset is required");
    if (!fs::is_regular_file(path)) throw InvalidArgument("dataset not found: " + path);
    Dataset d;
    d.image_root = fs::path(path).parent_path();
    auto loaded = read_trajectory_jsonl(path);
    d.problems = std::move(loaded.errors);
    ValidateOptions vo;
    if (check_images) vo.image_root = d.image_root;
    for (auto& t : loaded.trajectories) {
        const auto violations = validate_trajectory(t, vo);
        if (violations.empty()) {
            d.valid.push_back(std::move(t));
        } else {
            for (const auto& v : violations) d.problems.push_back("trajectory '" + t.id + "': " + v);
        }
    }
    return d;
}

// ---------------------------------------------------------------- ingest

int cmd_ingest(const Options& o, const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    auto manifest = start_manifest("ingest", args, o);
    if (o.source.empty() || o.out.empty()) throw InvalidArgument("ingest needs --source and --out");
    ingest::IngestOptions opt;
    opt.layout = ingest::parse_source_layout(o.layout);
    opt.source_dir = o.source;
    opt.out_dir = o.out;
    opt.seed = o.seed;
    opt.parallelism = o.parallelism;

    std::shared_ptr<const TemplateLibrary> templates;
    std::unique_ptr<gateway::Gateway> cleaner;
    json backends = nullptr;
    const bool clean = opt.layout == ingest::SourceLayout::androidcontrol && !o.no_clean && !o.backend_config.empty();
    if (clean) {
        templates = load_templates(o);
        check_templates(*templates, {TemplateId::clean_label});
        const auto set = BackendSet::load(o.backend_config);
        check_backend(set.for_role("clean"));
        cleaner = gateway::make_gateway(set.for_role("clean"), templates);
        opt.cleaner = cleaner.get();
        backends = set.to_json();
    } else if (opt.layout == ingest::SourceLayout::androidcontrol && !o.no_clean) {
        err << "warning: no --backend-config given; android labels are restructured but not cleaned\n";
    }

    const auto result = ingest::ingest_source(opt);
    write_trajectory_jsonl(fs::path(o.out) / "trajectories.jsonl", result.trajectories);
    for (const auto& d : result.diagnostics) {
        err << (d.fatal ? "skipped " : "warning ") << d.episode << ": " << d.message << "\n";
    }
    out << "ingest: " << result.trajectories.size() << " trajectories written, " << result.skipped()
        << " episodes skipped\n";

    manifest.config = {{"layout", std::string(ingest::to_string(opt.layout))},
                       {"clean_labels", clean},
                       {"backends", backends},
                       {"templates", templates ? template_digests(*templates) : json(nullptr)},
                       {"crop", {opt.crop_width, opt.crop_height}}};
    manifest.inputs.push_back(describe_input(o.source));
    manifest.output = fs::path(o.out).generic_string();
    manifest.finished_at = utc_timestamp();
    write_manifest(o.out, manifest);
    return result.skipped() > 0 ? kExitPartial : kExitOk;
}

// ---------------------------------------------------------------- run

std::vector<TemplateId> templates_for(Method m, const AblationConfig& cfg) {
    switch (m) {
        case Method::cot: return {TemplateId::cot};
        case Method::e2e: return {TemplateId::e2e};
        case Method::decomposed:
            return {cfg.structured_summaries ? TemplateId::summarize : TemplateId::summarize_unstructured,
                    TemplateId::fuse_intent};
        case Method::decomposed_latency_opt:
            return {cfg.structured_summaries ? TemplateId::summarize : TemplateId::summarize_unstructured,
                    TemplateId::fuse_intent_visual};
    }
    return {};
}

int cmd_run(const Options& o, const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    auto manifest = start_manifest("run", args, o);
    const Method method = parse_method(o.method);
    const auto cfg = ablation(o);
    if (o.out.empty()) throw InvalidArgument("--out is required");

    const auto templates = load_templates(o);
    check_templates(*templates, templates_for(method, cfg));
    const auto backends = load_backends(o.backend_config);
    const auto& s1 = backends.for_role("stage1");
    const auto& s2 = stage2_config(backends, cfg);
    check_backend(s1);
    if (is_decomposed(method)) check_backend(s2);

    auto data = load_dataset(o.dataset, true);
    for (const auto& p : data.problems) err << "invalid: " << p << "\n";

    auto stage1 = gateway::make_gateway(s1, templates, data.image_root);
    auto stage2 = gateway::make_gateway(s2, templates, data.image_root);
    pipeline::Stages stages{*stage1, *stage2};

    std::vector<PipelineTrace> traces(data.valid.size());
    parallel_for(data.valid.size(), o.parallelism, [&](std::size_t i) {
        traces[i] = pipeline::run_method(method, data.valid[i], cfg, stages, o.seed);
    });

    const fs::path out_dir = o.out;
    std::size_t failed = 0;
    json failures = json::array();
    for (const auto& t : traces) {
        write_file(out_dir / "traces" / (ingest::safe_component(t.trajectory_id) + ".json"), trace_to_string(t));
        if (t.error) {
            ++failed;
            failures.push_back({{"trajectory_id", t.trajectory_id}, {"error", *t.error}});
            err << "failed " << t.trajectory_id << ": " << *t.error << "\n";
        }
    }
    json summary;
    summary["method"] = std::string(to_string(method));
    summary["trajectories"] = traces.size();
    summary["succeeded"] = traces.size() - failed;
    summary["failed"] = failed;
    summary["invalid_inputs"] = data.problems;
    summary["failures"] = failures;
    write_file(out_dir / "run_summary.json", summary.dump(2) + "\n");
    out << "run " << to_string(method) << ": " << traces.size() << " trajectories, " << traces.size() - failed
        << " succeeded, " << failed << " failed, " << data.problems.size() << " invalid inputs\n";

    json backend_json = {{"stage1", gateway::to_json(s1)}};
    if (is_decomposed(method)) backend_json["stage2"] = gateway::to_json(s2);
    manifest.config = {{"method", std::string(to_string(method))},
                       {"ablation", cfg},
                       {"backends", backend_json},
                       {"templates", template_digests(*templates)}};
    manifest.inputs.push_back(describe_input(o.dataset));
    manifest.output = out_dir.generic_string();
    manifest.finished_at = utc_timestamp();
    write_manifest(out_dir, manifest);
    return failed == 0 && data.problems.empty() ? kExitOk : kExitPartial;
}

// ---------------------------------------------------------------- judge setup

struct JudgeSetup {
    std::shared_ptr<const TemplateLibrary> templates;
    std::unique_ptr<gateway::Gateway> gateway;
    std::shared_ptr<eval::JudgeCache> cache;
    std::unique_ptr<eval::FactJudge> judge;
    std::unique_ptr<gateway::NliBackend> nli;
    fs::path cache_path;
    json config;
};

JudgeSetup make_judge(const Options& o, const fs::path& out_dir) {
    JudgeSetup s;
    s.templates = load_templates(o);
    check_templates(*s.templates, {TemplateId::decompose_facts, TemplateId::judge_entailment});
    json j = json::object();
    fs::path base;
    if (!o.judge_config.empty()) {
        try {
            j = json::parse(read_file(o.judge_config));
        } catch (const json::exception& e) {
            throw ConfigError("judge config: " + std::string(e.what()));
        }
        base = fs::path(o.judge_config).parent_path();
    }
    json nli_cfg = nullptr;
    if (j.is_object() && j.contains("nli")) {
        nli_cfg = j["nli"];
        j.erase("nli");
    }
    BackendSet set = j.empty() ? load_backends("") : BackendSet::from_json(j, base);
    const auto& cfg = set.for_role("judge");
    check_backend(cfg);
    s.gateway = gateway::make_gateway(cfg, s.templates);
    s.cache_path = o.judge_cache.empty() ? out_dir / "judge_cache.json" : fs::path(o.judge_cache);
    s.cache = std::make_shared<eval::JudgeCache>(eval::JudgeCache::load(s.cache_path));
    s.judge = std::make_unique<eval::FactJudge>(*s.gateway, s.cache);
    if (!nli_cfg.is_null()) s.nli = gateway::make_nli_backend(nli_cfg);
    s.config = {{"judge", gateway::to_json(cfg)}, {"nli", nli_cfg}, {"templates", template_digests(*s.templates)}};
    return s;
}

struct Paired {
    std::vector<std::pair<const Trajectory*, const PipelineTrace*>> items;
    std::vector<std::string> missing_traces;
    std::vector<std::string> orphan_traces;
};

Paired pair_up(const std::vector<Trajectory>& gold, const std::vector<PipelineTrace>& traces) {
    Paired p;
    std::map<std::string, const PipelineTrace*> by_id;
    for (const auto& t : traces) by_id[t.trajectory_id] = &t;
    std::set<std::string> gold_ids;
    for (const auto& g : gold) {
        gold_ids.insert(g.id);
        if (auto it = by_id.find(g.id); it != by_id.end()) {
            p.items.emplace_back(&g, it->second);
        } else {
            p.missing_traces.push_back(g.id);
        }
    }
    for (const auto& t : traces) {
        if (!gold_ids.contains(t.trajectory_id)) p.orphan_traces.push_back(t.trajectory_id);
    }
    return p;
}

json optional_number(const std::optional<double>& v) {
    return v ? json(*v) : json(nullptr);
}

std::string pct(const std::optional<double>& v) {
    if (!v) return "   n/a";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%6.3f", *v);
    return buf;
}

// ---------------------------------------------------------------- eval

int cmd_eval(const Options& o, const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    auto manifest = start_manifest("eval", args, o);
    if (o.traces.empty() || o.out.empty()) throw InvalidArgument("eval needs --traces and --out");
    const fs::path out_dir = o.out;
    auto setup = make_judge(o, out_dir);

    std::vector<std::string> load_errors;
    const auto traces = load_traces(o.traces, load_errors);
    auto data = load_dataset(o.dataset, false);
    for (const auto& e : load_errors) err << "unreadable trace: " << e << "\n";
    for (const auto& p : data.problems) err << "invalid gold: " << p << "\n";
    const auto paired = pair_up(data.valid, traces);
    for (const auto& id : paired.missing_traces) err << "warning: no trace for gold trajectory '" << id << "'\n";
    for (const auto& id : paired.orphan_traces) err << "warning: trace '" << id << "' has no gold label; skipped\n";
    if (paired.items.empty()) throw InvalidArgument("no trace matches a gold trajectory");

    struct Row {
        eval::BiFactScore score;
        std::optional<double> nli;
        std::size_t gold_facts = 0;
        std::size_t predicted_facts = 0;
        std::vector<std::string> flags;
        std::optional<std::string> error;
    };
    std::vector<Row> rows(paired.items.size());
    parallel_for(rows.size(), o.parallelism, [&](std::size_t i) {
        const auto& [gold, trace] = paired.items[i];
        auto& row = rows[i];
        try {
            const auto gold_text = evaluation_text(gold->gold_intent);
            const auto gold_set = setup.judge->decompose(gold_text, eval::FactSource::gold, gold->id);
            eval::FactSet pred_set(eval::FactSource::predicted, {});
            std::string pred_text;
            if (trace->predicted_intent) pred_text = evaluation_text(*trace->predicted_intent);
            if (!pred_text.empty()) {
                pred_set = setup.judge->decompose(pred_text, eval::FactSource::predicted, gold->id);
            } else {
                row.flags.push_back("no prediction");
            }
            if (gold_set.flagged()) row.flags.push_back("gold decomposition fallback");
            if (pred_set.flagged()) row.flags.push_back("predicted decomposition fallback");
            row.score = eval::bifact(gold_set, pred_set, *setup.judge, gold->id);
            for (const auto* side : {&row.score.alignment.predicted_in_gold, &row.score.alignment.gold_in_predicted}) {
                for (const auto& j : *side) {
                    if (j.flagged) row.flags.push_back("unparseable judgment: " + j.fact);
                }
            }
            row.gold_facts = gold_set.size();
            row.predicted_facts = pred_set.size();
            if (setup.nli && !pred_text.empty()) row.nli = eval::nli_bidirectional(gold_text, pred_text, *setup.nli);
        } catch (const Error& e) {
            row.error = e.what();
        }
    });

    std::vector<eval::FactAlignment> alignments;
    std::vector<eval::BiFactScore> scored;
    json examples = json::array();
    std::string table = "trajectory                         P      R      F1     BiNLI\n";
    double nli_sum = 0;
    std::size_t nli_n = 0;
    std::size_t failed = 0;
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const auto& id = paired.items[i].first->id;
        const auto& r = rows[i];
        json ex;
        ex["trajectory_id"] = id;
        if (r.error) {
            ++failed;
            ex["error"] = *r.error;
            err << "failed " << id << ": " << *r.error << "\n";
            examples.push_back(std::move(ex));
            continue;
        }
        alignments.push_back(r.score.alignment);
        scored.push_back(r.score);
        const auto& a = r.score.alignment;
        ex["precision"] = optional_number(r.score.precision);
        ex["recall"] = optional_number(r.score.recall);
        ex["f1"] = r.score.f1;
        ex["bi_nli"] = optional_number(r.nli);
        ex["matched_predicted"] = a.matched_predicted;
        ex["total_predicted"] = a.total_predicted;
        ex["matched_gold"] = a.matched_gold;
        ex["total_gold"] = a.total_gold;
        ex["flags"] = r.flags;
        examples.push_back(std::move(ex));
        if (r.nli) nli_sum += *r.nli, ++nli_n;
        char buf[256];
        std::snprintf(buf, sizeof buf, "%-30s %s %s %6.3f %s\n", id.c_str(), pct(r.score.precision).c_str(),
                      pct(r.score.recall).c_str(), r.score.f1, pct(r.nli).c_str());
        table += buf;
    }
    if (alignments.empty()) throw InvalidArgument("every example failed to score");
    const auto micro = eval::micro_average(alignments);
    const auto macro = eval::macro_average(scored);
    const std::optional<double> nli_mean = nli_n ? std::optional<double>(nli_sum / static_cast<double>(nli_n)) : std::nullopt;

    json report;
    report["micro"] = {{"precision", optional_number(micro.precision)},
                       {"recall", optional_number(micro.recall)},
                       {"f1", micro.f1},
                       {"matched_predicted", micro.matched_predicted},
                       {"total_predicted", micro.total_predicted},
                       {"matched_gold", micro.matched_gold},
                       {"total_gold", micro.total_gold}};
    report["macro"] = {{"precision", optional_number(macro.precision)},
                       {"recall", optional_number(macro.recall)},
                       {"f1", macro.f1}};
    report["bi_nli_mean"] = optional_number(nli_mean);
    report["coverage"] = {{"scored", alignments.size()},
                          {"gold", data.valid.size()},
                          {"missing_traces", paired.missing_traces},
                          {"orphan_traces", paired.orphan_traces}};
    report["judge_calls"] = setup.judge->backend_calls();
    report["examples"] = examples;
    write_file(out_dir / "eval_report.json", report.dump(2) + "\n");

    std::string text = table + "\n";
    text += "micro  P " + pct(micro.precision) + "  R " + pct(micro.recall) + "  F1 " + pct(micro.f1) + "\n";
    text += "macro  P " + pct(macro.precision) + "  R " + pct(macro.recall) + "  F1 " + pct(macro.f1) + "\n";
    text += "Bi-NLI mean " + pct(nli_mean) + "\n";
    text += "scored " + std::to_string(alignments.size()) + " of " + std::to_string(data.valid.size()) +
            " gold trajectories; judge calls " + std::to_string(setup.judge->backend_calls()) + "\n";
    write_file(out_dir / "eval_report.txt", text);
    out << text;

    setup.cache->save(setup.cache_path);
    manifest.config = setup.config;
    manifest.inputs = {describe_input(o.traces), describe_input(o.dataset)};
    manifest.output = out_dir.generic_string();
    manifest.finished_at = utc_timestamp();
    write_manifest(out_dir, manifest);
    const bool partial = failed > 0 || !paired.missing_traces.empty() || !paired.orphan_traces.empty() ||
                         !load_errors.empty() || !data.problems.empty();
    return partial ? kExitPartial : kExitOk;
}

// ---------------------------------------------------------------- funnel

int cmd_funnel(const Options& o, const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    auto manifest = start_manifest("funnel", args, o);
    if (o.traces.empty() || o.out.empty()) throw InvalidArgument("funnel needs --traces and --out");
    std::vector<std::string> load_errors;
    const auto traces = load_traces(o.traces, load_errors);
    for (const auto& t : traces) {
        if (!is_decomposed(t.method)) {
            throw UnsupportedMethodError("trace '" + t.trajectory_id + "' comes from method '" +
                                         std::string(to_string(t.method)) +
                                         "'; the funnel attributes errors to the summarization and intent "
                                         "extraction stages and needs decomposed-method traces");
        }
    }
    const fs::path out_dir = o.out;
    auto setup = make_judge(o, out_dir);
    auto data = load_dataset(o.dataset, false);
    for (const auto& e : load_errors) err << "unreadable trace: " << e << "\n";
    const auto paired = pair_up(data.valid, traces);
    for (const auto& id : paired.missing_traces) err << "warning: no trace for gold trajectory '" << id << "'\n";
    for (const auto& id : paired.orphan_traces) err << "warning: trace '" << id << "' has no gold label; skipped\n";

    std::vector<std::optional<eval::FunnelReport>> reports(paired.items.size());
    std::vector<std::optional<std::string>> errors(paired.items.size());
    parallel_for(reports.size(), o.parallelism, [&](std::size_t i) {
        const auto& [gold, trace] = paired.items[i];
        try {
            if (trace->summaries.empty()) throw InvalidArgument("trace has no summaries (run failed)");
            const auto gold_set =
                setup.judge->decompose(evaluation_text(gold->gold_intent), eval::FactSource::gold, gold->id);
            reports[i] = eval::funnel(*trace, gold_set, *setup.judge);
        } catch (const UnsupportedMethodError&) {
            throw;
        } catch (const Error& e) {
            errors[i] = e.what();
        }
    });

    eval::FunnelReport total;
    json per = json::array();
    std::size_t failed = 0;
    for (std::size_t i = 0; i < reports.size(); ++i) {
        const auto& id = paired.items[i].first->id;
        if (!reports[i]) {
            ++failed;
            err << "failed " << id << ": " << errors[i].value_or("unknown") << "\n";
            per.push_back({{"trajectory_id", id}, {"error", errors[i].value_or("unknown")}});
            continue;
        }
        total += *reports[i];
        auto j = eval::funnel_to_json(*reports[i]);
        j["trajectory_id"] = id;
        per.push_back(std::move(j));
    }
    if (!total.partition_holds()) throw Error("internal error: funnel partition does not hold");
    const auto text = eval::render_funnel(total);
    json report;
    report["aggregate"] = eval::funnel_to_json(total);
    report["trajectories"] = per;
    report["judge_calls"] = setup.judge->backend_calls();
    write_file(out_dir / "funnel_report.json", report.dump(2) + "\n");
    write_file(out_dir / "funnel_report.txt", text);
    out << text;

    setup.cache->save(setup.cache_path);
    manifest.config = setup.config;
    manifest.inputs = {describe_input(o.traces), describe_input(o.dataset)};
    manifest.output = out_dir.generic_string();
    manifest.finished_at = utc_timestamp();
    write_manifest(out_dir, manifest);
    return failed == 0 && paired.missing_traces.empty() && load_errors.empty() ? kExitOk : kExitPartial;
}

// ---------------------------------------------------------------- cost

int cmd_cost(const Options& o, const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    auto manifest = start_manifest("cost", args, o);
    if (o.shape.empty() == o.traces.empty()) throw InvalidArgument("cost needs exactly one of --shape or --traces");
    costlat::ModelsConfig models;
    if (!o.models.empty()) models = costlat::models_from_json(json::parse(read_file(o.models)));

    std::vector<costlat::CostRow> rows;
    std::vector<std::string> skipped;
    if (!o.shape.empty()) {
        json spec;
        try {
            const auto body = read_file(o.shape);
            spec = body.find_first_not_of(" \t\r\n") == std::string::npos ? json() : json::parse(body);
        } catch (const json::exception& e) {
            throw InvalidArgument("malformed shape spec: " + std::string(e.what()));
        }
        if (spec.is_null()) throw InvalidArgument("shape spec is empty");
        for (const auto& s : costlat::parse_shape_spec(spec)) rows.push_back(costlat::evaluate_shape(s, models));
        manifest.inputs.push_back(describe_input(o.shape));
    } else {
        std::vector<std::string> load_errors;
        const auto traces = load_traces(o.traces, load_errors);
        for (const auto& e : load_errors) skipped.push_back(e);
        rows = costlat::rows_from_traces(traces, models, skipped);
        manifest.inputs.push_back(describe_input(o.traces));
    }
    for (const auto& s : skipped) err << "skipped: " << s << "\n";
    const auto text = costlat::render_cost_table(rows);
    out << text;
    if (!o.out.empty()) {
        auto j = costlat::cost_table_json(rows);
        j["models"] = costlat::to_json(models);
        j["skipped"] = skipped;
        write_file(fs::path(o.out) / "cost_report.json", j.dump(2) + "\n");
        write_file(fs::path(o.out) / "cost_report.txt", text);
        manifest.config = {{"models", costlat::to_json(models)}};
        manifest.output = fs::path(o.out).generic_string();
        manifest.finished_at = utc_timestamp();
        write_manifest(o.out, manifest);
    }
    return skipped.empty() ? kExitOk : kExitPartial;
}

// ---------------------------------------------------------------- prep-finetune

int cmd_prep_finetune(const Options& o, const std::vector<std::string>& args, std::ostream& out,
                      std::ostream& err) {
    auto manifest = start_manifest("prep-finetune", args, o);
    if (o.out.empty()) throw InvalidArgument("--out (the export file) is required");
    const auto cfg = ablation(o);
    const auto templates = load_templates(o);
    std::vector<TemplateId> used = {cfg.structured_summaries ? TemplateId::summarize : TemplateId::summarize_unstructured,
                                    TemplateId::fuse_intent};
    if (cfg.refine_labels) used.push_back(TemplateId::refine_label);
    check_templates(*templates, used);
    const auto backends = load_backends(o.backend_config);
    check_backend(backends.for_role("stage1"));
    if (cfg.refine_labels) check_backend(backends.for_role("refine"));

    auto data = load_dataset(o.dataset, true);
    for (const auto& p : data.problems) err << "invalid: " << p << "\n";
    if (data.valid.empty()) throw InvalidArgument("no valid trajectories in " + o.dataset + "; nothing written");

    auto stage1 = gateway::make_gateway(backends.for_role("stage1"), templates, data.image_root);
    std::unique_ptr<gateway::Gateway> refine;
    if (cfg.refine_labels) refine = gateway::make_gateway(backends.for_role("refine"), templates, data.image_root);
    const auto build = pipeline::build_finetune_dataset(data.valid, cfg, {*stage1, refine.get()}, o.seed,
                                                        o.parallelism);
    for (const auto& s : build.skips) err << "skipped " << s.trajectory_id << ": " << s.reason << "\n";
    for (const auto& w : build.warnings) err << "warning: " << w << "\n";
    if (build.examples.empty()) throw InvalidArgument("every trajectory failed; nothing written");

    const fs::path file = o.out;
    pipeline::write_finetune_jsonl(file, build.examples);
    const auto refined = build.refined_count();
    out << "prep-finetune: " << build.examples.size() << " examples (" << refined << " refined, "
        << build.examples.size() - refined << " unchanged), " << build.skips.size() << " skipped\n";

    json backend_json = {{"stage1", gateway::to_json(backends.for_role("stage1"))}};
    if (cfg.refine_labels) backend_json["refine"] = gateway::to_json(backends.for_role("refine"));
    manifest.config = {{"ablation", cfg}, {"backends", backend_json}, {"templates", template_digests(*templates)}};
    manifest.inputs.push_back(describe_input(o.dataset));
    manifest.output = file.generic_string();
    manifest.finished_at = utc_timestamp();
    write_manifest(file.has_parent_path() ? file.parent_path() : fs::path("."), manifest);
    return build.skips.empty() && data.problems.empty() ? kExitOk : kExitPartial;
}

void add_run_flags(CLI::App* cmd, Options& o) {
    cmd->add_option("--max-steps", o.max_steps, "Frame-dropping cap per trajectory")->capture_default_str();
    cmd->add_flag("--no-context", o.no_context, "Summarize each step without its neighbors");
    cmd->add_flag("--unstructured", o.unstructured, "Free-form stage-1 summaries");
    cmd->add_flag("--no-refine", o.no_refine, "Skip label refinement (fine-tuning export only)");
    cmd->add_flag("--no-finetune", o.no_finetune, "Use the stage2_untuned (or stage1) backend for stage 2");
}

}  // namespace

std::vector<PipelineTrace> load_traces(const fs::path& dir, std::vector<std::string>& errors) {
    if (!fs::is_directory(dir)) throw InvalidArgument("trace directory not found: " + dir.string());
    fs::path root = dir;
    if (fs::is_directory(dir / "traces")) root = dir / "traces";
    std::vector<fs::path> files;
    for (const auto& e : fs::directory_iterator(root)) {
        if (e.is_regular_file() && e.path().extension() == ".json") files.push_back(e.path());
    }
    std::sort(files.begin(), files.end());
    std::vector<PipelineTrace> out;
    for (const auto& f : files) {
        const auto name = f.filename().string();
        if (name == "manifest.json" || name == "run_summary.json") continue;
        try {
            out.push_back(trace_from_string(read_file(f)));
        } catch (const std::exception& e) {
            errors.push_back(f.generic_string() + ": " + e.what());
        }
    }
    return out;
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    Options o;
    CLI::App app{"Intent extraction from UI interaction trajectories", "intentflow"};
    app.set_version_flag("--version", std::string(INTENTFLOW_VERSION));
    app.require_subcommand(1);

    auto* ingest = app.add_subcommand("ingest", "Convert a source dataset into trajectory JSONL + PNGs");
    ingest->add_option("--layout", o.layout, "mind2web or androidcontrol")->required();
    ingest->add_option("--source", o.source, "Directory of <episode>/episode.json records")->required();
    ingest->add_option("--out", o.out, "Output directory")->required();
    ingest->add_option("--backend-config", o.backend_config, "Backends; role 'clean' cleans android labels");
    ingest->add_flag("--no-clean", o.no_clean, "Do not clean android labels");

    auto* run = app.add_subcommand("run", "Predict intents for every trajectory");
    run->add_option("--method", o.method, "cot, e2e, decomposed, decomposed-latency-opt")->required();
    run->add_option("--dataset", o.dataset, "Trajectory JSONL")->required();
    run->add_option("--backend-config", o.backend_config, "Backend config (default: synthetic stub)");
    run->add_option("--out", o.out, "Output directory")->required();
    add_run_flags(run, o);

    auto* evalc = app.add_subcommand("eval", "BiFact and Bi-NLI scores for a run");
    auto* funnel = app.add_subcommand("funnel", "Stage-level error attribution for a decomposed run");
    for (auto* cmd : {evalc, funnel}) {
        cmd->add_option("--traces", o.traces, "Run output directory or trace directory")->required();
        cmd->add_option("--dataset", o.dataset, "Gold trajectory JSONL")->required();
        cmd->add_option("--judge-config", o.judge_config, "Judge backend (+ optional 'nli') config");
        cmd->add_option("--judge-cache", o.judge_cache, "Judge cache file (default: <out>/judge_cache.json)");
        cmd->add_option("--out", o.out, "Report directory")->required();
    }

    auto* cost = app.add_subcommand("cost", "Price and end-of-session latency table");
    cost->add_option("--shape", o.shape, "Declarative pipeline-shape JSON");
    cost->add_option("--traces", o.traces, "Run output directory");
    cost->add_option("--models", o.models, "Price/latency model parameters");
    cost->add_option("--out", o.out, "Report directory");

    auto* prep = app.add_subcommand("prep-finetune", "Export stage-2 fine-tuning examples");
    prep->add_option("--dataset", o.dataset, "Training-split trajectory JSONL")->required();
    prep->add_option("--backend-config", o.backend_config, "Backends for roles stage1 and refine");
    prep->add_option("--out", o.out, "Export file (JSONL)")->required();
    add_run_flags(prep, o);

    for (auto* cmd : {ingest, run, evalc, funnel, cost, prep}) {
        cmd->add_option("--seed", o.seed, "Global seed")->capture_default_str();
        cmd->add_option("--parallelism", o.parallelism, "Worker threads")->capture_default_str();
        cmd->add_option("--prompts", o.prompts, "Prompt template directory");
    }

    std::vector<char*> argv;
    std::vector<std::string> storage = args;
    if (storage.empty()) storage.emplace_back("intentflow");
    for (auto& a : storage) argv.push_back(a.data());
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::Success&) {
        out << (args.size() > 1 && args[1] == "--version" ? std::string(INTENTFLOW_VERSION) + "\n" : app.help());
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << "usage error: " << e.what() << "\n" << app.help();
        return kExitUsage;
    }
    if (o.parallelism < 1) o.parallelism = 1;

    try {
        if (*ingest) return cmd_ingest(o, storage, out, err);
        if (*run) return cmd_run(o, storage, out, err);
        if (*evalc) return cmd_eval(o, storage, out, err);
        if (*funnel) return cmd_funnel(o, storage, out, err);
        if (*cost) return cmd_cost(o, storage, out, err);
        if (*prep) return cmd_prep_finetune(o, storage, out, err);
    } catch (const UnsupportedMethodError& e) {
        err << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kExitUsage;
    }
    return kExitUsage;
}

}  // namespace intentflow::cli
