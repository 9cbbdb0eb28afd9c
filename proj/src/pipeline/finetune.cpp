#include "intentflow/pipeline/finetune.hpp"

#include <memory>

#include "intentflow/core/error.hpp"
#include "intentflow/core/parallel.hpp"
#include "intentflow/core/serialize.hpp"
#include "intentflow/core/text.hpp"
#include "intentflow/core/validate.hpp"
#include "intentflow/pipeline/summaries.hpp"

namespace intentflow::pipeline {

std::string label_string(const IntentStatement& s) {
    if (s.platform_prefix) return *s.platform_prefix + "; " + s.text;
    return s.text;
}

RefineOutcome refine_label(const IntentStatement& gold, const std::vector<InteractionSummary>& summaries,
                           gateway::Gateway& backend, bool structured, const CallContext& ctx) {
    for (const auto& s : summaries) {
        if (!s.speculative_intent.empty()) {
            throw InvalidArgument("refine_label needs stripped summaries (step " + std::to_string(s.step_index) + ")");
        }
    }
    gateway::GenerationRequest req;
    req.template_id = gateway::TemplateId::refine_label;
    req.variables["summaries"] = render_summaries(summaries, structured);
    req.variables["intent"] = gold.text;
    req.max_output_tokens = 128;
    req.trajectory_id = ctx.trajectory_id;
    req.call_role = "refine_label";

    const auto result = backend.generate(req, ctx.recorder);
    RefineOutcome out;
    auto refined = extract_labeled_intent(result.text).value_or(text::trim(text::single_line(result.text)));
    if (refined.empty()) {
        out.target = label_string(gold);
        out.flagged = true;
        return out;
    }
    IntentStatement target{refined, gold.platform_prefix};
    // A reply that repeats the platform identifier is accepted as-is.
    if (gold.platform_prefix) {
        const auto split = split_platform_prefix(refined);
        if (split.platform_prefix && text::iequals(*split.platform_prefix, *gold.platform_prefix)) {
            target.text = text::trim(split.text);
        }
    }
    out.target = label_string(target);
    out.refined = target.text != gold.text;
    return out;
}

std::size_t FinetuneBuild::refined_count() const {
    std::size_t n = 0;
    for (const auto& e : examples) n += e.target_was_refined ? 1 : 0;
    return n;
}

namespace {

struct Slot {
    std::optional<FinetuneExample> example;
    std::optional<std::string> error;
    std::vector<std::string> warnings;
    std::vector<CallRecord> calls;
};

}  // namespace

FinetuneBuild build_finetune_dataset(const std::vector<Trajectory>& trajectories, const AblationConfig& cfg,
                                     FinetuneBackends backends, std::uint64_t seed, std::size_t parallelism) {
    if (cfg.refine_labels && backends.refine == nullptr) {
        throw ConfigError("label refinement is enabled but no refine backend is configured");
    }
    std::vector<Slot> slots(trajectories.size());
    parallel_for(trajectories.size(), parallelism, [&](std::size_t k) {
        const auto& t = trajectories[k];
        auto& slot = slots[k];
        try {
            const auto dropped = drop_frames(t, cfg.max_steps, frame_seed(seed, t.id));
            PipelineTrace trace;
            trace.trajectory_id = t.id;
            const bool ok = summarize_steps(dropped, dropped.steps.size(), cfg, backends.stage1, false, trace);
            slot.calls = trace.calls;
            slot.warnings = trace.warnings;
            if (!ok) {
                slot.error = trace.error.value_or("stage-1 failure");
                return;
            }

            FinetuneExample ex;
            ex.trajectory_id = t.id;
            ex.input_summaries = trace.summaries;
            ex.input = backends.stage1.templates()
                           .get(gateway::TemplateId::fuse_intent)
                           .render(fusion_variables(trace.summaries, std::nullopt, cfg.structured_summaries));
            ex.original_target = label_string(t.gold_intent);
            ex.target_intent = ex.original_target;
            if (cfg.refine_labels) {
                gateway::CallRecorder recorder;
                RefineOutcome r;
                try {
                    r = refine_label(t.gold_intent, trace.summaries, *backends.refine, cfg.structured_summaries,
                                     CallContext{t.id, &recorder, false});
                } catch (const Error&) {
                    for (auto& c : recorder.records()) slot.calls.push_back(std::move(c));
                    throw;
                }
                for (auto& c : recorder.records()) slot.calls.push_back(std::move(c));
                ex.target_intent = r.target;
                ex.target_was_refined = r.refined;
                ex.refine_flagged = r.flagged;
                if (r.flagged) slot.warnings.push_back(t.id + ": empty refinement, original target kept");
            }
            slot.example = std::move(ex);
        } catch (const Error& e) {
            slot.error = e.what();
        }
    });

    FinetuneBuild out;
    for (std::size_t k = 0; k < slots.size(); ++k) {
        auto& slot = slots[k];
        for (auto& w : slot.warnings) out.warnings.push_back(std::move(w));
        for (auto& c : slot.calls) out.calls.push_back(std::move(c));
        if (slot.example) {
            out.examples.push_back(std::move(*slot.example));
        } else {
            out.skips.push_back({trajectories[k].id, slot.error.value_or("unknown failure")});
        }
    }
    return out;
}

std::filesystem::path finetune_meta_path(const std::filesystem::path& file) {
    auto p = file;
    p.replace_extension(".meta.jsonl");
    return p;
}

void write_finetune_jsonl(const std::filesystem::path& file, const std::vector<FinetuneExample>& examples) {
    std::string data;
    std::string meta;
    for (const auto& e : examples) {
        json line;
        line["input"] = e.input;
        line["target"] = e.target_intent;
        data += line.dump() + "\n";

        json m;
        m["trajectory_id"] = e.trajectory_id;
        m["target_before"] = e.original_target;
        m["target_after"] = e.target_intent;
        m["target_was_refined"] = e.target_was_refined;
        m["refine_flagged"] = e.refine_flagged;
        m["input_summaries"] = e.input_summaries;
        meta += m.dump() + "\n";
    }
    write_file(file, data);
    write_file(finetune_meta_path(file), meta);
}

}  // namespace intentflow::pipeline
