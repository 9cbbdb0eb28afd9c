#include "intentflow/pipeline/methods.hpp"

#include <memory>

#include "intentflow/core/digest.hpp"
#include "intentflow/core/error.hpp"
#include "intentflow/core/parallel.hpp"
#include "intentflow/core/text.hpp"
#include "intentflow/core/validate.hpp"
#include "intentflow/ingest/actions.hpp"
#include "intentflow/pipeline/summaries.hpp"

namespace intentflow::pipeline {

using gateway::GenerationRequest;
using gateway::TemplateId;

namespace {

constexpr int kSummaryMaxTokens = 512;
constexpr int kIntentMaxTokens = 128;
constexpr int kCotMaxTokens = 1024;

std::string step_label(const Interaction& step) {
    return "step " + std::to_string(step.index);
}

IntentStatement to_intent(const std::string& raw) {
    const auto t = text::trim(text::single_line(raw));
    if (t.empty()) throw BackendError("backend returned an empty intent", false);
    auto intent = split_platform_prefix(t);
    intent.text = text::trim(intent.text);
    if (intent.text.empty()) throw BackendError("backend returned a platform identifier without an intent", false);
    return intent;
}

PipelineTrace new_trace(const Trajectory& t, Method method, const AblationConfig& cfg, std::uint64_t seed) {
    PipelineTrace trace;
    trace.trajectory_id = t.id;
    trace.method = method;
    trace.config = cfg;
    trace.seed = seed;
    return trace;
}

std::vector<int> original_positions(const Trajectory& dropped) {
    std::vector<int> out;
    for (const auto& s : dropped.steps) out.push_back(s.original_index.value_or(s.index));
    return out;
}

PipelineTrace run_single_call(const Trajectory& t, const AblationConfig& cfg, gateway::Gateway& backend,
                              std::uint64_t seed, Method method) {
    auto trace = new_trace(t, method, cfg, seed);
    gateway::CallRecorder recorder;
    try {
        const auto dropped = drop_frames(t, cfg.max_steps, frame_seed(seed, t.id));
        trace.retained_steps = original_positions(dropped);

        GenerationRequest req;
        req.template_id = method == Method::cot ? TemplateId::cot : TemplateId::e2e;
        std::string actions;
        for (const auto& step : dropped.steps) {
            actions += "Step " + std::to_string(step.index) + ": " + ingest::format_action_string(step.action) + "\n";
            req.images.push_back(step.screenshot);
        }
        req.variables["actions"] = actions;
        req.variables["step_count"] = std::to_string(dropped.steps.size());
        req.max_output_tokens = method == Method::cot ? kCotMaxTokens : kIntentMaxTokens;
        req.trajectory_id = t.id;
        req.call_role = std::string(gateway::to_string(req.template_id));
        req.end_of_session = true;

        const auto result = backend.generate(req, &recorder);
        auto answer = extract_labeled_intent(result.text);
        if (!answer) {
            if (method == Method::cot) {
                trace.warnings.emplace_back("no 'Intent:' line in chain-of-thought output; using the full text");
            }
            answer = result.text;
        }
        trace.predicted_intent = to_intent(*answer);
    } catch (const Error& e) {
        trace.error = e.what();
    }
    trace.calls = recorder.records();
    return trace;
}

}  // namespace

namespace {

struct StepSlot {
    std::optional<SummaryOutcome> outcome;
    std::optional<std::string> error;
    gateway::CallRecorder recorder;
};

}  // namespace

bool summarize_steps(const Trajectory& dropped, std::size_t count, const AblationConfig& cfg,
                     gateway::Gateway& backend, bool last_is_end_of_session, PipelineTrace& trace) {
    std::vector<std::unique_ptr<StepSlot>> slots;
    for (std::size_t i = 0; i < count; ++i) slots.push_back(std::make_unique<StepSlot>());

    parallel_for(count, static_cast<std::size_t>(backend.config().max_concurrency), [&](std::size_t i) {
        auto& slot = *slots[i];
        try {
            const auto window = build_context_window(dropped, static_cast<int>(i + 1));
            CallContext ctx{dropped.id, &slot.recorder,
                            last_is_end_of_session && i + 1 == dropped.steps.size()};
            slot.outcome = summarize_interaction(window, cfg, backend, ctx);
        } catch (const Error& e) {
            slot.error = e.what();
        }
    });

    bool ok = true;
    for (auto& slot : slots) {
        for (auto& rec : slot->recorder.records()) trace.calls.push_back(std::move(rec));
        if (slot->outcome) {
            for (auto& w : slot->outcome->warnings) trace.warnings.push_back(std::move(w));
            trace.raw_summaries.push_back(slot->outcome->summary);
            trace.summaries.push_back(strip_speculative(slot->outcome->summary));
        }
        if (slot->error && ok) {
            trace.error = *slot->error;
            ok = false;
        }
    }
    return ok;
}

namespace {

PipelineTrace run_two_stage(const Trajectory& t, const AblationConfig& cfg, Stages stages, std::uint64_t seed,
                            bool latency_optimized) {
    auto trace = new_trace(t, latency_optimized ? Method::decomposed_latency_opt : Method::decomposed, cfg, seed);
    try {
        const auto dropped = drop_frames(t, cfg.max_steps, frame_seed(seed, t.id));
        trace.retained_steps = original_positions(dropped);
        const auto n = dropped.steps.size();
        if (n == 0) throw InvalidArgument("trajectory has no steps");

        const auto summarized = latency_optimized ? n - 1 : n;
        if (!summarize_steps(dropped, summarized, cfg, stages.stage1, !latency_optimized, trace)) {
            return trace;
        }

        std::optional<FinalFrame> final_frame;
        if (latency_optimized) final_frame = FinalFrame{dropped.steps.back()};

        gateway::CallRecorder recorder;
        try {
            trace.predicted_intent =
                fuse_intent(trace.summaries, stages.stage2, final_frame, cfg, CallContext{t.id, &recorder, true});
        } catch (const Error&) {
            for (auto& rec : recorder.records()) trace.calls.push_back(std::move(rec));
            throw;
        }
        for (auto& rec : recorder.records()) trace.calls.push_back(std::move(rec));
    } catch (const Error& e) {
        trace.error = e.what();
    }
    return trace;
}

}  // namespace

std::uint64_t frame_seed(std::uint64_t seed, const std::string& trajectory_id) {
    return derive_seed(seed, trajectory_id, -1);
}

SummaryOutcome summarize_interaction(const ContextWindow& window, const AblationConfig& cfg,
                                     gateway::Gateway& backend, const CallContext& ctx) {
    GenerationRequest req;
    req.template_id = cfg.structured_summaries ? TemplateId::summarize : TemplateId::summarize_unstructured;
    req.trajectory_id = ctx.trajectory_id;
    req.step_index = window.current.index;
    req.call_role = "summarize";
    req.end_of_session = ctx.end_of_session;
    req.max_output_tokens = kSummaryMaxTokens;

    std::vector<std::string> roles;
    std::string context;
    const bool with_context = cfg.use_context_window;
    if (with_context && window.previous) {
        req.images.push_back(window.previous->screenshot);
        roles.push_back("the previous screen (" + step_label(*window.previous) + ")");
        context += "Previous action (" + step_label(*window.previous) +
                   "): " + ingest::format_action_string(window.previous->action) + "\n";
    }
    req.images.push_back(window.current.screenshot);
    roles.push_back("the current screen (" + step_label(window.current) + ")");
    if (with_context && window.next) {
        req.images.push_back(window.next->screenshot);
        roles.push_back("the next screen (" + step_label(*window.next) + ")");
        context += "Next action (" + step_label(*window.next) +
                   "): " + ingest::format_action_string(window.next->action) + "\n";
    }
    std::string screens = roles.size() == 1 ? "Attached screenshot: " : "Attached screenshots, in order: ";
    for (std::size_t i = 0; i < roles.size(); ++i) {
        if (i) screens += ", ";
        if (roles.size() > 1) screens += std::to_string(i + 1) + ") ";
        screens += roles[i];
    }
    screens += ".";
    if (!context.empty()) context = "\nFor context:\n" + context;

    req.variables["screens"] = screens;
    req.variables["step_index"] = std::to_string(window.current.index);
    req.variables["step_count"] = std::to_string(window.step_count);
    req.variables["current_action"] = ingest::format_action_string(window.current.action);
    req.variables["context"] = context;

    SummaryOutcome out;
    auto result = backend.generate(req, ctx.recorder);
    if (!cfg.structured_summaries) {
        out.summary.step_index = window.current.index;
        const auto body = text::trim(result.text);
        if (body.empty()) {
            out.summary.parse_fallback = true;
            out.warnings.push_back("step " + std::to_string(window.current.index) + ": empty free-form summary");
        } else {
            out.summary.user_actions.push_back(body);
        }
        return out;
    }

    if (auto parsed = parse_structured_summary(result.text, window.current.index)) {
        out.summary = std::move(*parsed);
        return out;
    }
    out.warnings.push_back("step " + std::to_string(window.current.index) +
                           ": unparseable structured summary, retrying once");
    req.call_role = "summarize_retry";
    result = backend.generate(req, ctx.recorder);
    if (auto parsed = parse_structured_summary(result.text, window.current.index)) {
        out.summary = std::move(*parsed);
        return out;
    }
    out.warnings.push_back("step " + std::to_string(window.current.index) +
                           ": structured summary still unparseable; keeping raw text");
    out.summary.step_index = window.current.index;
    out.summary.parse_fallback = true;
    if (auto body = text::trim(result.text); !body.empty()) out.summary.user_actions.push_back(body);
    return out;
}

gateway::Variables fusion_variables(const std::vector<InteractionSummary>& summaries,
                                    const std::optional<FinalFrame>& final_frame, bool structured) {
    gateway::Variables vars;
    auto block = render_summaries(summaries, structured);
    if (block.empty()) block = "(no earlier interactions)\n";
    vars["summaries"] = block;
    if (final_frame) {
        vars["final_step_index"] = std::to_string(final_frame->step.index);
        vars["final_action"] = ingest::format_action_string(final_frame->step.action);
    }
    return vars;
}

IntentStatement fuse_intent(const std::vector<InteractionSummary>& summaries, gateway::Gateway& backend,
                            const std::optional<FinalFrame>& final_frame, const AblationConfig& cfg,
                            const CallContext& ctx) {
    if (summaries.empty() && !final_frame) throw InvalidArgument("fuse_intent needs at least one summary");
    for (const auto& s : summaries) {
        if (!s.speculative_intent.empty()) {
            throw InvalidArgument("summary for step " + std::to_string(s.step_index) +
                                  " still carries speculative intent");
        }
    }
    GenerationRequest req;
    req.template_id = final_frame ? TemplateId::fuse_intent_visual : TemplateId::fuse_intent;
    req.variables = fusion_variables(summaries, final_frame, cfg.structured_summaries);
    if (final_frame) req.images.push_back(final_frame->step.screenshot);
    req.max_output_tokens = kIntentMaxTokens;
    req.trajectory_id = ctx.trajectory_id;
    req.call_role = "fuse_intent";
    req.end_of_session = ctx.end_of_session;

    const auto result = backend.generate(req, ctx.recorder);
    return to_intent(extract_labeled_intent(result.text).value_or(result.text));
}

PipelineTrace run_cot(const Trajectory& t, const AblationConfig& cfg, gateway::Gateway& backend,
                      std::uint64_t seed) {
    return run_single_call(t, cfg, backend, seed, Method::cot);
}

PipelineTrace run_e2e(const Trajectory& t, const AblationConfig& cfg, gateway::Gateway& backend,
                      std::uint64_t seed) {
    return run_single_call(t, cfg, backend, seed, Method::e2e);
}

PipelineTrace run_decomposed(const Trajectory& t, const AblationConfig& cfg, Stages stages, std::uint64_t seed) {
    return run_two_stage(t, cfg, stages, seed, false);
}

PipelineTrace run_decomposed_latency_opt(const Trajectory& t, const AblationConfig& cfg, Stages stages,
                                         std::uint64_t seed) {
    return run_two_stage(t, cfg, stages, seed, true);
}

PipelineTrace run_method(Method method, const Trajectory& t, const AblationConfig& cfg, Stages stages,
                         std::uint64_t seed) {
    switch (method) {
        case Method::cot: return run_cot(t, cfg, stages.stage1, seed);
        case Method::e2e: return run_e2e(t, cfg, stages.stage1, seed);
        case Method::decomposed: return run_decomposed(t, cfg, stages, seed);
        case Method::decomposed_latency_opt: return run_decomposed_latency_opt(t, cfg, stages, seed);
    }
    throw InvalidArgument("unknown method");
}

}  // namespace intentflow::pipeline
