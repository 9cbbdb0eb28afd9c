#include "intentflow/eval/funnel.hpp"

#include <cstdio>

#include "intentflow/core/error.hpp"
#include "intentflow/core/validate.hpp"
#include "intentflow/pipeline/summaries.hpp"

namespace intentflow::eval {

bool FunnelReport::partition_holds() const noexcept {
    return gold_total == summarization_miss + intent_extraction_miss + survived &&
           predicted_total == intent_extraction_hallucinated + summarization_introduced + correct;
}

FunnelReport& FunnelReport::operator+=(const FunnelReport& o) noexcept {
    gold_total += o.gold_total;
    summarization_miss += o.summarization_miss;
    intent_extraction_miss += o.intent_extraction_miss;
    survived += o.survived;
    predicted_total += o.predicted_total;
    intent_extraction_hallucinated += o.intent_extraction_hallucinated;
    summarization_introduced += o.summarization_introduced;
    correct += o.correct;
    return *this;
}

FunnelReport funnel_partition(const FactSet& gold, const FactSet& pool, const FactSet& predicted,
                              const SupportFn& supported) {
    auto in = [&](const std::string& fact, const FactSet& set) { return !set.empty() && supported(fact, set); };
    FunnelReport r;
    for (const auto& f : gold.facts()) {
        ++r.gold_total;
        if (!in(f, pool)) {
            ++r.summarization_miss;
        } else if (!in(f, predicted)) {
            ++r.intent_extraction_miss;
        } else {
            ++r.survived;
        }
    }
    for (const auto& f : predicted.facts()) {
        ++r.predicted_total;
        if (!in(f, pool)) {
            ++r.intent_extraction_hallucinated;
        } else if (!in(f, gold)) {
            ++r.summarization_introduced;
        } else {
            ++r.correct;
        }
    }
    return r;
}

FunnelReport funnel(const PipelineTrace& trace, const FactSet& gold, FactJudge& judge) {
    if (!is_decomposed(trace.method) || trace.summaries.empty()) {
        throw UnsupportedMethodError("funnel analysis needs a decomposed-method trace with summaries; trace '" +
                                     trace.trajectory_id + "' was produced by method '" +
                                     std::string(to_string(trace.method)) + "'");
    }
    const auto pool_text = pipeline::summary_pool_text(trace.summaries);
    const auto pool = pool_text.empty() ? FactSet(FactSource::summary_pool, {})
                                        : judge.decompose(pool_text, FactSource::summary_pool, trace.trajectory_id);
    FactSet predicted(FactSource::predicted, {});
    if (trace.predicted_intent) {
        const auto text = evaluation_text(*trace.predicted_intent);
        if (!text.empty()) predicted = judge.decompose(text, FactSource::predicted, trace.trajectory_id);
    }
    return funnel_partition(gold, pool, predicted, [&](const std::string& fact, const FactSet& against) {
        return judge.judge(fact, against, trace.trajectory_id).supported;
    });
}

namespace {

std::string row(const char* label, std::int64_t n, std::int64_t total) {
    char buf[160];
    const double pct = total > 0 ? 100.0 * static_cast<double>(n) / static_cast<double>(total) : 0.0;
    std::snprintf(buf, sizeof buf, "  %-34s %6lld  %5.1f%%\n", label, static_cast<long long>(n), pct);
    return buf;
}

}  // namespace

std::string render_funnel(const FunnelReport& r) {
    std::string out;
    out += "Recall side: " + std::to_string(r.gold_total) + " gold facts\n";
    out += row("interaction summarization miss", r.summarization_miss, r.gold_total);
    out += row("intent extraction miss", r.intent_extraction_miss, r.gold_total);
    out += row("survived", r.survived, r.gold_total);
    out += "Precision side: " + std::to_string(r.predicted_total) + " predicted facts\n";
    out += row("intent extraction hallucinated", r.intent_extraction_hallucinated, r.predicted_total);
    out += row("summarization introduced", r.summarization_introduced, r.predicted_total);
    out += row("correct", r.correct, r.predicted_total);
    return out;
}

json funnel_to_json(const FunnelReport& r) {
    json j;
    j["gold_total"] = r.gold_total;
    j["summarization_miss"] = r.summarization_miss;
    j["intent_extraction_miss"] = r.intent_extraction_miss;
    j["survived"] = r.survived;
    j["predicted_total"] = r.predicted_total;
    j["intent_extraction_hallucinated"] = r.intent_extraction_hallucinated;
    j["summarization_introduced"] = r.summarization_introduced;
    j["correct"] = r.correct;
    return j;
}

}  // namespace intentflow::eval
