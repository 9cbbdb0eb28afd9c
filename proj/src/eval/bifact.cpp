#include "intentflow/eval/bifact.hpp"

#include "intentflow/core/error.hpp"
#include "intentflow/core/text.hpp"

namespace intentflow::eval {

namespace {

double harmonic(const std::optional<double>& p, const std::optional<double>& r) {
    if (!p || !r || *p + *r == 0.0) return 0.0;
    return 2.0 * *p * *r / (*p + *r);
}

}  // namespace

FactAlignment align(const FactSet& gold, const FactSet& predicted, const EntailmentFn& entails) {
    FactAlignment a;
    for (const auto& f : predicted.facts()) {
        auto j = entails(f, gold);
        a.matched_predicted += j.entailed ? 1 : 0;
        a.predicted_in_gold.push_back(std::move(j));
    }
    for (const auto& f : gold.facts()) {
        auto j = entails(f, predicted);
        a.matched_gold += j.entailed ? 1 : 0;
        a.gold_in_predicted.push_back(std::move(j));
    }
    a.total_predicted = static_cast<std::int64_t>(predicted.size());
    a.total_gold = static_cast<std::int64_t>(gold.size());
    return a;
}

BiFactScore score_alignment(FactAlignment alignment) {
    BiFactScore s;
    if (alignment.total_predicted > 0) {
        s.precision = static_cast<double>(alignment.matched_predicted) / static_cast<double>(alignment.total_predicted);
    }
    if (alignment.total_gold > 0) {
        s.recall = static_cast<double>(alignment.matched_gold) / static_cast<double>(alignment.total_gold);
    }
    // An empty prediction recalls nothing.
    if (alignment.total_predicted == 0 && alignment.total_gold > 0) s.recall = 0.0;
    s.f1 = harmonic(s.precision, s.recall);
    s.alignment = std::move(alignment);
    return s;
}

BiFactScore bifact(const FactSet& gold, const FactSet& predicted, FactJudge& judge, const std::string& trajectory_id) {
    return score_alignment(align(gold, predicted, [&](const std::string& fact, const FactSet& against) {
        if (against.empty()) return FactJudgment{fact, false, false};
        const auto v = judge.judge(fact, against, trajectory_id);
        return FactJudgment{fact, v.supported, v.flagged};
    }));
}

MicroAverage micro_average(const std::vector<FactAlignment>& alignments) {
    if (alignments.empty()) throw InvalidArgument("micro_average needs at least one alignment");
    MicroAverage m;
    for (const auto& a : alignments) {
        m.matched_predicted += a.matched_predicted;
        m.total_predicted += a.total_predicted;
        m.matched_gold += a.matched_gold;
        m.total_gold += a.total_gold;
    }
    if (m.total_predicted == 0 && m.total_gold == 0) throw InvalidArgument("no facts across the dataset");
    if (m.total_predicted > 0) {
        m.precision = static_cast<double>(m.matched_predicted) / static_cast<double>(m.total_predicted);
    }
    if (m.total_gold > 0) m.recall = static_cast<double>(m.matched_gold) / static_cast<double>(m.total_gold);
    m.f1 = harmonic(m.precision, m.recall);
    return m;
}

Aggregate macro_average(const std::vector<BiFactScore>& scores) {
    Aggregate out;
    double p = 0, r = 0, f = 0;
    std::size_t np = 0, nr = 0;
    for (const auto& s : scores) {
        if (s.precision) p += *s.precision, ++np;
        if (s.recall) r += *s.recall, ++nr;
        f += s.f1;
    }
    if (np) out.precision = p / static_cast<double>(np);
    if (nr) out.recall = r / static_cast<double>(nr);
    if (!scores.empty()) out.f1 = f / static_cast<double>(scores.size());
    return out;
}

double nli_bidirectional(const std::string& gold, const std::string& predicted, gateway::NliBackend& nli) {
    if (text::trim(gold).empty() || text::trim(predicted).empty()) {
        throw InvalidArgument("nli_bidirectional needs two non-empty texts");
    }
    const double forward = nli.entailment(gold, predicted);
    const double backward = nli.entailment(predicted, gold);
    return (forward + backward) / 2.0;
}

}  // namespace intentflow::eval
