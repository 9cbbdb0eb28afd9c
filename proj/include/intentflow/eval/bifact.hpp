#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "intentflow/eval/facts.hpp"
#include "intentflow/gateway/nli.hpp"

namespace intentflow::eval {

struct FactJudgment {
    std::string fact;
    bool entailed = false;
    bool flagged = false;
};

struct FactAlignment {
    std::vector<FactJudgment> predicted_in_gold;  // precision direction
    std::vector<FactJudgment> gold_in_predicted;  // recall direction
    std::int64_t matched_predicted = 0;
    std::int64_t total_predicted = 0;
    std::int64_t matched_gold = 0;
    std::int64_t total_gold = 0;
};

struct BiFactScore {
    std::optional<double> precision;  // undefined for an empty prediction
    std::optional<double> recall;     // undefined for an empty gold set
    double f1 = 0.0;
    FactAlignment alignment;
};

/// Entailment oracle: is `fact` supported by `against`?
using EntailmentFn = std::function<FactJudgment(const std::string& fact, const FactSet& against)>;

/// Judges every predicted fact against the gold set and every gold fact
/// against the predicted set.
FactAlignment align(const FactSet& gold, const FactSet& predicted, const EntailmentFn& entails);

/// P = matched_predicted / total_predicted, R = matched_gold / total_gold,
/// F1 = 2PR / (P + R) and 0 when P + R = 0 or either side is undefined.
BiFactScore score_alignment(FactAlignment alignment);

BiFactScore bifact(const FactSet& gold, const FactSet& predicted, FactJudge& judge,
                   const std::string& trajectory_id = {});

struct Aggregate {
    std::optional<double> precision;
    std::optional<double> recall;
    double f1 = 0.0;
};

struct MicroAverage : Aggregate {
    std::int64_t matched_predicted = 0;
    std::int64_t total_predicted = 0;
    std::int64_t matched_gold = 0;
    std::int64_t total_gold = 0;
};

/// Sums counts over the dataset; F1 is the harmonic mean of micro P and R.
/// Throws InvalidArgument when there are no alignments or no facts at all.
MicroAverage micro_average(const std::vector<FactAlignment>& alignments);

/// Means of the defined per-example P, R and F1 values.
Aggregate macro_average(const std::vector<BiFactScore>& scores);

/// (p(gold ⊢ predicted) + p(predicted ⊢ gold)) / 2.
double nli_bidirectional(const std::string& gold, const std::string& predicted, gateway::NliBackend& nli);

}  // namespace intentflow::eval
