#pragma once

#include <atomic>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "intentflow/eval/judge_cache.hpp"
#include "intentflow/gateway/gateway.hpp"

namespace intentflow::eval {

enum class FactSource { gold, predicted, summary_pool };

std::string_view to_string(FactSource s) noexcept;

/// Atomic facts of one text. Facts are trimmed, non-empty, and unique after
/// ASCII case folding (the first spelling is kept).
class FactSet {
public:
    FactSet() = default;
    FactSet(FactSource source, const std::vector<std::string>& facts, bool flagged = false);

    [[nodiscard]] FactSource source() const noexcept { return source_; }
    [[nodiscard]] const std::vector<std::string>& facts() const noexcept { return facts_; }
    [[nodiscard]] std::size_t size() const noexcept { return facts_.size(); }
    [[nodiscard]] bool empty() const noexcept { return facts_.empty(); }
    // Set when the decomposition fell back to the whole text.
    [[nodiscard]] bool flagged() const noexcept { return flagged_; }
    [[nodiscard]] bool contains_folded(std::string_view fact) const;
    // Order-independent digest of the folded facts.
    [[nodiscard]] std::string digest() const;

private:
    FactSource source_ = FactSource::gold;
    std::vector<std::string> facts_;
    bool flagged_ = false;
};

/// Facts from a decomposition reply: bullet items when any line is a bullet,
/// otherwise every non-empty line.
std::vector<std::string> parse_fact_list(std::string_view reply);

/// Parses a constrained yes/no reply; nullopt when it is neither.
std::optional<bool> parse_verdict(std::string_view reply);

struct Verdict {
    bool supported = false;
    bool flagged = false;  // reply unparseable twice; counted as not supported
};

/// LLM-backed fact decomposition and entailment judging with a shared cache.
/// Thread-safe.
class FactJudge {
public:
    FactJudge(gateway::Gateway& backend, std::shared_ptr<JudgeCache> cache);

    /// Throws InvalidArgument on empty text. An empty decomposition yields the
    /// whole text as a single flagged fact.
    FactSet decompose(const std::string& text, FactSource source, const std::string& trajectory_id = {});

    /// Whether `fact` is supported by the facts of `against`.
    Verdict judge(const std::string& fact, const FactSet& against, const std::string& trajectory_id = {});

    /// Backend calls issued by this judge, retries included.
    [[nodiscard]] std::uint64_t backend_calls() const noexcept { return calls_.load(); }
    [[nodiscard]] JudgeCache& cache() noexcept { return *cache_; }

private:
    std::string key(std::string_view kind, std::string_view payload) const;

    gateway::Gateway& backend_;
    std::shared_ptr<JudgeCache> cache_;
    std::string fingerprint_;
    std::atomic<std::uint64_t> calls_{0};
};

FactSet decompose_facts(const std::string& text, FactSource source, FactJudge& judge);
Verdict judge_fact(const std::string& fact, const FactSet& against, FactJudge& judge);

}  // namespace intentflow::eval
