#include "intentflow/eval/facts.hpp"

#include <algorithm>
#include <cctype>

#include "intentflow/core/digest.hpp"
#include "intentflow/core/error.hpp"
#include "intentflow/core/text.hpp"

namespace intentflow::eval {

std::string_view to_string(FactSource s) noexcept {
    switch (s) {
        case FactSource::gold: return "gold";
        case FactSource::predicted: return "predicted";
        case FactSource::summary_pool: return "summary_pool";
    }
    return "gold";
}

FactSet::FactSet(FactSource source, const std::vector<std::string>& facts, bool flagged)
    : source_(source), flagged_(flagged) {
    for (const auto& f : facts) {
        auto t = text::trim(text::single_line(f));
        if (t.empty() || contains_folded(t)) continue;
        facts_.push_back(std::move(t));
    }
}

bool FactSet::contains_folded(std::string_view fact) const {
    const auto t = text::trim(fact);
    return std::any_of(facts_.begin(), facts_.end(), [&](const auto& f) { return text::iequals(f, t); });
}

std::string FactSet::digest() const {
    std::vector<std::string> folded;
    for (const auto& f : facts_) folded.push_back(text::to_lower(f));
    std::sort(folded.begin(), folded.end());
    return sha256_hex(text::join(folded, "\n"));
}

std::vector<std::string> parse_fact_list(std::string_view reply) {
    std::vector<std::string> bullets;
    std::vector<std::string> lines;
    for (const auto& line : text::split_lines(reply)) {
        std::string item;
        if (text::strip_bullet(line, item)) {
            if (!text::trim(item).empty()) bullets.push_back(text::trim(item));
        } else if (auto t = text::trim(line); !t.empty()) {
            lines.push_back(std::move(t));
        }
    }
    return bullets.empty() ? lines : bullets;
}

std::optional<bool> parse_verdict(std::string_view reply) {
    auto t = text::to_lower(text::trim(reply));
    while (!t.empty() && (t.front() == '*' || t.front() == '"' || t.front() == '\'')) t.erase(0, 1);
    std::string word;
    for (char c : t) {
        if (!std::isalpha(static_cast<unsigned char>(c))) break;
        word += c;
    }
    if (word == "yes" || word == "true" || word == "supported" || word == "entailed") return true;
    if (word == "no" || word == "false" || word == "unsupported" || word == "not") return false;
    return std::nullopt;
}

FactJudge::FactJudge(gateway::Gateway& backend, std::shared_ptr<JudgeCache> cache)
    : backend_(backend), cache_(cache ? std::move(cache) : std::make_shared<JudgeCache>()) {
    const auto& cfg = backend_.config();
    fingerprint_ = sha256_hex(cfg.provider + "\n" + cfg.model + "\n" +
                              backend_.templates().get(gateway::TemplateId::decompose_facts).text() + "\n" +
                              backend_.templates().get(gateway::TemplateId::judge_entailment).text());
}

std::string FactJudge::key(std::string_view kind, std::string_view payload) const {
    return sha256_hex(fingerprint_ + "\n" + std::string(kind) + "\n" + std::string(payload));
}

FactSet FactJudge::decompose(const std::string& input, FactSource source, const std::string& trajectory_id) {
    const auto body = text::trim(input);
    if (body.empty()) throw InvalidArgument("cannot decompose empty text");
    const auto k = key("decompose", body);
    if (auto hit = cache_->decomposition(k)) return FactSet(source, hit->facts, hit->flagged);

    gateway::GenerationRequest req;
    req.template_id = gateway::TemplateId::decompose_facts;
    req.variables["intent"] = body;
    req.max_output_tokens = 256;
    req.trajectory_id = trajectory_id;
    req.call_role = "decompose_facts";
    calls_.fetch_add(1);
    const auto result = backend_.generate(req);
    calls_.fetch_add(static_cast<std::uint64_t>(result.attempts - 1));

    CachedDecomposition d{parse_fact_list(result.text), false};
    FactSet set(source, d.facts);
    if (set.empty()) {
        d = {{body}, true};
        set = FactSet(source, d.facts, true);
    }
    cache_->put_decomposition(k, d);
    return set;
}

Verdict FactJudge::judge(const std::string& fact, const FactSet& against, const std::string& trajectory_id) {
    const auto f = text::trim(fact);
    if (f.empty()) throw InvalidArgument("cannot judge an empty fact");
    const auto k = key("judge", f + "\n" + against.digest());
    if (auto hit = cache_->verdict(k)) return {hit->supported, hit->flagged};

    std::string listing;
    for (const auto& a : against.facts()) listing += "- " + a + "\n";
    if (listing.empty()) listing = "(no facts)\n";

    gateway::GenerationRequest req;
    req.template_id = gateway::TemplateId::judge_entailment;
    req.variables["facts"] = listing;
    req.variables["fact"] = f;
    req.max_output_tokens = 8;
    req.trajectory_id = trajectory_id;
    req.call_role = "judge_entailment";

    Verdict v;
    bool parsed = false;
    for (int attempt = 0; attempt < 2 && !parsed; ++attempt) {
        if (attempt == 1) req.call_role = "judge_retry";
        calls_.fetch_add(1);
        const auto result = backend_.generate(req);
        calls_.fetch_add(static_cast<std::uint64_t>(result.attempts - 1));
        if (auto answer = parse_verdict(result.text)) {
            v.supported = *answer;
            parsed = true;
        }
    }
    if (!parsed) v = {false, true};
    cache_->put_verdict(k, {v.supported, v.flagged});
    return v;
}

FactSet decompose_facts(const std::string& text, FactSource source, FactJudge& judge) {
    return judge.decompose(text, source);
}

Verdict judge_fact(const std::string& fact, const FactSet& against, FactJudge& judge) {
    return judge.judge(fact, against);
}

}  // namespace intentflow::eval
