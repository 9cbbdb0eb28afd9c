#include "intentflow/eval/judge_cache.hpp"

#include <mutex>

#include "intentflow/core/error.hpp"
#include "intentflow/core/serialize.hpp"

namespace intentflow::eval {

JudgeCache::JudgeCache(const JudgeCache& other) {
    std::shared_lock lock(other.mutex_);
    decompositions_ = other.decompositions_;
    verdicts_ = other.verdicts_;
}

JudgeCache& JudgeCache::operator=(const JudgeCache& other) {
    if (this == &other) return *this;
    std::scoped_lock lock(mutex_, other.mutex_);
    decompositions_ = other.decompositions_;
    verdicts_ = other.verdicts_;
    return *this;
}

JudgeCache JudgeCache::load(const std::filesystem::path& file) {
    JudgeCache cache;
    if (!std::filesystem::exists(file)) return cache;
    json j;
    try {
        j = json::parse(read_file(file));
        const auto decompositions = j.value("decompositions", json::object());
        const auto judgments = j.value("judgments", json::object());
        for (const auto& [key, v] : decompositions.items()) {
            cache.decompositions_[key] = {v.at("facts").get<std::vector<std::string>>(), v.value("flagged", false)};
        }
        for (const auto& [key, v] : judgments.items()) {
            cache.verdicts_[key] = {v.at("supported").get<bool>(), v.value("flagged", false)};
        }
    } catch (const json::exception& e) {
        throw ParseError("judge cache " + file.string() + ": " + e.what());
    }
    return cache;
}

void JudgeCache::save(const std::filesystem::path& file) const {
    json j;
    json d = json::object();
    json v = json::object();
    {
        std::shared_lock lock(mutex_);
        for (const auto& [key, value] : decompositions_) d[key] = {{"facts", value.facts}, {"flagged", value.flagged}};
        for (const auto& [key, value] : verdicts_) v[key] = {{"supported", value.supported}, {"flagged", value.flagged}};
    }
    j["decompositions"] = std::move(d);
    j["judgments"] = std::move(v);
    write_file(file, j.dump(1) + "\n");
}

std::optional<CachedDecomposition> JudgeCache::decomposition(const std::string& key) const {
    std::shared_lock lock(mutex_);
    if (auto it = decompositions_.find(key); it != decompositions_.end()) return it->second;
    return std::nullopt;
}

void JudgeCache::put_decomposition(const std::string& key, CachedDecomposition value) {
    std::unique_lock lock(mutex_);
    decompositions_.insert_or_assign(key, std::move(value));
}

std::optional<CachedVerdict> JudgeCache::verdict(const std::string& key) const {
    std::shared_lock lock(mutex_);
    if (auto it = verdicts_.find(key); it != verdicts_.end()) return it->second;
    return std::nullopt;
}

void JudgeCache::put_verdict(const std::string& key, CachedVerdict value) {
    std::unique_lock lock(mutex_);
    verdicts_.insert_or_assign(key, value);
}

std::size_t JudgeCache::size() const {
    std::shared_lock lock(mutex_);
    return decompositions_.size() + verdicts_.size();
}

}  // namespace intentflow::eval
