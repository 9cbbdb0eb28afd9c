#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <shared_mutex>
#include <string>
#include <vector>

namespace intentflow::eval {

struct CachedDecomposition {
    std::vector<std::string> facts;
    bool flagged = false;
};

struct CachedVerdict {
    bool supported = false;
    bool flagged = false;
};

/// Memo of judge outputs keyed by content digests, shared by concurrent
/// workers and persisted as a JSON file so reruns make no judge calls.
class JudgeCache {
public:
    JudgeCache() = default;

    /// Loads `file` if it exists; an absent file yields an empty cache.
    static JudgeCache load(const std::filesystem::path& file);
    /// Writes the cache with keys in sorted order.
    void save(const std::filesystem::path& file) const;

    [[nodiscard]] std::optional<CachedDecomposition> decomposition(const std::string& key) const;
    void put_decomposition(const std::string& key, CachedDecomposition value);

    [[nodiscard]] std::optional<CachedVerdict> verdict(const std::string& key) const;
    void put_verdict(const std::string& key, CachedVerdict value);

    [[nodiscard]] std::size_t size() const;

    JudgeCache(const JudgeCache& other);
    JudgeCache& operator=(const JudgeCache& other);

private:
    mutable std::shared_mutex mutex_;
    std::map<std::string, CachedDecomposition> decompositions_;
    std::map<std::string, CachedVerdict> verdicts_;
};

}  // namespace intentflow::eval
