#pragma once

#include <filesystem>
#include <map>
#include <string>

#include <json.hpp>

namespace intentflow::gateway {

/// Connection settings for one generation backend.
///
/// provider: "stub" (scripted, offline), "openai" (OpenAI-compatible chat
/// completions), or "gemini" (generateContent).
struct BackendConfig {
    std::string provider = "stub";
    std::string endpoint;
    std::string model;
    std::string auth_env;  // name of the environment variable holding the token
    double timeout_seconds = 60.0;
    int max_concurrency = 4;
    int retry_budget = 2;
    int backoff_initial_ms = 500;
    double temperature = 0.0;

    // Stub-only: script file (relative paths resolve against the config
    // file) and what to do when no rule matches: "synthetic", "echo", "error".
    std::filesystem::path stub_script;
    std::string stub_fallback = "synthetic";

    /// Throws ConfigError on invariant violations.
    void validate() const;
};

BackendConfig backend_config_from_json(const nlohmann::ordered_json& j,
                                       const std::filesystem::path& base_dir = {});
nlohmann::ordered_json to_json(const BackendConfig& c);

/// Role-keyed backend configuration file. A file holding a single backend
/// object applies to every role; otherwise keys such as "stage1", "stage2",
/// "stage2_untuned", "refine", "clean", "judge" select per-role backends and
/// "default" is used for roles that are not listed.
class BackendSet {
public:
    static BackendSet load(const std::filesystem::path& file);
    static BackendSet from_json(const nlohmann::ordered_json& j, const std::filesystem::path& base_dir = {});
    static BackendSet single(BackendConfig config);

    [[nodiscard]] const BackendConfig& for_role(const std::string& role) const;
    [[nodiscard]] bool has_role(const std::string& role) const;
    [[nodiscard]] nlohmann::ordered_json to_json() const;

private:
    std::map<std::string, BackendConfig> roles_;
};

}  // namespace intentflow::gateway
