#include "intentflow/gateway/backend_config.hpp"

#include <set>

#include "intentflow/core/digest.hpp"
#include "intentflow/core/error.hpp"
#include "intentflow/core/serialize.hpp"

namespace intentflow::gateway {

namespace {

const std::set<std::string> kKnownProviders = {"stub", "openai", "gemini"};

bool looks_like_backend(const json& j) {
    return j.is_object() && j.contains("provider");
}

}  // namespace

void BackendConfig::validate() const {
    if (!kKnownProviders.contains(provider)) {
        throw ConfigError("unknown backend provider '" + provider + "'");
    }
    if (max_concurrency < 1) throw ConfigError("max_concurrency must be >= 1");
    if (retry_budget < 0) throw ConfigError("retry_budget must be >= 0");
    if (backoff_initial_ms < 0) throw ConfigError("backoff_initial_ms must be >= 0");
    if (timeout_seconds <= 0) throw ConfigError("timeout_seconds must be > 0");
    if (provider != "stub" && endpoint.empty()) {
        throw ConfigError("backend provider '" + provider + "' requires an endpoint");
    }
    if (provider == "stub" && stub_fallback != "synthetic" && stub_fallback != "echo" &&
        stub_fallback != "error") {
        throw ConfigError("stub fallback must be synthetic, echo or error");
    }
}

BackendConfig backend_config_from_json(const json& j, const std::filesystem::path& base_dir) {
    if (!j.is_object()) throw ConfigError("backend config must be a JSON object");
    BackendConfig c;
    try {
        c.provider = j.value("provider", c.provider);
        c.endpoint = j.value("endpoint", c.endpoint);
        c.model = j.value("model", c.model);
        c.auth_env = j.value("auth_env", c.auth_env);
        c.timeout_seconds = j.value("timeout_seconds", c.timeout_seconds);
        c.max_concurrency = j.value("max_concurrency", c.max_concurrency);
        c.retry_budget = j.value("retry_budget", c.retry_budget);
        c.backoff_initial_ms = j.value("backoff_initial_ms", c.backoff_initial_ms);
        c.temperature = j.value("temperature", c.temperature);
        c.stub_fallback = j.value("stub_fallback", c.stub_fallback);
        if (auto it = j.find("stub_script"); it != j.end() && !it->is_null()) {
            std::filesystem::path p = it->get<std::string>();
            c.stub_script = p.is_relative() && !base_dir.empty() ? base_dir / p : p;
        }
    } catch (const json::exception& e) {
        throw ConfigError(std::string("backend config: ") + e.what());
    }
    c.validate();
    return c;
}

json to_json(const BackendConfig& c) {
    json j{{"provider", c.provider},
           {"endpoint", c.endpoint},
           {"model", c.model},
           {"auth_env", c.auth_env},
           {"timeout_seconds", c.timeout_seconds},
           {"max_concurrency", c.max_concurrency},
           {"retry_budget", c.retry_budget},
           {"backoff_initial_ms", c.backoff_initial_ms},
           {"temperature", c.temperature},
           {"stub_fallback", c.stub_fallback}};
    if (!c.stub_script.empty()) {
        j["stub_script"] = c.stub_script.filename().string();
        if (std::filesystem::exists(c.stub_script)) {
            j["stub_script_sha256"] = sha256_hex(read_file(c.stub_script));
        }
    }
    return j;
}

BackendSet BackendSet::load(const std::filesystem::path& file) {
    json j;
    try {
        j = json::parse(read_file(file));
    } catch (const json::exception& e) {
        throw ConfigError("cannot parse backend config " + file.string() + ": " + e.what());
    } catch (const Error& e) {
        throw ConfigError(e.what());
    }
    return from_json(j, file.parent_path());
}

BackendSet BackendSet::from_json(const json& j, const std::filesystem::path& base_dir) {
    BackendSet set;
    if (looks_like_backend(j)) {
        set.roles_["default"] = backend_config_from_json(j, base_dir);
        return set;
    }
    if (!j.is_object() || j.empty()) throw ConfigError("backend config must be an object");
    for (const auto& [role, value] : j.items()) {
        set.roles_[role] = backend_config_from_json(value, base_dir);
    }
    return set;
}

BackendSet BackendSet::single(BackendConfig config) {
    config.validate();
    BackendSet set;
    set.roles_["default"] = std::move(config);
    return set;
}

const BackendConfig& BackendSet::for_role(const std::string& role) const {
    if (auto it = roles_.find(role); it != roles_.end()) return it->second;
    if (auto it = roles_.find("default"); it != roles_.end()) return it->second;
    throw ConfigError("no backend configured for role '" + role + "' and no default");
}

bool BackendSet::has_role(const std::string& role) const {
    return roles_.contains(role);
}

json BackendSet::to_json() const {
    json j = json::object();
    for (const auto& [role, cfg] : roles_) j[role] = gateway::to_json(cfg);
    return j;
}

}  // namespace intentflow::gateway
