#pragma once

#include <filesystem>
#include <map>
#include <memory>
#include <string>
#include <utility>

#include <json.hpp>

namespace intentflow::gateway {

/// Source of entailment probabilities p(premise ⊢ hypothesis) in [0, 1].
class NliBackend {
public:
    virtual ~NliBackend() = default;
    virtual double entailment(const std::string& premise, const std::string& hypothesis) = 0;
};

/// Offline NLI scorer. Scripted (premise, hypothesis) pairs win; otherwise
/// mode "overlap" returns the fraction of hypothesis words present in the
/// premise, and mode "constant" returns `default_probability`.
class StubNli : public NliBackend {
public:
    enum class Mode { overlap, constant };

    explicit StubNli(Mode mode = Mode::overlap, double default_probability = 0.0);

    StubNli& script(std::string premise, std::string hypothesis, double probability);
    double entailment(const std::string& premise, const std::string& hypothesis) override;

private:
    Mode mode_;
    double default_probability_;
    std::map<std::pair<std::string, std::string>, double> table_;
};

/// POSTs {"premise", "hypothesis"} to an endpoint that answers
/// {"entailment": p} (an "entailment_probability" key is also accepted).
class HttpNli : public NliBackend {
public:
    HttpNli(std::string endpoint, double timeout_seconds, std::string auth_env = {});
    double entailment(const std::string& premise, const std::string& hypothesis) override;

private:
    std::string endpoint_;
    double timeout_seconds_;
    std::string auth_env_;
};

/// {"provider": "stub", "mode": "overlap"|"constant", "default": p,
///  "pairs": [{"premise", "hypothesis", "p"}]} or
/// {"provider": "http", "endpoint": url, "timeout_seconds": s, "auth_env": name}.
std::unique_ptr<NliBackend> make_nli_backend(const nlohmann::ordered_json& config);

}  // namespace intentflow::gateway
