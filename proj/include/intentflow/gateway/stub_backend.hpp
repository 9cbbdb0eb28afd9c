#pragma once

#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <tuple>
#include <vector>

#include <json.hpp>

#include "intentflow/gateway/gateway.hpp"

namespace intentflow::gateway {

/// One scripted behaviour. Every set field must match for the rule to apply.
///
/// Each (rule, trajectory, step) key keeps its own attempt counter: the first
/// `fail_times` attempts raise a transient BackendError, after which
/// `responses` are returned in order (the last one repeats).
struct StubRule {
    std::optional<TemplateId> template_id;
    std::optional<int> step_index;
    std::optional<std::string> trajectory_id;
    std::optional<std::string> prompt_contains;
    std::vector<std::string> responses;
    std::optional<std::int64_t> input_tokens;
    std::optional<std::int64_t> output_tokens;
    int fail_times = 0;
    bool fail_permanently = false;
};

enum class StubFallback { synthetic, echo, error };

/// Deterministic scripted backend for offline runs and tests.
///
/// Resolution order: scripted rules (first match), then the custom
/// responder if one is installed, then the fallback. The `synthetic`
/// fallback derives a plausible, well-formed reply for each template purely
/// from the request variables, so a full pipeline can run unattended.
class StubBackend : public Backend {
public:
    using Responder = std::function<std::optional<BackendReply>(const RenderedRequest&)>;

    explicit StubBackend(StubFallback fallback = StubFallback::synthetic);

    StubBackend& add_rule(StubRule rule);
    StubBackend& set_responder(Responder responder);
    void load_script(const nlohmann::ordered_json& script);

    BackendReply complete(const RenderedRequest& request) override;

    /// Every request received, in arrival order.
    [[nodiscard]] std::vector<RenderedRequest> requests() const;
    [[nodiscard]] std::size_t request_count() const;

private:
    std::vector<StubRule> rules_;
    Responder responder_;
    StubFallback fallback_;

    mutable std::mutex mutex_;
    std::map<std::tuple<std::size_t, std::string, int>, int> attempts_;
    std::vector<RenderedRequest> received_;
};

/// The reply the synthetic fallback gives for `request`.
BackendReply synthetic_reply(const RenderedRequest& request);

std::shared_ptr<StubBackend> make_stub_backend(const BackendConfig& config);

}  // namespace intentflow::gateway
