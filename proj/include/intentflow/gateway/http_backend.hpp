#pragma once

#include <string>

#include <json.hpp>

#include "intentflow/gateway/gateway.hpp"

namespace intentflow::gateway {

struct ParsedUrl {
    std::string scheme_host_port;  // "https://host:443"
    std::string path;              // "/v1/chat/completions"
};

ParsedUrl parse_url(const std::string& url);

/// Shared HTTP plumbing: POSTs JSON, maps status codes to transient or
/// permanent BackendErrors.
class HttpJsonBackend : public Backend {
public:
    explicit HttpJsonBackend(BackendConfig config);

protected:
    nlohmann::ordered_json post_json(const std::string& url, const nlohmann::ordered_json& body,
                                     const std::vector<std::pair<std::string, std::string>>& headers) const;
    [[nodiscard]] std::string auth_token() const;

    BackendConfig config_;
};

/// OpenAI-compatible `chat/completions`: one user message whose content is
/// the prompt text followed by the images as base64 data URLs.
class OpenAiChatBackend : public HttpJsonBackend {
public:
    using HttpJsonBackend::HttpJsonBackend;
    BackendReply complete(const RenderedRequest& request) override;

    static nlohmann::ordered_json build_body(const RenderedRequest& request);
    static BackendReply parse_reply(const nlohmann::ordered_json& response);
};

/// Gemini `generateContent`. The endpoint may contain a `{model}` placeholder.
class GeminiBackend : public HttpJsonBackend {
public:
    using HttpJsonBackend::HttpJsonBackend;
    BackendReply complete(const RenderedRequest& request) override;

    static nlohmann::ordered_json build_body(const RenderedRequest& request);
    static BackendReply parse_reply(const nlohmann::ordered_json& response);
};

}  // namespace intentflow::gateway
