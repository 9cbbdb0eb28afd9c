#include "intentflow/gateway/http_backend.hpp"

#include <httplib.h>

#include <cstdlib>

#include "intentflow/core/digest.hpp"
#include "intentflow/core/error.hpp"
#include "intentflow/core/serialize.hpp"

namespace intentflow::gateway {

ParsedUrl parse_url(const std::string& url) {
    const auto scheme_end = url.find("://");
    if (scheme_end == std::string::npos) throw ConfigError("endpoint '" + url + "' has no scheme");
    const auto scheme = url.substr(0, scheme_end);
    if (scheme != "http" && scheme != "https") {
        throw ConfigError("endpoint '" + url + "' must use http or https");
    }
    const auto path_start = url.find('/', scheme_end + 3);
    if (path_start == std::string::npos) return ParsedUrl{url, "/"};
    return ParsedUrl{url.substr(0, path_start), url.substr(path_start)};
}

HttpJsonBackend::HttpJsonBackend(BackendConfig config) : config_(std::move(config)) {
    (void)parse_url(config_.endpoint);
}

std::string HttpJsonBackend::auth_token() const {
    if (config_.auth_env.empty()) return {};
    const char* v = std::getenv(config_.auth_env.c_str());
    if (!v || !*v) {
        throw BackendError("environment variable " + config_.auth_env + " is not set", false);
    }
    return v;
}

json HttpJsonBackend::post_json(const std::string& url, const json& body,
                                const std::vector<std::pair<std::string, std::string>>& headers) const {
    const auto parsed = parse_url(url);
    httplib::Client client(parsed.scheme_host_port);
    const auto secs = static_cast<time_t>(config_.timeout_seconds);
    const auto usecs = static_cast<time_t>((config_.timeout_seconds - static_cast<double>(secs)) * 1e6);
    client.set_connection_timeout(secs, usecs);
    client.set_read_timeout(secs, usecs);
    client.set_write_timeout(secs, usecs);

    httplib::Headers h;
    for (const auto& [k, v] : headers) h.emplace(k, v);
    auto res = client.Post(parsed.path, h, body.dump(), "application/json");
    if (!res) {
        throw BackendError("HTTP request to " + parsed.scheme_host_port + " failed: " +
                               httplib::to_string(res.error()),
                           true);
    }
    const int status = res->status;
    if (status == 408 || status == 429 || status >= 500) {
        throw BackendError("HTTP " + std::to_string(status) + ": " + res->body.substr(0, 300), true);
    }
    if (status < 200 || status >= 300) {
        throw BackendError("HTTP " + std::to_string(status) + ": " + res->body.substr(0, 300), false);
    }
    try {
        return json::parse(res->body);
    } catch (const json::exception& e) {
        throw BackendError(std::string("malformed JSON response: ") + e.what(), false);
    }
}

json OpenAiChatBackend::build_body(const RenderedRequest& request) {
    json content = json::array();
    content.push_back(json{{"type", "text"}, {"text", request.prompt}});
    for (const auto& img : request.images) {
        const auto bytes = load_image_bytes(img, request.image_root);
        content.push_back(json{{"type", "image_url"},
                               {"image_url", {{"url", "data:image/png;base64," + base64_encode(bytes)}}}});
    }
    return json{{"model", request.model},
                {"temperature", request.temperature},
                {"max_tokens", request.max_output_tokens},
                {"messages", json::array({json{{"role", "user"}, {"content", content}}})}};
}

BackendReply OpenAiChatBackend::parse_reply(const json& response) {
    try {
        BackendReply reply;
        const auto& message = response.at("choices").at(0).at("message");
        reply.text = message.at("content").is_null() ? "" : message.at("content").get<std::string>();
        if (auto u = response.find("usage"); u != response.end() && u->is_object()) {
            if (u->contains("prompt_tokens")) reply.input_tokens = u->at("prompt_tokens").get<std::int64_t>();
            if (u->contains("completion_tokens")) {
                reply.output_tokens = u->at("completion_tokens").get<std::int64_t>();
            }
        }
        return reply;
    } catch (const json::exception& e) {
        throw BackendError(std::string("unexpected chat completion response: ") + e.what(), false);
    }
}

BackendReply OpenAiChatBackend::complete(const RenderedRequest& request) {
    std::vector<std::pair<std::string, std::string>> headers;
    if (auto token = auth_token(); !token.empty()) headers.emplace_back("Authorization", "Bearer " + token);
    return parse_reply(post_json(config_.endpoint, build_body(request), headers));
}

json GeminiBackend::build_body(const RenderedRequest& request) {
    json parts = json::array();
    parts.push_back(json{{"text", request.prompt}});
    for (const auto& img : request.images) {
        const auto bytes = load_image_bytes(img, request.image_root);
        parts.push_back(json{{"inline_data", {{"mime_type", "image/png"}, {"data", base64_encode(bytes)}}}});
    }
    return json{{"contents", json::array({json{{"role", "user"}, {"parts", parts}}})},
                {"generationConfig",
                 {{"temperature", request.temperature}, {"maxOutputTokens", request.max_output_tokens}}}};
}

BackendReply GeminiBackend::parse_reply(const json& response) {
    try {
        BackendReply reply;
        for (const auto& part : response.at("candidates").at(0).at("content").at("parts")) {
            if (part.contains("text")) reply.text += part.at("text").get<std::string>();
        }
        if (auto u = response.find("usageMetadata"); u != response.end() && u->is_object()) {
            if (u->contains("promptTokenCount")) reply.input_tokens = u->at("promptTokenCount").get<std::int64_t>();
            if (u->contains("candidatesTokenCount")) {
                reply.output_tokens = u->at("candidatesTokenCount").get<std::int64_t>();
            }
        }
        return reply;
    } catch (const json::exception& e) {
        throw BackendError(std::string("unexpected generateContent response: ") + e.what(), false);
    }
}

BackendReply GeminiBackend::complete(const RenderedRequest& request) {
    auto url = config_.endpoint;
    if (auto pos = url.find("{model}"); pos != std::string::npos) url.replace(pos, 7, config_.model);
    std::vector<std::pair<std::string, std::string>> headers;
    if (auto token = auth_token(); !token.empty()) headers.emplace_back("x-goog-api-key", token);
    return parse_reply(post_json(url, build_body(request), headers));
}

}  // namespace intentflow::gateway
