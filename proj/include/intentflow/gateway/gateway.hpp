#pragma once

#include <condition_variable>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "intentflow/core/types.hpp"
#include "intentflow/gateway/backend_config.hpp"
#include "intentflow/gateway/templates.hpp"

namespace intentflow::gateway {

inline constexpr std::int64_t kImageTokens = 256;

/// Fallback text token estimate: ceil(characters / 4).
std::int64_t estimate_tokens(std::string_view text) noexcept;
std::int64_t estimate_tokens(const ImageRef& image) noexcept;

struct GenerationRequest {
    TemplateId template_id = TemplateId::summarize;
    Variables variables;
    std::vector<ImageRef> images;
    int max_output_tokens = 512;

    // Call context: used for error messages, trace records, and stub keying.
    std::string trajectory_id;
    std::optional<int> step_index;
    std::string call_role;
    bool end_of_session = false;
};

struct GenerationResult {
    std::string text;
    std::int64_t input_tokens = 0;
    std::int64_t output_tokens = 0;
    std::optional<double> latency_seconds;
    int attempts = 1;
};

/// What a provider adapter receives: the fully rendered prompt.
struct RenderedRequest {
    TemplateId template_id = TemplateId::summarize;
    std::string prompt;
    Variables variables;
    std::vector<ImageRef> images;
    std::filesystem::path image_root;
    int max_output_tokens = 512;
    double temperature = 0.0;
    std::string model;
    std::string trajectory_id;
    std::optional<int> step_index;
};

struct BackendReply {
    std::string text;
    std::optional<std::int64_t> input_tokens;
    std::optional<std::int64_t> output_tokens;
};

/// Provider adapter. Throws BackendError; transient() marks retryable failures.
class Backend {
public:
    virtual ~Backend() = default;
    virtual BackendReply complete(const RenderedRequest& request) = 0;
};

/// Bytes for an image reference, loading path references from `root`.
std::vector<std::uint8_t> load_image_bytes(const ImageRef& ref, const std::filesystem::path& root);

/// Collects CallRecords for one trace. Safe for concurrent appends.
class CallRecorder {
public:
    void record(CallRecord record);
    [[nodiscard]] std::vector<CallRecord> records() const;

private:
    mutable std::mutex mutex_;
    std::vector<CallRecord> records_;
};

/// Uniform entry point for every prompt-based step. Validates requests
/// against the template library before any traffic, retries transient
/// failures with exponential backoff, caps in-flight requests, and records
/// every call.
class Gateway {
public:
    Gateway(BackendConfig config, std::shared_ptr<Backend> backend,
            std::shared_ptr<const TemplateLibrary> templates, std::filesystem::path image_root = {});

    Gateway(const Gateway&) = delete;
    Gateway& operator=(const Gateway&) = delete;

    GenerationResult generate(const GenerationRequest& request, CallRecorder* recorder = nullptr);

    /// Renders and validates without calling the backend. Throws ConfigError.
    [[nodiscard]] std::string render(const GenerationRequest& request) const;

    [[nodiscard]] const BackendConfig& config() const noexcept { return config_; }
    [[nodiscard]] const TemplateLibrary& templates() const noexcept { return *templates_; }
    [[nodiscard]] const std::filesystem::path& image_root() const noexcept { return image_root_; }
    [[nodiscard]] Backend& backend() noexcept { return *backend_; }

    /// Backend attempts issued so far, including failed ones.
    [[nodiscard]] std::uint64_t attempts_issued() const;

private:
    void acquire();
    void release();

    BackendConfig config_;
    std::shared_ptr<Backend> backend_;
    std::shared_ptr<const TemplateLibrary> templates_;
    std::filesystem::path image_root_;

    mutable std::mutex mutex_;
    std::condition_variable slot_free_;
    int in_flight_ = 0;
    std::uint64_t attempts_ = 0;
};

/// Builds the adapter selected by `config.provider`.
std::shared_ptr<Backend> make_backend(const BackendConfig& config);

std::unique_ptr<Gateway> make_gateway(const BackendConfig& config,
                                      std::shared_ptr<const TemplateLibrary> templates,
                                      std::filesystem::path image_root = {});

}  // namespace intentflow::gateway
