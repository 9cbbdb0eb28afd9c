#include "intentflow/gateway/gateway.hpp"

#include <chrono>
#include <thread>

#include "intentflow/core/error.hpp"
#include "intentflow/core/serialize.hpp"
#include "intentflow/gateway/http_backend.hpp"
#include "intentflow/gateway/stub_backend.hpp"

namespace intentflow::gateway {

std::int64_t estimate_tokens(std::string_view text) noexcept {
    return static_cast<std::int64_t>((text.size() + 3) / 4);
}

std::int64_t estimate_tokens(const ImageRef&) noexcept {
    return kImageTokens;
}

std::vector<std::uint8_t> load_image_bytes(const ImageRef& ref, const std::filesystem::path& root) {
    if (ref.is_inline()) return ref.png;
    if (ref.path.empty()) throw ConfigError("image reference is empty");
    std::filesystem::path p = ref.path;
    if (p.is_relative() && !root.empty()) p = root / p;
    const auto data = read_file(p);
    return {data.begin(), data.end()};
}

void CallRecorder::record(CallRecord record) {
    std::lock_guard lock(mutex_);
    records_.push_back(std::move(record));
}

std::vector<CallRecord> CallRecorder::records() const {
    std::lock_guard lock(mutex_);
    return records_;
}

Gateway::Gateway(BackendConfig config, std::shared_ptr<Backend> backend,
                 std::shared_ptr<const TemplateLibrary> templates, std::filesystem::path image_root)
    : config_(std::move(config)),
      backend_(std::move(backend)),
      templates_(std::move(templates)),
      image_root_(std::move(image_root)) {
    config_.validate();
    if (!backend_) throw ConfigError("gateway requires a backend");
    if (!templates_) throw ConfigError("gateway requires a template library");
}

std::string Gateway::render(const GenerationRequest& request) const {
    if (!request.images.empty() && !accepts_images(request.template_id)) {
        throw ConfigError("template '" + std::string(to_string(request.template_id)) +
                          "' does not accept images");
    }
    if (request.max_output_tokens < 1) throw ConfigError("max_output_tokens must be >= 1");
    return templates_->get(request.template_id).render(request.variables);
}

void Gateway::acquire() {
    std::unique_lock lock(mutex_);
    slot_free_.wait(lock, [this] { return in_flight_ < config_.max_concurrency; });
    ++in_flight_;
    ++attempts_;
}

void Gateway::release() {
    {
        std::lock_guard lock(mutex_);
        --in_flight_;
    }
    slot_free_.notify_one();
}

std::uint64_t Gateway::attempts_issued() const {
    std::lock_guard lock(mutex_);
    return attempts_;
}

GenerationResult Gateway::generate(const GenerationRequest& request, CallRecorder* recorder) {
    RenderedRequest rendered;
    rendered.template_id = request.template_id;
    rendered.prompt = render(request);
    rendered.variables = request.variables;
    rendered.images = request.images;
    rendered.image_root = image_root_;
    rendered.max_output_tokens = request.max_output_tokens;
    rendered.temperature = config_.temperature;
    rendered.model = config_.model;
    rendered.trajectory_id = request.trajectory_id;
    rendered.step_index = request.step_index;

    CallRecord record;
    record.call_role = request.call_role.empty() ? std::string(to_string(request.template_id))
                                                 : request.call_role;
    record.template_id = std::string(to_string(request.template_id));
    record.step_index = request.step_index;
    record.end_of_session = request.end_of_session;
    record.request_text = rendered.prompt;
    record.image_count = static_cast<int>(request.images.size());

    const int max_attempts = 1 + config_.retry_budget;
    std::string last_error;
    for (int attempt = 1; attempt <= max_attempts; ++attempt) {
        if (attempt > 1 && config_.backoff_initial_ms > 0) {
            std::this_thread::sleep_for(std::chrono::milliseconds(
                static_cast<std::int64_t>(config_.backoff_initial_ms) << (attempt - 2)));
        }
        acquire();
        const auto start = std::chrono::steady_clock::now();
        try {
            BackendReply reply = backend_->complete(rendered);
            release();
            const std::chrono::duration<double> elapsed = std::chrono::steady_clock::now() - start;

            GenerationResult result;
            result.text = std::move(reply.text);
            result.attempts = attempt;
            result.latency_seconds = elapsed.count();
            if (reply.input_tokens) {
                result.input_tokens = *reply.input_tokens;
            } else {
                result.input_tokens = estimate_tokens(rendered.prompt);
                for (const auto& img : request.images) result.input_tokens += estimate_tokens(img);
            }
            result.output_tokens = reply.output_tokens.value_or(estimate_tokens(result.text));

            if (recorder) {
                record.attempts = attempt;
                record.input_tokens = result.input_tokens;
                record.output_tokens = result.output_tokens;
                recorder->record(record);
            }
            return result;
        } catch (const BackendError& e) {
            release();
            last_error = e.what();
            if (!e.transient()) {
                if (recorder) {
                    record.attempts = attempt;
                    recorder->record(record);
                }
                break;
            }
            if (attempt == max_attempts && recorder) {
                record.attempts = attempt;
                recorder->record(record);
            }
        } catch (...) {
            release();
            throw;
        }
    }

    std::string where = "template '" + std::string(to_string(request.template_id)) + "'";
    if (!request.trajectory_id.empty()) where += ", trajectory '" + request.trajectory_id + "'";
    if (request.step_index) where += ", step " + std::to_string(*request.step_index);
    throw BackendError("backend call failed (" + where + "): " + last_error, false);
}

std::shared_ptr<Backend> make_backend(const BackendConfig& config) {
    config.validate();
    if (config.provider == "stub") return make_stub_backend(config);
    if (config.provider == "openai") return std::make_shared<OpenAiChatBackend>(config);
    if (config.provider == "gemini") return std::make_shared<GeminiBackend>(config);
    throw ConfigError("unknown backend provider '" + config.provider + "'");
}

std::unique_ptr<Gateway> make_gateway(const BackendConfig& config,
                                      std::shared_ptr<const TemplateLibrary> templates,
                                      std::filesystem::path image_root) {
    return std::make_unique<Gateway>(config, make_backend(config), std::move(templates),
                                     std::move(image_root));
}

}  // namespace intentflow::gateway
