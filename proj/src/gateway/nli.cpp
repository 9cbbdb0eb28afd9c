#include "intentflow/gateway/nli.hpp"

#include <httplib.h>

#include <cctype>
#include <cstdlib>
#include <set>

#include "intentflow/core/error.hpp"
#include "intentflow/core/serialize.hpp"
#include "intentflow/core/text.hpp"
#include "intentflow/gateway/http_backend.hpp"

namespace intentflow::gateway {

namespace {

std::set<std::string> words(const std::string& s) {
    std::set<std::string> out;
    std::string cur;
    for (char c : s) {
        if (std::isalnum(static_cast<unsigned char>(c))) {
            cur += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
        } else if (!cur.empty()) {
            out.insert(std::move(cur));
            cur.clear();
        }
    }
    if (!cur.empty()) out.insert(std::move(cur));
    return out;
}

double clamp_probability(double p) {
    if (!(p >= 0.0 && p <= 1.0)) throw BackendError("NLI probability out of [0, 1]", false);
    return p;
}

}  // namespace

StubNli::StubNli(Mode mode, double default_probability)
    : mode_(mode), default_probability_(default_probability) {}

StubNli& StubNli::script(std::string premise, std::string hypothesis, double probability) {
    table_[{std::move(premise), std::move(hypothesis)}] = clamp_probability(probability);
    return *this;
}

double StubNli::entailment(const std::string& premise, const std::string& hypothesis) {
    if (auto it = table_.find({premise, hypothesis}); it != table_.end()) return it->second;
    if (mode_ == Mode::constant) return default_probability_;
    const auto h = words(hypothesis);
    if (h.empty()) return 0.0;
    const auto p = words(premise);
    std::size_t hits = 0;
    for (const auto& w : h) hits += p.count(w);
    return static_cast<double>(hits) / static_cast<double>(h.size());
}

HttpNli::HttpNli(std::string endpoint, double timeout_seconds, std::string auth_env)
    : endpoint_(std::move(endpoint)), timeout_seconds_(timeout_seconds), auth_env_(std::move(auth_env)) {
    (void)parse_url(endpoint_);
}

double HttpNli::entailment(const std::string& premise, const std::string& hypothesis) {
    const auto url = parse_url(endpoint_);
    httplib::Client client(url.scheme_host_port);
    const auto secs = static_cast<time_t>(timeout_seconds_);
    client.set_connection_timeout(secs);
    client.set_read_timeout(secs);
    httplib::Headers headers;
    if (!auth_env_.empty()) {
        const char* token = std::getenv(auth_env_.c_str());
        if (!token || !*token) throw BackendError("environment variable " + auth_env_ + " is not set", false);
        headers.emplace("Authorization", std::string("Bearer ") + token);
    }
    const json body{{"premise", premise}, {"hypothesis", hypothesis}};
    auto res = client.Post(url.path, headers, body.dump(), "application/json");
    if (!res) throw BackendError("NLI request failed: " + httplib::to_string(res.error()), true);
    if (res->status != 200) {
        throw BackendError("NLI HTTP " + std::to_string(res->status), res->status >= 500 || res->status == 429);
    }
    try {
        const auto j = json::parse(res->body);
        if (j.contains("entailment")) return clamp_probability(j.at("entailment").get<double>());
        return clamp_probability(j.at("entailment_probability").get<double>());
    } catch (const json::exception& e) {
        throw BackendError(std::string("malformed NLI response: ") + e.what(), false);
    }
}

std::unique_ptr<NliBackend> make_nli_backend(const json& config) {
    const auto provider = config.value("provider", std::string("stub"));
    if (provider == "stub") {
        const auto mode_name = config.value("mode", std::string("overlap"));
        StubNli::Mode mode = StubNli::Mode::overlap;
        if (mode_name == "constant") {
            mode = StubNli::Mode::constant;
        } else if (mode_name != "overlap") {
            throw ConfigError("unknown stub NLI mode '" + mode_name + "'");
        }
        auto stub = std::make_unique<StubNli>(mode, config.value("default", 0.0));
        for (const auto& p : config.value("pairs", json::array())) {
            stub->script(p.at("premise").get<std::string>(), p.at("hypothesis").get<std::string>(),
                         p.at("p").get<double>());
        }
        return stub;
    }
    if (provider == "http") {
        return std::make_unique<HttpNli>(config.at("endpoint").get<std::string>(),
                                         config.value("timeout_seconds", 60.0),
                                         config.value("auth_env", std::string()));
    }
    throw ConfigError("unknown NLI provider '" + provider + "'");
}

}  // namespace intentflow::gateway
