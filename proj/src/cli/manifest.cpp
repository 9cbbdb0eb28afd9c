#include "intentflow/cli/manifest.hpp"

#include <chrono>
#include <cstdlib>
#include <ctime>

#include "intentflow/core/digest.hpp"

namespace intentflow::cli {

std::string RunManifest::config_digest() const {
    json j;
    j["command"] = command;
    j["config"] = config;
    j["seed"] = seed;
    json in = json::array();
    for (const auto& i : inputs) in.push_back({{"path", i.path}, {"sha256", i.sha256}});
    j["inputs"] = in;
    return sha256_hex(j.dump());
}

json to_json(const RunManifest& m) {
    json j;
    j["command"] = m.command;
    j["version"] = m.version;
    j["config_digest"] = m.config_digest();
    j["seed"] = m.seed;
    j["argv"] = m.argv;
    json in = json::array();
    for (const auto& i : m.inputs) in.push_back({{"path", i.path}, {"sha256", i.sha256}});
    j["inputs"] = in;
    j["output"] = m.output;
    j["config"] = m.config;
    j["started_at"] = m.started_at;
    j["finished_at"] = m.finished_at;
    return j;
}

void write_manifest(const std::filesystem::path& dir, const RunManifest& m) {
    write_file(dir / "manifest.json", to_json(m).dump(2) + "\n");
}

std::string utc_timestamp() {
    std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    if (const char* epoch = std::getenv("SOURCE_DATE_EPOCH"); epoch != nullptr && *epoch != '\0') {
        t = static_cast<std::time_t>(std::strtoll(epoch, nullptr, 10));
    }
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

ManifestInput describe_input(const std::filesystem::path& p) {
    ManifestInput in{p.generic_string(), {}};
    if (std::filesystem::is_regular_file(p)) in.sha256 = sha256_hex(read_file(p));
    return in;
}

}  // namespace intentflow::cli
