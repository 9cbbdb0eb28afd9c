#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <string>
#include <vector>

#include "intentflow/core/types.hpp"
#include "intentflow/gateway/gateway.hpp"
#include "intentflow/gateway/stub_backend.hpp"
#include "intentflow/gateway/templates.hpp"
#include "intentflow/image/image.hpp"

namespace fixtures {

using namespace intentflow;

// Small solid-colour PNG; the colour varies with `tag` so screenshots differ.
std::vector<std::uint8_t> tiny_png(int tag, int width = 8, int height = 6);

// Valid n-step web trajectory with inline screenshots and named click
// targets "Element <id>-<k>". Actions cycle click/hover/type/scroll.
Trajectory make_trajectory(const std::string& id, int steps, std::uint64_t variant = 0);

// 20 trajectories of 1..25 steps (some longer than the default 15-step cap).
std::vector<Trajectory> synthetic_corpus(int count = 20, std::uint64_t seed = 7);

std::shared_ptr<const gateway::TemplateLibrary> templates();

gateway::BackendConfig stub_config(int retry_budget = 2, int concurrency = 4);

struct StubGateway {
    std::shared_ptr<gateway::StubBackend> stub;
    std::unique_ptr<gateway::Gateway> gateway;
};

StubGateway make_stub_gateway(gateway::StubFallback fallback = gateway::StubFallback::synthetic,
                              gateway::BackendConfig config = stub_config());

// Fresh empty directory under the system temp dir, removed on destruction.
class TempDir {
public:
    TempDir();
    ~TempDir();
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    [[nodiscard]] const std::filesystem::path& path() const { return path_; }
    std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

private:
    std::filesystem::path path_;
};

// Writes `trajectories` to <dir>/trajectories.jsonl and returns its path.
std::filesystem::path write_dataset(const std::filesystem::path& dir, const std::vector<Trajectory>& trajectories);

// Runs the CLI in-process.
struct CliResult {
    int code = 0;
    std::string out;
    std::string err;
};
CliResult run_cli(std::vector<std::string> args);

}  // namespace fixtures
