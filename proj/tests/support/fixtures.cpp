#include "fixtures.hpp"

#include <cstdlib>
#include <sstream>

#include "intentflow/cli/commands.hpp"
#include "intentflow/core/digest.hpp"
#include "intentflow/core/serialize.hpp"

namespace fixtures {

std::vector<std::uint8_t> tiny_png(int tag, int width, int height) {
    const auto t = static_cast<std::uint8_t>(tag * 37);
    Image img(width, height, Rgb{t, static_cast<std::uint8_t>(255 - t), static_cast<std::uint8_t>(tag * 11)});
    img.set(0, 0, Rgb{1, 2, 3});
    return encode_png(img);
}

Trajectory make_trajectory(const std::string& id, int steps, std::uint64_t variant) {
    Trajectory t;
    t.id = id;
    t.platform = Platform::web;
    t.gold_intent.text = "find item " + id + " and open it";
    for (int k = 1; k <= steps; ++k) {
        Interaction step;
        step.index = k;
        step.screenshot.png = tiny_png(k + static_cast<int>(variant % 5));
        switch ((k + variant) % 4) {
            case 0:
                step.action = make_action("click");
                step.action.element_name = "Element " + id + "-" + std::to_string(k);
                step.action.element_bbox = Rect{1, 1, 3, 2};
                break;
            case 1:
                step.action = make_action("hover");
                step.action.element_name = "Menu " + std::to_string(k);
                break;
            case 2:
                step.action = make_action("type_text");
                step.action.typed_text = "query " + std::to_string(k);
                step.action.element_name = "Search";
                break;
            default:
                step.action = make_action("scroll");
                break;
        }
        t.steps.push_back(std::move(step));
    }
    return t;
}

std::vector<Trajectory> synthetic_corpus(int count, std::uint64_t seed) {
    Rng rng(seed);
    std::vector<Trajectory> out;
    for (int i = 0; i < count; ++i) {
        const int steps = static_cast<int>(rng.between(1, 25));
        out.push_back(make_trajectory("traj-" + std::to_string(i), steps, rng.below(1000)));
    }
    return out;
}

std::shared_ptr<const gateway::TemplateLibrary> templates() {
    static const auto lib = gateway::TemplateLibrary::load_default();
    return lib;
}

gateway::BackendConfig stub_config(int retry_budget, int concurrency) {
    gateway::BackendConfig c;
    c.provider = "stub";
    c.retry_budget = retry_budget;
    c.max_concurrency = concurrency;
    c.backoff_initial_ms = 0;
    return c;
}

StubGateway make_stub_gateway(gateway::StubFallback fallback, gateway::BackendConfig config) {
    StubGateway s;
    s.stub = std::make_shared<gateway::StubBackend>(fallback);
    s.gateway = std::make_unique<gateway::Gateway>(config, s.stub, templates());
    return s;
}

TempDir::TempDir() {
    std::string pattern = (std::filesystem::temp_directory_path() / "intentflow-test-XXXXXX").string();
    if (mkdtemp(pattern.data()) == nullptr) throw std::runtime_error("mkdtemp failed");
    path_ = pattern;
}

TempDir::~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
}

std::filesystem::path write_dataset(const std::filesystem::path& dir, const std::vector<Trajectory>& trajectories) {
    const auto file = dir / "trajectories.jsonl";
    write_trajectory_jsonl(file, trajectories);
    return file;
}

CliResult run_cli(std::vector<std::string> args) {
    args.insert(args.begin(), "intentflow");
    std::ostringstream out;
    std::ostringstream err;
    CliResult r;
    r.code = cli::run_cli(args, out, err);
    r.out = out.str();
    r.err = err.str();
    return r;
}

}  // namespace fixtures
