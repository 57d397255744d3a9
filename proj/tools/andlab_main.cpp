#include "CLI11.hpp"

#include "andlab/config.hpp"
#include "andlab/harness.hpp"

#include <cstdio>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>

namespace {

struct Overrides {
    std::optional<std::uint64_t> seed;
    std::optional<int> threads;
    std::optional<std::string> out;
};

andlab::ExperimentConfig load(const std::string& path, const Overrides& ov) {
    auto cfg = andlab::parse_config_file(path);
    if (ov.seed) cfg.master_seed = *ov.seed;
    if (ov.threads) cfg.threads = *ov.threads;
    if (ov.out) cfg.out_dir = *ov.out;
    cfg.validate();
    return cfg;
}

void add_common(CLI::App* cmd, std::string& config_path, Overrides& ov) {
    cmd->add_option("--config", config_path, "experiment config file")
        ->required();
    cmd->add_option("--seed", ov.seed, "override the master seed");
    cmd->add_option("--threads", ov.threads, "override the worker count");
    cmd->add_option("--out", ov.out, "override the output directory");
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"finite-volume Anderson model spectral statistics laboratory"};
    app.require_subcommand(1);

    std::string config_path;
    Overrides ov;
    using Runner =
        std::function<andlab::RunManifest(const andlab::ExperimentConfig&)>;
    Runner runner;

    struct Entry {
        const char* name;
        const char* help;
        andlab::RunManifest (*fn)(const andlab::ExperimentConfig&);
    };
    const Entry entries[] = {
        {"ids-build", "pool eigenvalues into the reference IDS table",
         andlab::run_ids_build},
        {"bulk-stats", "bulk-window Poisson statistics",
         andlab::run_bulk_stats},
        {"edge-stats", "band-edge Poisson statistics and Lifshitz fit",
         andlab::run_edge_stats},
        {"spacings", "level-spacing law and survival curve",
         andlab::run_spacings},
        {"wegner-minami", "moment bound checks", andlab::run_wegner_minami},
        {"clt", "counting-function normal fluctuations", andlab::run_clt},
        {"reduce", "box-reduction eigenvalue matching", andlab::run_reduce},
    };
    for (const auto& e : entries) {
        auto* cmd = app.add_subcommand(e.name, e.help);
        add_common(cmd, config_path, ov);
        auto fn = e.fn;
        cmd->callback([&runner, fn] { runner = fn; });
    }

    CLI11_PARSE(app, argc, argv);

    try {
        auto cfg = load(config_path, ov);
        auto manifest = runner(cfg);
        manifest.write(
            (std::filesystem::path(cfg.out_dir) / "run_manifest.txt").string());
        for (const auto& t : manifest.timings)
            std::fprintf(stderr, "%s: %.1fs\n", t.name.c_str(), t.seconds);
        std::fprintf(stderr, "%s\n", manifest.all_pass ? "PASS" : "FAIL");
        return manifest.all_pass ? 0 : 1;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    }
}
