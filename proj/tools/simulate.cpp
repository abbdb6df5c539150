// SPDX-License-Identifier: Apache-2.0
//
// mcadet - analog in-memory massive MIMO linear detection simulator

#include <cstdio>
#include <cstdlib>
#include <string>

#include <CLI11.hpp>

#include "mcadet/harness.hpp"

namespace {

// 0 = success, 2 = configuration error, 3 = runtime numerical failure.
enum ExitCode { kOk = 0, kConfigError = 2, kRuntimeError = 3 };

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"mcadet: massive MIMO detection on modeled memristive crossbar circuits"};

    std::string config_path;
    std::string recipe;
    std::string out_path;
    std::int64_t seed = -1;
    int threads = 0;
    bool plot = false;

    app.add_option("--config", config_path, "experiment config file (flat key = value text)");
    app.add_option("--recipe", recipe,
                   "built-in experiment preset: fig3|fig4|fig5|fig6|fig7|fig8|fig9|timing");
    app.add_option("--seed", seed, "override the RNG seed");
    app.add_option("--out", out_path, "override the output CSV path");
    app.add_option("--threads", threads, "worker threads for Monte Carlo frames");
    app.add_flag("--plot", plot, "also emit a gnuplot script next to the CSV");

    CLI11_PARSE(app, argc, argv);

    mcadet::ExperimentConfig cfg;
    try {
        if (!recipe.empty()) {
            cfg = mcadet::recipe_config(recipe);
            if (!config_path.empty()) {
                // Config file overlays the recipe.
                std::ifstream in(config_path);
                if (!in) throw mcadet::IoError("cannot open " + config_path);
                std::stringstream buf;
                buf << in.rdbuf();
                mcadet::apply_config_text(cfg, buf.str());
            }
        } else if (!config_path.empty()) {
            cfg = mcadet::load_config_file(config_path);
        } else {
            std::fprintf(stderr, "error: need --config or --recipe (see --help)\n");
            return kConfigError;
        }

        if (seed >= 0) cfg.seed = static_cast<std::uint64_t>(seed);
        if (const char* env_seed = std::getenv("SIM_SEED"))
            cfg.seed = static_cast<std::uint64_t>(std::strtoull(env_seed, nullptr, 10));
        if (!out_path.empty()) cfg.out_path = out_path;
        if (threads > 0) cfg.threads = threads;
        cfg.validate();
    } catch (const mcadet::SimError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return kConfigError;
    }

    try {
        const std::vector<mcadet::ResultRow> rows = mcadet::run_experiment(cfg);
        mcadet::emit_csv(rows, cfg.out_path);
        std::fprintf(stderr, "wrote %s (%zu rows)\n", cfg.out_path.c_str(), rows.size());
        if (plot) {
            const std::string script = cfg.out_path + ".gp";
            mcadet::emit_plot_script(rows, mcadet::plot_kind_for(cfg), script, cfg.out_path, cfg);
            std::fprintf(stderr, "wrote %s\n", script.c_str());
        }
    } catch (const mcadet::ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return kConfigError;
    } catch (const mcadet::SimError& e) {
        std::fprintf(stderr, "runtime error: %s\n", e.what());
        return kRuntimeError;
    }
    return kOk;
}
