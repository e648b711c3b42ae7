#include <cstdio>
#include <exception>
#include <string>

#include "CLI11.hpp"

#include "stripflow/cli.hpp"

int main(int argc, char** argv) {
    CLI::App app{"stripflow: strip Biot-Savart kernel, envelope geometry, Steiner "
                 "symmetrization and vorticity-transport verification campaigns"};
    app.require_subcommand(1);

    std::string config_path, out_dir;
    std::int64_t seed = -1;

    const std::vector<std::string> modes{"kernel-verify", "envelope-verify", "steiner-verify",
                                         "ode-run", "simulate", "full-report"};
    for (const std::string& m : modes) {
        CLI::App* sub = app.add_subcommand(m);
        sub->add_option("--config", config_path, "JSON experiment configuration")->required();
        sub->add_option("--out", out_dir, "output directory (overrides config)");
        sub->add_option("--seed", seed, "seed (overrides config)");
    }

    CLI11_PARSE(app, argc, argv);

    try {
        stripflow::cli::ExperimentConfig cfg =
            stripflow::cli::ExperimentConfig::from_json_file(config_path);
        cfg.mode = app.get_subcommands().front()->get_name();
        if (!out_dir.empty()) cfg.out_dir = out_dir;
        if (seed >= 0) cfg.seed = static_cast<std::uint64_t>(seed);
        const int rc = stripflow::cli::run_experiment(cfg);
        std::printf("%s: %s (report: %s/report.json)\n", cfg.mode.c_str(),
                    rc == 0 ? "all checks passed" : "FAILURES present", cfg.out_dir.c_str());
        return rc;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    }
}
