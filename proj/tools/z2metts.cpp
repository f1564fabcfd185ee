#include <exception>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "z2metts/avqite.hpp"
#include "z2metts/experiments.hpp"

int main(int argc, char** argv) {
    CLI::App app{"z2metts: thermal-state sampling experiments for a gauge spin chain"};
    app.require_subcommand(1);

    const std::vector<std::string> kinds = {"ed-reference", "eos",           "basis-study",
                                            "friedel",      "strings",       "avqite-accuracy",
                                            "avqmetts",     "ncx-scaling"};
    struct Args {
        std::string config;
        std::string out;
        long long seed = -1;
        int workers = -1;
    };
    std::vector<Args> args(kinds.size());
    for (size_t i = 0; i < kinds.size(); ++i) {
        CLI::App* sub = app.add_subcommand(kinds[i]);
        sub->add_option("--config", args[i].config, "experiment config file (JSON)")
            ->required();
        sub->add_option("--out", args[i].out, "output directory (default from config)");
        sub->add_option("--seed", args[i].seed, "master seed override");
        sub->add_option("--workers", args[i].workers, "worker thread count");
    }

    CLI11_PARSE(app, argc, argv);

    try {
        for (size_t i = 0; i < kinds.size(); ++i) {
            if (!app.get_subcommand(kinds[i])->parsed()) continue;
            nlohmann::json cfg = z2metts::load_config(args[i].config);
            if (!cfg.contains("experiment")) cfg["experiment"] = kinds[i];
            if (cfg["experiment"].get<std::string>() != kinds[i])
                throw z2metts::ConfigError("config is for experiment '" +
                                           cfg["experiment"].get<std::string>() +
                                           "', not '" + kinds[i] + "'");
            std::string out = args[i].out;
            if (out.empty()) out = cfg.value("out_dir", "");
            if (out.empty())
                throw z2metts::ConfigError("no output directory (--out or config out_dir)");
            z2metts::run_experiment(cfg, out, args[i].seed, args[i].workers);
        }
    } catch (const z2metts::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const z2metts::NonConvergenceError& e) {
        std::cerr << "numerical non-convergence: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
