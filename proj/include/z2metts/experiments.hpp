#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>

#include <json.hpp>

namespace z2metts {

// Configuration problems map to CLI exit code 2.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Midpoint of the chemical-potential plateau on which the ground state holds
// round(target_filling * L) particles, from per-sector ground energies.
double calibrate_mu(int L, double h, double target_filling);

// Dispatches on config["experiment"]; writes CSV outputs plus a
// manifest.json holding the fully resolved config into out_dir. Re-running
// with the manifest as the config file reproduces the run bitwise.
// Overrides (seed, workers) apply when >= 0.
void run_experiment(nlohmann::json config, const std::filesystem::path& out_dir,
                    long long seed_override = -1, int workers_override = -1);

nlohmann::json load_config(const std::filesystem::path& path);

}  // namespace z2metts
