#pragma once

#include <cstdint>
#include <optional>
#include <string>

namespace dreg {

/// CLI exit codes.
inline constexpr int kExitOk = 0;
inline constexpr int kExitValidation = 1;
inline constexpr int kExitRuntime = 2;
inline constexpr int kExitGateFailed = 3;

struct CommandOptions {
    std::string config_path;
    std::optional<std::string> out_dir;       // overrides [output] dir
    std::optional<std::uint64_t> seed;        // overrides [meta] seed
    int jobs = 1;
};

/// generate: write bags.csv + labels.csv and print a dataset summary.
int cmd_generate(const CommandOptions& opts);

/// fit: run one estimator, write the model file, print the metrics line.
int cmd_fit(const CommandOptions& opts);

/// rates: n-sweep under the schedule; emits the RateReport CSV. Exit 0 iff
/// the fitted slope is <= the configured slope_threshold, else 3.
int cmd_rates(const CommandOptions& opts);

/// sweep-n: risk versus second-stage sample size N at fixed n.
int cmd_sweep_N(const CommandOptions& opts);

}  // namespace dreg
