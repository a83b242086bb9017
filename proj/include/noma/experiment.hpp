#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "noma/config.hpp"

namespace noma::cli {

enum class ExperimentKind { Fit, Region, Wsr, SumRate, Ofdm, DpdSweep };

/// "fit", "region", "wsr", "sumrate", "ofdm", "dpd-sweep".
ExperimentKind parse_kind(const std::string& name);
const char* to_string(ExperimentKind kind);

struct ExperimentResult {
    int exit_code = 0;                          ///< 0 ok, 2 solver failure
    std::vector<std::filesystem::path> files;   ///< written, in order
    nlohmann::json summary;
    std::vector<std::string> diagnostics;
};

/// Runs one experiment and writes `<kind>*.csv` plus summary.json into out_dir
/// (created if missing). Sweep points run in parallel unless `parallel` is
/// false; the output does not depend on it.
ExperimentResult run_experiment(ExperimentKind kind, const ExperimentConfig& cfg,
                                const std::filesystem::path& out_dir, bool parallel = true);

}  // namespace noma::cli
