#pragma once

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "noma/dpd_lab.hpp"
#include "noma/noma_rates.hpp"
#include "noma/solvers.hpp"

namespace noma::cli {

enum class PaSource { Explicit, Regression, FitFile };

/// Parsed experiment configuration. Key names match the config file; see
/// configs/ for annotated examples.
struct ExperimentConfig {
    // Scenario
    std::vector<double> distances{120.0, 80.0};  ///< m; empty with users > 0 uses 60 + 20(k-1)
    std::size_t users = 0;
    double carrier_freq = 2.4e9;
    double pathloss_exponent = 2.6;
    double antenna_gain = 4.11;
    double noise_psd_dbm = -174.0;   ///< dBm/Hz
    double bandwidth = 30e6;
    double p_max_dbm = 36.0;

    // PA model
    PaSource pa_source = PaSource::Explicit;
    double pa_a = 0.0032;
    double pa_alpha = 1.3552;
    double pa_k1 = 0.3552;
    double pa_k2 = -35.605;
    std::string pa_fit_file;
    bool pa_fit_dpd = false;   ///< use the dpd_enabled=1 rows of the fit file

    solvers::SolverSettings solver;
    std::uint64_t seed = 1;
    bool force_ideal = false;

    // sumrate
    std::vector<double> sumrate_sigmas{2.2, 2.4, 2.6, 2.8, 3.0};
    std::vector<double> sumrate_bandwidths{20e6, 30e6};
    std::size_t sumrate_users = 4;
    std::vector<std::size_t> sumrate_user_sweep{2, 4, 6, 8, 10, 12, 14, 16};
    double sumrate_user_sweep_sigma = 2.6;
    std::vector<double> sumrate_floors;   ///< bits/s per user; empty = none

    // wsr
    std::vector<double> wsr_weights{0.1, 0.2, 0.3, 0.4};
    std::vector<std::string> wsr_orders{"4->3->2->1", "1->2->3->4"};
    std::vector<double> wsr_floor_sweep{0.0, 0.5e7, 1.0e7, 1.5e7, 2.0e7};   ///< bits/s, same floor for every user

    // ofdm
    std::vector<std::size_t> ofdm_subcarriers{1, 16, 64, 1024};
    std::size_t ofdm_cp = 16;
    double ofdm_total_power_dbm = 30.0;
    std::size_t ofdm_alloc_subcarriers = 3;
    std::size_t ofdm_alloc_resolution = 121;   ///< 120 steps: the equal split of 1..3 subcarriers is on the grid

    // fit
    std::string fit_input;
    std::string fit_rows = "any";   ///< any | 0 | 1 (dpd_enabled filter)

    // dpd-sweep
    dpd::SweepConfig dpd;
};

/// Flat `key = value` text, `#` comments, lists comma-separated. Unknown keys
/// and malformed values throw std::invalid_argument naming the field and line.
ExperimentConfig parse_config(std::istream& in, const std::string& source = "<config>");
ExperimentConfig load_config(const std::filesystem::path& path);

/// |h|^2 = G_A (c / (4 pi f_c d))^sigma.
double pathloss_gain(double distance, double carrier_freq, double sigma, double antenna_gain);

inline double dbm_to_watts(double dbm) { return std::pow(10.0, (dbm - 30.0) / 10.0); }
inline double watts_to_dbm(double w) { return 10.0 * std::log10(w) + 30.0; }

/// Distances actually used: explicit list, or 60 + 20(k-1) for `users` users.
std::vector<double> resolve_distances(const ExperimentConfig& cfg, std::optional<std::size_t> users = {});

/// PA model from the configured source (ideal when force_ideal is set).
PaModel resolve_pa_model(const ExperimentConfig& cfg);

/// Scenario with optional overrides for the sweeps.
Scenario build_scenario(const ExperimentConfig& cfg, const PaModel& model,
                        std::optional<double> sigma = {}, std::optional<std::size_t> users = {},
                        std::optional<double> bandwidth = {});

/// Reads p_out_dBm / nmse_db (and optional dpd_enabled) columns.
std::vector<dpd::NmseMeasurement> read_measurements(const std::filesystem::path& path,
                                                    const std::string& rows = "any");

}  // namespace noma::cli
