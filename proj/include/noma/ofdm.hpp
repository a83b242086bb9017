#pragma once

#include <cstddef>
#include <vector>

#include "noma/pa_model.hpp"

namespace noma::ofdm {

/// One OFDM link. The PA distortion depends on the total transmit power and
/// is spread evenly over the subcarriers.
struct OfdmConfig {
    std::size_t n_subcarriers = 1;
    std::size_t cp_len = 0;
    double bandwidth = 1.0;              ///< Hz
    double noise_psd = 1.0;              ///< W/Hz
    std::vector<double> subchannel_gains;
    std::vector<double> subcarrier_powers;  ///< W

    void validate() const;
    double total_power() const;

    /// Identical gains and equal power split.
    static OfdmConfig flat(std::size_t n, std::size_t cp, double bandwidth, double noise_psd,
                           double gain, double total_power);
};

/// Rate of subcarrier m in bits/s.
double subcarrier_rate(std::size_t m, const OfdmConfig& cfg, const PaModel& model);

/// Sum over subcarriers, bits/s.
double ofdm_sum_rate(const OfdmConfig& cfg, const PaModel& model);

struct AllocationResult {
    std::vector<double> powers;
    double sum_rate = 0.0;   ///< bits/s
};

/// Exhaustive search over per-subcarrier powers on a grid over [0, p_total]^N
/// with sum(P^m) <= p_total. N <= 3.
AllocationResult grid_allocate(const OfdmConfig& cfg, const PaModel& model, double p_total,
                               std::size_t resolution, bool parallel = true);

}  // namespace noma::ofdm
