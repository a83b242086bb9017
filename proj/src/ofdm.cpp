#include "noma/ofdm.hpp"

#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "noma/kernels.hpp"

namespace noma::ofdm {

void OfdmConfig::validate() const {
    if (n_subcarriers < 1) throw std::invalid_argument("OfdmConfig: n_subcarriers must be >= 1");
    if (!(bandwidth > 0.0)) throw std::invalid_argument("OfdmConfig: bandwidth must be > 0");
    if (!(noise_psd > 0.0)) throw std::invalid_argument("OfdmConfig: noise_psd must be > 0");
    if (subchannel_gains.size() != n_subcarriers) {
        throw std::invalid_argument("OfdmConfig: subchannel_gains needs N entries");
    }
    if (subcarrier_powers.size() != n_subcarriers) {
        throw std::invalid_argument("OfdmConfig: subcarrier_powers needs N entries");
    }
    for (double g : subchannel_gains) {
        if (!(g >= 0.0) || !std::isfinite(g)) {
            throw std::invalid_argument("OfdmConfig: subchannel gains must be >= 0");
        }
    }
    for (double p : subcarrier_powers) {
        if (!(p >= 0.0) || !std::isfinite(p)) {
            throw std::invalid_argument("OfdmConfig: subcarrier powers must be >= 0");
        }
    }
}

double OfdmConfig::total_power() const {
    return std::accumulate(subcarrier_powers.begin(), subcarrier_powers.end(), 0.0);
}

OfdmConfig OfdmConfig::flat(std::size_t n, std::size_t cp, double bandwidth, double noise_psd,
                            double gain, double total_power) {
    OfdmConfig cfg;
    cfg.n_subcarriers = n;
    cfg.cp_len = cp;
    cfg.bandwidth = bandwidth;
    cfg.noise_psd = noise_psd;
    cfg.subchannel_gains.assign(n, gain);
    cfg.subcarrier_powers.assign(n, total_power / static_cast<double>(n));
    cfg.validate();
    return cfg;
}

namespace {

double rate_with_total(std::size_t m, const OfdmConfig& cfg, const PaModel& model, double p_total) {
    const double n = static_cast<double>(cfg.n_subcarriers);
    const double h = cfg.subchannel_gains[m];
    const double distortion = distortion_power(p_total, model) / n * h;
    const double noise = cfg.bandwidth / n * cfg.noise_psd;
    return cfg.bandwidth / n * std::log2(1.0 + cfg.subcarrier_powers[m] * h / (distortion + noise));
}

}  // namespace

double subcarrier_rate(std::size_t m, const OfdmConfig& cfg, const PaModel& model) {
    cfg.validate();
    if (m >= cfg.n_subcarriers) throw std::out_of_range("subcarrier index out of range");
    return rate_with_total(m, cfg, model, cfg.total_power());
}

double ofdm_sum_rate(const OfdmConfig& cfg, const PaModel& model) {
    cfg.validate();
    const double total = cfg.total_power();
    double sum = 0.0;
    for (std::size_t m = 0; m < cfg.n_subcarriers; ++m) sum += rate_with_total(m, cfg, model, total);
    return sum;
}

AllocationResult grid_allocate(const OfdmConfig& cfg, const PaModel& model, double p_total,
                               std::size_t resolution, bool parallel) {
    cfg.validate();
    if (cfg.n_subcarriers > 3) throw std::invalid_argument("grid allocation supports N <= 3");
    if (!(p_total > 0.0)) throw std::invalid_argument("total power must be > 0");
    kernels::GridSpec grid{std::vector<double>(cfg.n_subcarriers, p_total), resolution};
    kernels::GridObjective f = [&](std::span<const double> p) {
        double total = 0.0;
        for (double v : p) total += v;
        if (total > p_total * (1.0 + 1e-12)) return -std::numeric_limits<double>::infinity();
        OfdmConfig trial = cfg;
        trial.subcarrier_powers.assign(p.begin(), p.end());
        double sum = 0.0;
        for (std::size_t m = 0; m < trial.n_subcarriers; ++m) {
            sum += rate_with_total(m, trial, model, total);
        }
        return sum;
    };
    const auto best = parallel ? kernels::grid_search_omp(grid, f) : kernels::grid_search_serial(grid, f);
    return {best.point, best.value};
}

}  // namespace noma::ofdm
