#pragma once

#include <cmath>
#include <random>
#include <vector>

#include "noma/noma_rates.hpp"

namespace fixture {

inline constexpr double kPi = 3.14159265358979323846;

inline double gain_at(double d, double sigma = 2.6) {
    return 4.11 * std::pow(3e8 / (4.0 * kPi * 2.4e9 * d), sigma);
}

inline double noise(double bandwidth) { return std::pow(10.0, (-174.0 - 30.0) / 10.0) * bandwidth; }

inline double dbm(double w) { return 10.0 * std::log10(w) + 30.0; }
inline double watts(double dbm) { return std::pow(10.0, (dbm - 30.0) / 10.0); }

/// Two users at 120 m and 80 m, 30 MHz, 36 dBm.
inline noma::Scenario two_user(const noma::PaModel& m = noma::PaModel(0.0032, 1.3552),
                               double sigma = 2.6) {
    const std::vector<double> g{gain_at(120.0, sigma), gain_at(80.0, sigma)};
    return noma::Scenario::homogeneous(g, watts(36.0), m, noise(30e6), 30e6);
}

/// Random normalized scenario with SNRs between 10 and 60 dB and a random
/// nonlinear PA.
inline noma::Scenario random_scenario(std::mt19937_64& rng, std::size_t k, bool ideal = false) {
    std::uniform_real_distribution<double> snr_db(10.0, 60.0), a(1e-4, 1e-2), alpha(1.05, 1.8),
        pmax(0.5, 5.0);
    const double n0 = 1e-12;
    std::vector<noma::UserParams> users;
    const noma::PaModel model = ideal ? noma::PaModel::ideal() : noma::PaModel(a(rng), alpha(rng));
    const double p = pmax(rng);
    for (std::size_t i = 0; i < k; ++i) {
        users.push_back({n0 * std::pow(10.0, snr_db(rng) / 10.0) / p, p, model});
    }
    return noma::Scenario(users, n0, 1e6);
}

}  // namespace fixture
