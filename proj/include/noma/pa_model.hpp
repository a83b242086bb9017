#pragma once

#include <limits>

namespace noma {

/// Power-law PA distortion model: P_N = a * P_T^alpha.
///
/// a = 0 is an ideal PA, alpha = 1 the linear distortion model and
/// alpha > 1 the measured nonlinear regime.
class PaModel {
public:
    PaModel(double a, double alpha);

    static PaModel ideal() { return PaModel(0.0, 1.0); }

    double a() const { return a_; }
    double alpha() const { return alpha_; }

    bool is_ideal() const { return a_ == 0.0; }
    /// True when the single-link SINR has an interior maximum.
    bool has_interior_optimum() const { return a_ > 0.0 && alpha_ > 1.0; }

    bool operator==(const PaModel&) const = default;

private:
    double a_;
    double alpha_;
};

/// Linear fit of NMSE [dB] against output power [dBm]:
///   nmse_db = k1 * 10 log10(1000 P_T) + k2
struct RegressionForm {
    double k1 = 0.0;
    double k2 = 0.0;
};

PaModel to_power_law(const RegressionForm& reg);
RegressionForm to_regression(const PaModel& model);

/// Single uplink as seen by the receiver. All quantities linear SI.
class LinkBudget {
public:
    LinkBudget(double channel_gain, double noise_power, double p_max);

    double channel_gain() const { return channel_gain_; }
    double noise_power() const { return noise_power_; }
    double p_max() const { return p_max_; }

private:
    double channel_gain_;
    double noise_power_;
    double p_max_;
};

/// a * p_t^alpha. Zero at p_t = 0 unless alpha = 0 (constant noise floor).
double distortion_power(double p_t, const PaModel& model);

/// NMSE in dB predicted by the regression form at output power p_t [W].
double nmse_db(double p_t, const RegressionForm& reg);

/// Received SINR of an isolated link transmitting at p [W].
double p2p_sinr(double p, const LinkBudget& link, const PaModel& model);

/// log2(1 + p2p_sinr) in bits/s/Hz.
double p2p_rate(double p, const LinkBudget& link, const PaModel& model);

/// Stationary point of the single-link SINR, (N0 / (a (alpha-1) |h|^2))^(1/alpha).
/// +infinity when the SINR is monotone (ideal PA, alpha <= 1, or zero gain).
double unconstrained_optimal_power(const LinkBudget& link, const PaModel& model);

/// min(p_max, unconstrained optimum). This is the per-user power cap used by
/// every solver.
double optimal_p2p_power(const LinkBudget& link, const PaModel& model);

/// Maximum single-link rate, evaluated at optimal_p2p_power.
double max_p2p_rate(const LinkBudget& link, const PaModel& model);

/// Closed-form maximum single-link rate with the explicit case split:
/// monotone models and p_opt > p_max evaluate at p_max, otherwise
/// log2(1 + (alpha-1)/alpha * p_opt |h|^2 / N0).
double max_p2p_rate_closed_form(const LinkBudget& link, const PaModel& model);

inline constexpr double kInf = std::numeric_limits<double>::infinity();

}  // namespace noma
