#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "noma/pa_model.hpp"

namespace noma {

using PowerAllocation = std::vector<double>;

struct UserParams {
    double channel_gain;  ///< |h_k|^2, linear
    double p_max;         ///< W
    PaModel model;
};

/// K uplink users sharing one receiver.
class Scenario {
public:
    Scenario(std::vector<UserParams> users, double noise_power, double bandwidth);

    /// Same PA model for every user.
    static Scenario homogeneous(std::span<const double> channel_gains, double p_max,
                                const PaModel& model, double noise_power, double bandwidth);

    std::size_t size() const { return users_.size(); }
    const UserParams& user(std::size_t k) const { return users_.at(k); }
    const std::vector<UserParams>& users() const { return users_; }
    double noise_power() const { return noise_power_; }
    double bandwidth() const { return bandwidth_; }

    LinkBudget link(std::size_t k) const;
    /// p_hat_k = min(p_max_k, p_opt_k)
    double power_cap(std::size_t k) const;
    std::vector<double> power_caps() const;
    /// Single-link maximum rate of user k (power at min(p_opt, p_max)).
    double max_single_user_rate(std::size_t k) const;

    /// Copy with every PA replaced by the ideal model.
    Scenario with_ideal_pa() const;
    Scenario with_models(const PaModel& model) const;

private:
    std::vector<UserParams> users_;
    double noise_power_;
    double bandwidth_;
};

/// perm[pos] is the 0-based user decoded at position pos (pos 0 decoded first).
class DecodingOrder {
public:
    explicit DecodingOrder(std::vector<std::size_t> perm);

    /// pi(i) = i: user 0 decoded first.
    static DecodingOrder identity(std::size_t k);
    static DecodingOrder reversed(std::size_t k);
    /// Parses 1-based arrows such as "2->1" or "4-3-2-1".
    static DecodingOrder parse(const std::string& text);

    std::size_t size() const { return perm_.size(); }
    std::size_t user_at(std::size_t position) const { return perm_.at(position); }
    std::size_t position_of(std::size_t user) const { return pos_.at(user); }
    const std::vector<std::size_t>& perm() const { return perm_; }
    std::string to_string() const;

    bool operator==(const DecodingOrder& o) const { return perm_ == o.perm_; }

private:
    std::vector<std::size_t> perm_;
    std::vector<std::size_t> pos_;
};

/// All K! orders in lexicographic order.
std::vector<DecodingOrder> all_decoding_orders(std::size_t k);

/// Sum over all users of a_i p_i^alpha_i |h_i|^2.
double aggregate_distortion(std::span<const double> p, const Scenario& s);

/// Interference-plus-noise seen by the user decoded at `position`: signals of
/// later-decoded users, distortion of every user (SIC cannot remove it), N0.
double interference_plus_noise(std::size_t position, const DecodingOrder& order,
                               std::span<const double> p, const Scenario& s);

/// SINR of the user decoded at `position`.
double sinr(std::size_t position, const DecodingOrder& order, std::span<const double> p,
            const Scenario& s);

/// Rate in bits/s/Hz of the user decoded at `position`.
double user_rate(std::size_t position, const DecodingOrder& order, std::span<const double> p,
                 const Scenario& s);

/// Rates indexed by user (not by position).
std::vector<double> user_rates(const DecodingOrder& order, std::span<const double> p,
                               const Scenario& s);

/// Order-free sum rate.
double sum_rate(std::span<const double> p, const Scenario& s);

/// p_k |h_k|^2 - (2^r - 1) * interference_plus_noise for the user at `position`.
/// Non-negative iff that user's rate is at least r.
double rate_constraint_slack(std::size_t position, const DecodingOrder& order,
                             std::span<const double> p, const Scenario& s, double rate_floor);

double weighted_sum_rate(std::span<const double> weights, const DecodingOrder& order,
                         std::span<const double> p, const Scenario& s);

void validate_allocation(std::span<const double> p, const Scenario& s);

}  // namespace noma
