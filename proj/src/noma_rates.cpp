#include "noma/noma_rates.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace noma {

Scenario::Scenario(std::vector<UserParams> users, double noise_power, double bandwidth)
    : users_(std::move(users)), noise_power_(noise_power), bandwidth_(bandwidth) {
    if (users_.empty()) throw std::invalid_argument("Scenario: at least one user required");
    if (!(noise_power_ > 0.0) || !std::isfinite(noise_power_)) {
        throw std::invalid_argument("Scenario: noise_power must be > 0");
    }
    if (!(bandwidth_ > 0.0) || !std::isfinite(bandwidth_)) {
        throw std::invalid_argument("Scenario: bandwidth must be > 0");
    }
    for (const auto& u : users_) {
        // Validates gain and power through the LinkBudget invariants.
        LinkBudget(u.channel_gain, noise_power_, u.p_max);
    }
}

Scenario Scenario::homogeneous(std::span<const double> channel_gains, double p_max,
                               const PaModel& model, double noise_power, double bandwidth) {
    std::vector<UserParams> users;
    users.reserve(channel_gains.size());
    for (double g : channel_gains) users.push_back({g, p_max, model});
    return Scenario(std::move(users), noise_power, bandwidth);
}

LinkBudget Scenario::link(std::size_t k) const {
    const auto& u = users_.at(k);
    return LinkBudget(u.channel_gain, noise_power_, u.p_max);
}

double Scenario::power_cap(std::size_t k) const {
    return optimal_p2p_power(link(k), users_.at(k).model);
}

std::vector<double> Scenario::power_caps() const {
    std::vector<double> caps(size());
    for (std::size_t k = 0; k < size(); ++k) caps[k] = power_cap(k);
    return caps;
}

double Scenario::max_single_user_rate(std::size_t k) const {
    return max_p2p_rate(link(k), users_.at(k).model);
}

Scenario Scenario::with_ideal_pa() const { return with_models(PaModel::ideal()); }

Scenario Scenario::with_models(const PaModel& model) const {
    auto users = users_;
    for (auto& u : users) u.model = model;
    return Scenario(std::move(users), noise_power_, bandwidth_);
}

DecodingOrder::DecodingOrder(std::vector<std::size_t> perm) : perm_(std::move(perm)) {
    const std::size_t k = perm_.size();
    if (k == 0) throw std::invalid_argument("DecodingOrder: empty permutation");
    pos_.assign(k, k);
    for (std::size_t i = 0; i < k; ++i) {
        if (perm_[i] >= k || pos_[perm_[i]] != k) {
            throw std::invalid_argument("DecodingOrder: not a permutation");
        }
        pos_[perm_[i]] = i;
    }
}

DecodingOrder DecodingOrder::identity(std::size_t k) {
    std::vector<std::size_t> perm(k);
    std::iota(perm.begin(), perm.end(), std::size_t{0});
    return DecodingOrder(std::move(perm));
}

DecodingOrder DecodingOrder::reversed(std::size_t k) {
    std::vector<std::size_t> perm(k);
    for (std::size_t i = 0; i < k; ++i) perm[i] = k - 1 - i;
    return DecodingOrder(std::move(perm));
}

DecodingOrder DecodingOrder::parse(const std::string& text) {
    std::vector<std::size_t> perm;
    std::string token;
    auto flush = [&] {
        if (token.empty()) return;
        std::size_t used = 0;
        const long v = std::stol(token, &used);
        if (used != token.size() || v < 1) {
            throw std::invalid_argument("DecodingOrder: bad user index '" + token + "'");
        }
        perm.push_back(static_cast<std::size_t>(v - 1));
        token.clear();
    };
    for (char c : text) {
        if (std::isdigit(static_cast<unsigned char>(c))) {
            token.push_back(c);
        } else if (c == '-' || c == '>' || c == ',' || c == ' ') {
            flush();
        } else {
            throw std::invalid_argument("DecodingOrder: unexpected character in '" + text + "'");
        }
    }
    flush();
    return DecodingOrder(std::move(perm));
}

std::string DecodingOrder::to_string() const {
    std::ostringstream os;
    for (std::size_t i = 0; i < perm_.size(); ++i) {
        if (i) os << "->";
        os << perm_[i] + 1;
    }
    return os.str();
}

std::vector<DecodingOrder> all_decoding_orders(std::size_t k) {
    std::vector<std::size_t> perm(k);
    std::iota(perm.begin(), perm.end(), std::size_t{0});
    std::vector<DecodingOrder> out;
    do {
        out.emplace_back(perm);
    } while (std::next_permutation(perm.begin(), perm.end()));
    return out;
}

void validate_allocation(std::span<const double> p, const Scenario& s) {
    if (p.size() != s.size()) throw std::invalid_argument("power allocation size mismatch");
    for (double v : p) {
        if (!(v >= 0.0) || !std::isfinite(v)) {
            throw std::domain_error("power allocation entries must be finite and >= 0");
        }
    }
}

double aggregate_distortion(std::span<const double> p, const Scenario& s) {
    double sum = 0.0;
    for (std::size_t i = 0; i < s.size(); ++i) {
        const auto& u = s.user(i);
        sum += distortion_power(p[i], u.model) * u.channel_gain;
    }
    return sum;
}

double interference_plus_noise(std::size_t position, const DecodingOrder& order,
                               std::span<const double> p, const Scenario& s) {
    if (order.size() != s.size()) throw std::invalid_argument("decoding order size mismatch");
    if (position >= s.size()) throw std::out_of_range("decoding position out of range");
    validate_allocation(p, s);
    double residual = 0.0;
    for (std::size_t j = position + 1; j < order.size(); ++j) {
        const std::size_t u = order.user_at(j);
        residual += p[u] * s.user(u).channel_gain;
    }
    return residual + aggregate_distortion(p, s) + s.noise_power();
}

double sinr(std::size_t position, const DecodingOrder& order, std::span<const double> p,
            const Scenario& s) {
    const double den = interference_plus_noise(position, order, p, s);
    const std::size_t u = order.user_at(position);
    return p[u] * s.user(u).channel_gain / den;
}

double user_rate(std::size_t position, const DecodingOrder& order, std::span<const double> p,
                 const Scenario& s) {
    return std::log2(1.0 + sinr(position, order, p, s));
}

std::vector<double> user_rates(const DecodingOrder& order, std::span<const double> p,
                               const Scenario& s) {
    std::vector<double> rates(s.size());
    for (std::size_t pos = 0; pos < s.size(); ++pos) {
        rates[order.user_at(pos)] = user_rate(pos, order, p, s);
    }
    return rates;
}

double sum_rate(std::span<const double> p, const Scenario& s) {
    validate_allocation(p, s);
    double signal = 0.0;
    for (std::size_t k = 0; k < s.size(); ++k) signal += p[k] * s.user(k).channel_gain;
    return std::log2(1.0 + signal / (aggregate_distortion(p, s) + s.noise_power()));
}

double rate_constraint_slack(std::size_t position, const DecodingOrder& order,
                             std::span<const double> p, const Scenario& s, double rate_floor) {
    if (!(rate_floor >= 0.0)) throw std::domain_error("rate floor must be >= 0");
    const double den = interference_plus_noise(position, order, p, s);
    const std::size_t u = order.user_at(position);
    return p[u] * s.user(u).channel_gain - std::expm1(rate_floor * std::log(2.0)) * den;
}

double weighted_sum_rate(std::span<const double> weights, const DecodingOrder& order,
                         std::span<const double> p, const Scenario& s) {
    if (weights.size() != s.size()) throw std::invalid_argument("weights size mismatch");
    const auto rates = user_rates(order, p, s);
    double total = 0.0;
    for (std::size_t k = 0; k < rates.size(); ++k) total += weights[k] * rates[k];
    return total;
}

}  // namespace noma
