#include "noma/pa_model.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace noma {

namespace {

void require_finite(double v, const char* name) {
    if (!std::isfinite(v)) {
        throw std::invalid_argument(std::string(name) + " must be finite");
    }
}

}  // namespace

PaModel::PaModel(double a, double alpha) : a_(a), alpha_(alpha) {
    require_finite(a, "a");
    require_finite(alpha, "alpha");
    if (a < 0.0) throw std::invalid_argument("PaModel: a must be >= 0");
    if (alpha < 0.0) throw std::invalid_argument("PaModel: alpha must be >= 0");
}

PaModel to_power_law(const RegressionForm& reg) {
    // a = 1000^k1 * 10^(k2/10), computed in the log domain.
    const double log10_a = 3.0 * reg.k1 + reg.k2 / 10.0;
    return PaModel(std::pow(10.0, log10_a), 1.0 + reg.k1);
}

RegressionForm to_regression(const PaModel& model) {
    if (model.is_ideal()) {
        throw std::domain_error("to_regression: ideal PA has no finite regression form");
    }
    const double k1 = model.alpha() - 1.0;
    const double k2 = 10.0 * (std::log10(model.a()) - 3.0 * k1);
    return {k1, k2};
}

LinkBudget::LinkBudget(double channel_gain, double noise_power, double p_max)
    : channel_gain_(channel_gain), noise_power_(noise_power), p_max_(p_max) {
    require_finite(channel_gain, "channel_gain");
    require_finite(noise_power, "noise_power");
    require_finite(p_max, "p_max");
    if (channel_gain < 0.0) throw std::invalid_argument("LinkBudget: channel_gain must be >= 0");
    if (noise_power <= 0.0) throw std::invalid_argument("LinkBudget: noise_power must be > 0");
    if (p_max <= 0.0) throw std::invalid_argument("LinkBudget: p_max must be > 0");
}

double distortion_power(double p_t, const PaModel& model) {
    if (!(p_t >= 0.0)) throw std::domain_error("distortion_power: p_t must be >= 0");
    if (model.a() == 0.0) return 0.0;
    if (model.alpha() == 0.0) return model.a();
    if (p_t == 0.0) return 0.0;
    return model.a() * std::pow(p_t, model.alpha());
}

double nmse_db(double p_t, const RegressionForm& reg) {
    if (!(p_t > 0.0)) throw std::domain_error("nmse_db: p_t must be > 0");
    return reg.k1 * 10.0 * std::log10(1000.0 * p_t) + reg.k2;
}

double p2p_sinr(double p, const LinkBudget& link, const PaModel& model) {
    if (!(p >= 0.0)) throw std::domain_error("p2p_sinr: p must be >= 0");
    if (p == 0.0) return 0.0;
    const double h = link.channel_gain();
    return p * h / (distortion_power(p, model) * h + link.noise_power());
}

double p2p_rate(double p, const LinkBudget& link, const PaModel& model) {
    return std::log2(1.0 + p2p_sinr(p, link, model));
}

double unconstrained_optimal_power(const LinkBudget& link, const PaModel& model) {
    if (!model.has_interior_optimum() || link.channel_gain() == 0.0) return kInf;
    const double alpha = model.alpha();
    return std::pow(link.noise_power() / (model.a() * (alpha - 1.0) * link.channel_gain()),
                    1.0 / alpha);
}

double optimal_p2p_power(const LinkBudget& link, const PaModel& model) {
    return std::min(link.p_max(), unconstrained_optimal_power(link, model));
}

double max_p2p_rate(const LinkBudget& link, const PaModel& model) {
    return p2p_rate(optimal_p2p_power(link, model), link, model);
}

double max_p2p_rate_closed_form(const LinkBudget& link, const PaModel& model) {
    const double p_opt = unconstrained_optimal_power(link, model);
    if (!(p_opt <= link.p_max())) {
        const double p = link.p_max();
        const double h = link.channel_gain();
        return std::log2(1.0 + p * h / (distortion_power(p, model) * h + link.noise_power()));
    }
    // At the stationary point a p^alpha |h|^2 = N0 / (alpha - 1).
    const double alpha = model.alpha();
    return std::log2(1.0 + (alpha - 1.0) / alpha * p_opt * link.channel_gain() / link.noise_power());
}

}  // namespace noma
