#include "solver_common.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace noma::solvers {

void SolverSettings::validate() const {
    auto fail = [](const std::string& field) {
        throw std::invalid_argument("SolverSettings: " + field + " out of range");
    };
    if (!(epsilon > 0.0)) fail("epsilon");
    if (max_outer_iters < 1) fail("max_outer_iters");
    if (!(inner_tol > 0.0)) fail("inner_tol");
    if (!(barrier_mu > 1.0)) fail("barrier_mu");
    if (tau_grid < 2) fail("tau_grid");
    if (!(subgradient_c > 0.0)) fail("subgradient_c");
}

BarrierSettings SolverSettings::barrier(bool tie_break) const {
    BarrierSettings b;
    b.inner_tol = inner_tol;
    b.barrier_mu = barrier_mu;
    b.tie_break_smallest = tie_break;
    return b;
}

}  // namespace noma::solvers

namespace noma::solvers::detail {

Normalized::Normalized(const Scenario& s, const DecodingOrder& ord)
    : k(s.size()), g(k), a(k), alpha(k), cap(k), order(ord) {
    if (ord.size() != k) throw std::invalid_argument("decoding order size mismatch");
    for (std::size_t u = 0; u < k; ++u) {
        const auto& user = s.user(u);
        g[u] = user.channel_gain / s.noise_power();
        a[u] = user.model.a();
        alpha[u] = user.model.alpha();
        cap[u] = s.power_cap(u);
    }
}

double Normalized::distortion(std::size_t u, double p) const {
    if (a[u] == 0.0) return 0.0;
    if (alpha[u] == 0.0) return a[u] * g[u];
    if (p == 0.0) return 0.0;
    return a[u] * std::pow(p, alpha[u]) * g[u];
}

double Normalized::distortion_d1(std::size_t u, double p) const {
    if (distortion_constant(u)) return 0.0;
    if (alpha[u] == 1.0) return a[u] * g[u];
    return a[u] * alpha[u] * std::pow(p, alpha[u] - 1.0) * g[u];
}

double Normalized::distortion_d2(std::size_t u, double p) const {
    if (distortion_constant(u) || alpha[u] == 1.0) return 0.0;
    return a[u] * alpha[u] * (alpha[u] - 1.0) * std::pow(p, alpha[u] - 2.0) * g[u];
}

double Normalized::total_distortion(const Eigen::VectorXd& p) const {
    double sum = 0.0;
    for (std::size_t u = 0; u < k; ++u) sum += distortion(u, p[static_cast<Eigen::Index>(u)]);
    return sum;
}

double Normalized::denominator(std::size_t position, const Eigen::VectorXd& p,
                               bool include_own) const {
    double d = 1.0 + total_distortion(p);
    for (std::size_t j = include_own ? position : position + 1; j < k; ++j) {
        const std::size_t u = order.user_at(j);
        d += p[static_cast<Eigen::Index>(u)] * g[u];
    }
    return d;
}

SmoothFunction Normalized::denominator_fn(std::size_t position, bool include_own) const {
    const Normalized self = *this;
    const auto n = static_cast<Eigen::Index>(k);
    Eigen::VectorXd linear = Eigen::VectorXd::Zero(n);
    for (std::size_t j = include_own ? position : position + 1; j < k; ++j) {
        const std::size_t u = order.user_at(j);
        linear[static_cast<Eigen::Index>(u)] = g[u];
    }
    SmoothFunction f;
    f.value = [self, linear](const Eigen::VectorXd& p) {
        return 1.0 + linear.dot(p) + self.total_distortion(p);
    };
    f.gradient = [self, linear](const Eigen::VectorXd& p) {
        Eigen::VectorXd grad = linear;
        for (std::size_t u = 0; u < self.k; ++u) {
            const auto i = static_cast<Eigen::Index>(u);
            grad[i] += self.distortion_d1(u, p[i]);
        }
        return grad;
    };
    f.hessian = [self, n](const Eigen::VectorXd& p) {
        Eigen::MatrixXd h = Eigen::MatrixXd::Zero(n, n);
        for (std::size_t u = 0; u < self.k; ++u) {
            const auto i = static_cast<Eigen::Index>(u);
            h(i, i) = self.distortion_d2(u, p[i]);
        }
        return h;
    };
    return f;
}

SmoothFunction Normalized::slack_fn(std::size_t position, double rate_floor) const {
    const double c = std::expm1(rate_floor * std::log(2.0));
    const auto u = static_cast<Eigen::Index>(order.user_at(position));
    const double gu = g[order.user_at(position)];
    SmoothFunction d = denominator_fn(position, false);
    SmoothFunction f;
    f.value = [d, c, u, gu](const Eigen::VectorXd& p) { return p[u] * gu - c * d.value(p); };
    f.gradient = [d, c, u, gu](const Eigen::VectorXd& p) {
        Eigen::VectorXd grad = -c * d.gradient(p);
        grad[u] += gu;
        return grad;
    };
    f.hessian = [d, c](const Eigen::VectorXd& p) -> Eigen::MatrixXd { return -c * d.hessian(p); };
    return f;
}

double Normalized::rate(std::size_t position, const Eigen::VectorXd& p) const {
    const std::size_t u = order.user_at(position);
    return std::log2(1.0 + p[static_cast<Eigen::Index>(u)] * g[u] / denominator(position, p, false));
}

Eigen::VectorXd Normalized::upper() const {
    Eigen::VectorXd u(static_cast<Eigen::Index>(k));
    for (std::size_t i = 0; i < k; ++i) u[static_cast<Eigen::Index>(i)] = cap[i];
    return u;
}

void require_solver_models(const Scenario& s) {
    for (std::size_t u = 0; u < s.size(); ++u) {
        const auto& m = s.user(u).model;
        if (!(m.a() == 0.0 || m.alpha() == 0.0 || m.alpha() >= 1.0)) {
            throw std::domain_error("solvers require alpha >= 1 (or a = 0) for user " +
                                    std::to_string(u + 1));
        }
        if (!(s.user(u).channel_gain > 0.0)) {
            throw std::domain_error("solvers require a positive channel gain for user " +
                                    std::to_string(u + 1));
        }
    }
}

double floor_violation(std::span<const double> floors, const DecodingOrder& order,
                       std::span<const double> p, const Scenario& s) {
    const auto rates = user_rates(order, p, s);
    double worst = 0.0;
    for (std::size_t u = 0; u < rates.size(); ++u) worst = std::max(worst, floors[u] - rates[u]);
    return worst;
}

std::vector<double> to_std(const Eigen::VectorXd& v) {
    return std::vector<double>(v.data(), v.data() + v.size());
}

Eigen::VectorXd to_eigen(std::span<const double> v) {
    Eigen::VectorXd out(static_cast<Eigen::Index>(v.size()));
    for (std::size_t i = 0; i < v.size(); ++i) out[static_cast<Eigen::Index>(i)] = v[i];
    return out;
}

void clamp_to_caps(std::vector<double>& p, const Normalized& n) {
    for (std::size_t u = 0; u < p.size(); ++u) p[u] = std::clamp(p[u], 0.0, n.cap[u]);
}

}  // namespace noma::solvers::detail
