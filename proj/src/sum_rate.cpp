#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "noma/solvers.hpp"
#include "solver_common.hpp"

namespace noma::solvers {

using detail::Normalized;

namespace {

constexpr int kSubgradientSteps = 5000;
constexpr double kViolationTol = 1e-6;

// Maximizer of the partial Lagrangian for fixed gamma_hat and multipliers.
// c[pos] = 2^r - 1 and lambda[pos] are indexed by decoding position.
Eigen::VectorXd lagrangian_powers(const Normalized& n, double gamma_hat,
                                  const std::vector<double>& lambda,
                                  const std::vector<double>& c) {
    double weighted = 0.0;
    for (std::size_t j = 0; j < n.k; ++j) weighted += lambda[j] * c[j];
    Eigen::VectorXd p(static_cast<Eigen::Index>(n.k));
    double before = 0.0;  // sum of lambda_i c_i over users decoded earlier
    for (std::size_t pos = 0; pos < n.k; ++pos) {
        const std::size_t u = n.order.user_at(pos);
        const double num = 1.0 + lambda[pos] - before;
        const double scale = gamma_hat + weighted;
        double value;
        if (n.distortion_constant(u) || n.alpha[u] == 1.0) {
            // Lagrangian is linear in p_u.
            const double slope = n.g[u] * num - scale * n.distortion_d1(u, 1.0);
            value = slope > 0.0 ? n.cap[u] : 0.0;
        } else if (num <= 0.0) {
            value = 0.0;
        } else if (scale <= 0.0) {
            value = n.cap[u];
        } else {
            const double base = num / (scale * n.a[u] * n.alpha[u]);
            value = std::min(n.cap[u], std::pow(base, 1.0 / (n.alpha[u] - 1.0)));
        }
        p[static_cast<Eigen::Index>(u)] = value;
        before += lambda[pos] * c[pos];
    }
    return p;
}

double signal(const Normalized& n, const Eigen::VectorXd& p) {
    double s = 0.0;
    for (std::size_t u = 0; u < n.k; ++u) s += p[static_cast<Eigen::Index>(u)] * n.g[u];
    return s;
}

}  // namespace

SolveReport sum_rate_maximize(std::span<const double> floors, const Scenario& s,
                              const SolverSettings& cfg,
                              const std::optional<DecodingOrder>& order_opt) {
    cfg.validate();
    detail::require_solver_models(s);
    const std::size_t k = s.size();
    if (floors.size() != k) throw std::invalid_argument("rate floors size mismatch");
    for (double r : floors) {
        if (!(r >= 0.0) || !std::isfinite(r)) throw std::domain_error("rate floors must be >= 0");
    }
    const DecodingOrder order = order_opt.value_or(DecodingOrder::identity(k));
    const Normalized n(s, order);

    SolveReport report;
    std::vector<double> c(k, 0.0);
    bool has_floors = false;
    std::vector<SmoothFunction> slacks(k);
    ConcaveProblem pr;
    pr.lower = n.lower();
    pr.upper = n.upper();
    for (std::size_t pos = 0; pos < k; ++pos) {
        const std::size_t u = order.user_at(pos);
        c[pos] = std::expm1(floors[u] * std::log(2.0));
        if (floors[u] > 0.0) {
            has_floors = true;
            slacks[pos] = n.slack_fn(pos, floors[u]);
            pr.constraints.push_back(slacks[pos]);
        }
    }

    Eigen::VectorXd anchor = 0.5 * pr.upper;
    if (has_floors) {
        pr.objective = linear_function(Eigen::VectorXd::Zero(static_cast<Eigen::Index>(k)));
        const FeasibilityResult feas = find_strictly_feasible(pr, cfg.barrier(), anchor);
        report.certificate = feas.max_min_slack;
        if (!feas.strictly_feasible) {
            report.status = SolveStatus::Infeasible;
            report.p_star = detail::to_std(feas.x);
            report.message = "rate floors are jointly infeasible";
            return report;
        }
        anchor = feas.x;
    }

    std::vector<double> lambda(k, 0.0);
    double gamma_hat = 0.0;
    Eigen::VectorXd p = anchor;
    bool used_fallback = false;

    auto solve_inner = [&](double gh) -> Eigen::VectorXd {
        if (!has_floors) {
            std::fill(lambda.begin(), lambda.end(), 0.0);
            return lagrangian_powers(n, gh, lambda, c);
        }
        // Dual subgradient on lambda, warm-started from the previous multipliers.
        for (int t = 1; t <= kSubgradientSteps; ++t) {
            const Eigen::VectorXd q = lagrangian_powers(n, gh, lambda, c);
            const std::vector<double> qs = detail::to_std(q);
            const double violation = detail::floor_violation(floors, order, qs, s);
            double gap = 0.0;
            const double step = cfg.subgradient_c / std::sqrt(static_cast<double>(t));
            for (std::size_t pos = 0; pos < k; ++pos) {
                const std::size_t u = order.user_at(pos);
                const double slack = c[pos] > 0.0 ? slacks[pos].value(q) : 0.0;
                const double scaled = slack / (n.g[u] * n.cap[u]);
                gap += lambda[pos] * scaled;
                if (c[pos] > 0.0) lambda[pos] = std::max(0.0, lambda[pos] - step * scaled);
            }
            if (violation <= kViolationTol && std::abs(gap) <= kViolationTol) return q;
        }
        // Multipliers did not settle: solve the same inner problem directly.
        used_fallback = true;
        pr.objective.value = [&n, gh](const Eigen::VectorXd& x) {
            return signal(n, x) - gh * (1.0 + n.total_distortion(x));
        };
        pr.objective.gradient = [&n, gh](const Eigen::VectorXd& x) {
            Eigen::VectorXd grad(x.size());
            for (std::size_t u = 0; u < n.k; ++u) {
                const auto i = static_cast<Eigen::Index>(u);
                grad[i] = n.g[u] - gh * n.distortion_d1(u, x[i]);
            }
            return grad;
        };
        pr.objective.hessian = [&n, gh](const Eigen::VectorXd& x) {
            Eigen::MatrixXd h = Eigen::MatrixXd::Zero(x.size(), x.size());
            for (std::size_t u = 0; u < n.k; ++u) {
                const auto i = static_cast<Eigen::Index>(u);
                h(i, i) = -gh * n.distortion_d2(u, x[i]);
            }
            return h;
        };
        const ConcaveSolution sol =
            solve_concave_subproblem(pr, cfg.barrier(), Eigen::VectorXd(0.5 * (p + anchor)));
        return sol.x;
    };

    for (int it = 0; it < cfg.max_outer_iters; ++it) {
        const Eigen::VectorXd q = solve_inner(gamma_hat);
        const double num = signal(n, q);
        const double den = 1.0 + n.total_distortion(q);
        double f = num - gamma_hat * den;
        if (it > 0) {
            const double f_prev = signal(n, p) - gamma_hat * (1.0 + n.total_distortion(p));
            if (f_prev > f) f = f_prev;
            else p = q;
        } else {
            p = q;
        }
        report.iterations = it + 1;
        report.f_trace.push_back(f);
        gamma_hat = std::max(gamma_hat, signal(n, p) / (1.0 + n.total_distortion(p)));
        report.trace.push_back(gamma_hat);
        if (std::abs(f) <= cfg.epsilon) {
            report.converged = true;
            break;
        }
    }

    report.p_star = detail::to_std(p);
    detail::clamp_to_caps(report.p_star, n);
    report.objective = sum_rate(report.p_star, s);
    const double violation = has_floors
                                 ? detail::floor_violation(floors, order, report.p_star, s)
                                 : 0.0;
    const bool ok = report.converged && violation <= kViolationTol;
    report.status = ok ? SolveStatus::Optimal : SolveStatus::NotConverged;
    if (!report.converged) {
        report.message = "outer iteration limit reached";
    } else if (violation > kViolationTol) {
        report.message = "rate floors violated by " + std::to_string(violation) + " bits/s/Hz";
    } else if (used_fallback) {
        report.message = "multiplier updates stalled; inner problems finished by barrier method";
    }
    return report;
}

}  // namespace noma::solvers
