#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "noma/solvers.hpp"
#include "solver_common.hpp"

namespace noma::solvers {

using detail::Normalized;

namespace {

SolveReport two_user_endpoint(std::size_t target, const Normalized& n) {
    // The other user sits at its single-link maximum, so nothing may add to
    // its denominator. The target can still transmit if it is decoded first
    // and its distortion does not grow with power.
    const std::size_t other = 1 - target;
    Eigen::VectorXd p = Eigen::VectorXd::Zero(2);
    p[static_cast<Eigen::Index>(other)] = n.cap[other];
    const bool target_free = n.order.position_of(target) < n.order.position_of(other) &&
                             n.distortion_constant(target);
    if (target_free) p[static_cast<Eigen::Index>(target)] = n.cap[target];

    SolveReport r;
    r.status = SolveStatus::Optimal;
    r.converged = true;
    r.p_star = detail::to_std(p);
    r.objective = n.rate(n.order.position_of(target), p);
    r.trace = {0.0};
    r.message = "rate floor at the single-link maximum";
    return r;
}

}  // namespace

SolveReport maximize_user_rate(std::size_t target, std::span<const double> floors,
                               const DecodingOrder& order, const Scenario& s,
                               const SolverSettings& cfg) {
    cfg.validate();
    detail::require_solver_models(s);
    const std::size_t k = s.size();
    if (target >= k) throw std::out_of_range("target user out of range");
    if (floors.size() != k) throw std::invalid_argument("rate floors size mismatch");
    for (double r : floors) {
        if (!(r >= 0.0) || !std::isfinite(r)) throw std::domain_error("rate floors must be >= 0");
    }
    const Normalized n(s, order);

    SolveReport report;
    for (std::size_t u = 0; u < k; ++u) {
        if (u == target) continue;
        const double rmax = s.max_single_user_rate(u);
        if (floors[u] > rmax * (1.0 + 1e-12)) {
            report.status = SolveStatus::Infeasible;
            report.certificate = rmax - floors[u];
            report.p_star.assign(k, 0.0);
            report.message = "rate floor of user " + std::to_string(u + 1) +
                             " exceeds its single-link maximum";
            return report;
        }
        if (k == 2 && floors[u] > 0.0 && floors[u] >= rmax * (1.0 - 1e-12)) {
            return two_user_endpoint(target, n);
        }
    }

    ConcaveProblem pr;
    pr.lower = n.lower();
    pr.upper = n.upper();
    for (std::size_t u = 0; u < k; ++u) {
        if (u != target && floors[u] > 0.0) {
            pr.constraints.push_back(n.slack_fn(order.position_of(u), floors[u]));
        }
    }

    const std::size_t tpos = order.position_of(target);
    const auto ti = static_cast<Eigen::Index>(target);
    const double gt = n.g[target];
    const SmoothFunction den = n.denominator_fn(tpos, false);
    auto numerator = [ti, gt](const Eigen::VectorXd& p) { return p[ti] * gt; };

    // Feasible anchor, also the certificate source.
    pr.objective = linear_function(Eigen::VectorXd::Zero(static_cast<Eigen::Index>(k)));
    const BarrierSettings bs = cfg.barrier(true);
    const FeasibilityResult feas = find_strictly_feasible(pr, bs, 0.5 * pr.upper);
    report.certificate = feas.max_min_slack;
    if (!feas.strictly_feasible) {
        report.status = SolveStatus::Infeasible;
        report.p_star = detail::to_std(feas.x);
        report.message = "rate floors are jointly infeasible";
        return report;
    }
    const Eigen::VectorXd anchor = feas.x;

    double gamma = 0.0;
    Eigen::VectorXd best = anchor;
    bool have_best = false;
    bool inner_ok = true;
    for (int it = 0; it < cfg.max_outer_iters; ++it) {
        const auto gm = gamma;
        pr.objective.value = [numerator, den, gm](const Eigen::VectorXd& p) {
            return numerator(p) - gm * den.value(p);
        };
        pr.objective.gradient = [den, gm, ti, gt](const Eigen::VectorXd& p) {
            Eigen::VectorXd grad = -gm * den.gradient(p);
            grad[ti] += gt;
            return grad;
        };
        pr.objective.hessian = [den, gm](const Eigen::VectorXd& p) -> Eigen::MatrixXd {
            return -gm * den.hessian(p);
        };

        const Eigen::VectorXd start = have_best ? Eigen::VectorXd(0.5 * (best + anchor)) : anchor;
        const ConcaveSolution sol = solve_concave_subproblem(pr, bs, start);
        if (sol.status == SolveStatus::Infeasible) {
            report.status = SolveStatus::Infeasible;
            report.certificate = sol.max_min_slack;
            report.p_star = detail::to_std(sol.x);
            report.message = "inner problem infeasible";
            return report;
        }
        inner_ok = inner_ok && sol.status == SolveStatus::Optimal;

        Eigen::VectorXd x = sol.x;
        double f = numerator(x) - gamma * den.value(x);
        if (have_best) {
            const double f_prev = numerator(best) - gamma * den.value(best);
            if (f_prev > f) {
                x = best;
                f = f_prev;
            }
        }
        best = x;
        have_best = true;
        report.iterations = it + 1;
        report.f_trace.push_back(f);
        const double next = numerator(x) / den.value(x);
        gamma = std::max(gamma, next);
        report.trace.push_back(gamma);
        if (std::abs(f) <= cfg.epsilon) {
            report.converged = true;
            break;
        }
    }

    report.p_star = detail::to_std(best);
    detail::clamp_to_caps(report.p_star, n);
    report.objective = user_rate(tpos, order, report.p_star, s);
    report.status = report.converged && inner_ok ? SolveStatus::Optimal : SolveStatus::NotConverged;
    if (!report.converged) report.message = "outer iteration limit reached";
    else if (!inner_ok) report.message = "inner solver did not reach its tolerance";
    return report;
}

SolveReport dinkelbach_rate_profile(double tau, const DecodingOrder& order, const Scenario& s,
                                    const SolverSettings& cfg) {
    if (s.size() != 2) throw std::invalid_argument("rate profile requires two users");
    if (!(tau >= 0.0)) throw std::domain_error("tau must be >= 0");
    const double floors[2] = {0.0, tau};
    return maximize_user_rate(0, floors, order, s, cfg);
}

}  // namespace noma::solvers
