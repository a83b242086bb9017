#include <cmath>
#include <stdexcept>

#include "noma/solvers.hpp"
#include "solver_common.hpp"

namespace noma::solvers {

SolveReport project_feasible(std::span<const double> p_prime, std::span<const double> floors,
                             const DecodingOrder& order, const Scenario& s,
                             const SolverSettings& cfg) {
    cfg.validate();
    detail::require_solver_models(s);
    const std::size_t k = s.size();
    validate_allocation(p_prime, s);
    if (floors.size() != k) throw std::invalid_argument("rate floors size mismatch");
    const detail::Normalized n(s, order);

    SolveReport report;
    bool inside = true;
    for (std::size_t u = 0; u < k; ++u) inside = inside && p_prime[u] <= n.cap[u];
    if (inside && detail::floor_violation(floors, order, p_prime, s) <= 0.0) {
        report.status = SolveStatus::Optimal;
        report.converged = true;
        report.p_star.assign(p_prime.begin(), p_prime.end());
        report.objective = 0.0;
        return report;
    }

    ConcaveProblem pr;
    pr.lower = n.lower();
    pr.upper = n.upper();
    for (std::size_t pos = 0; pos < k; ++pos) {
        const std::size_t u = order.user_at(pos);
        if (floors[u] > 0.0) pr.constraints.push_back(n.slack_fn(pos, floors[u]));
    }
    const Eigen::VectorXd target = detail::to_eigen(p_prime);
    const auto dim = static_cast<Eigen::Index>(k);
    pr.objective.value = [target](const Eigen::VectorXd& p) { return -(p - target).squaredNorm(); };
    pr.objective.gradient = [target](const Eigen::VectorXd& p) {
        return Eigen::VectorXd(-2.0 * (p - target));
    };
    pr.objective.hessian = [dim](const Eigen::VectorXd&) {
        return Eigen::MatrixXd(-2.0 * Eigen::MatrixXd::Identity(dim, dim));
    };

    // Tight gap: distances here are in watts, not rates.
    BarrierSettings bs = cfg.barrier();
    bs.inner_tol = std::min(cfg.inner_tol, 1e-14 * (1.0 + pr.upper.squaredNorm()));
    const ConcaveSolution sol = solve_concave_subproblem(pr, bs, Eigen::VectorXd(0.5 * pr.upper));
    report.certificate = sol.max_min_slack;
    report.iterations = sol.newton_steps;
    report.p_star = detail::to_std(sol.x);
    detail::clamp_to_caps(report.p_star, n);
    report.objective = std::sqrt(-sol.objective);
    report.status = sol.status;
    report.converged = sol.status == SolveStatus::Optimal;
    if (sol.status == SolveStatus::Infeasible) report.message = "feasible set is empty";
    return report;
}

}  // namespace noma::solvers
