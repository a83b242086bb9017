#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "noma/solvers.hpp"
#include "solver_common.hpp"

namespace noma::solvers {

using detail::Normalized;

namespace {

void check_weights(std::span<const double> w, std::size_t k) {
    if (w.size() != k) throw std::invalid_argument("weights size mismatch");
    for (double v : w) {
        if (!(v > 0.0) || !std::isfinite(v)) throw std::domain_error("weights must be > 0");
    }
    const double total = std::accumulate(w.begin(), w.end(), 0.0);
    if (std::abs(total - 1.0) > 1e-9) throw std::domain_error("weights must sum to 1");
}

QuadraticTransformPoint update_aux(const Normalized& n, std::span<const double> w,
                                   const Eigen::VectorXd& p) {
    QuadraticTransformPoint aux{std::vector<double>(n.k), std::vector<double>(n.k)};
    for (std::size_t j = 0; j < n.k; ++j) {
        const std::size_t u = n.order.user_at(j);
        const double sig = p[static_cast<Eigen::Index>(u)] * n.g[u];
        aux.gamma[j] = sig / n.denominator(j, p, false);
        aux.y[j] = std::sqrt(w[u] * (aux.gamma[j] + 1.0) * sig) / n.denominator(j, p, true);
    }
    return aux;
}

double fq(const Normalized& n, std::span<const double> w, const QuadraticTransformPoint& aux,
          const Eigen::VectorXd& p) {
    double total = 0.0;
    for (std::size_t j = 0; j < n.k; ++j) {
        const std::size_t u = n.order.user_at(j);
        const double gam = aux.gamma[j];
        const double coef = w[u] * (gam + 1.0) * n.g[u];
        total += w[u] * std::log1p(gam) - w[u] * gam;
        total += 2.0 * aux.y[j] * std::sqrt(coef * p[static_cast<Eigen::Index>(u)]) -
                 aux.y[j] * aux.y[j] * n.denominator(j, p, true);
    }
    return total;
}

Eigen::VectorXd fq_grad(const Normalized& n, std::span<const double> w,
                        const QuadraticTransformPoint& aux, const Eigen::VectorXd& p) {
    Eigen::VectorXd grad = Eigen::VectorXd::Zero(p.size());
    double y2_total = 0.0;
    for (std::size_t j = 0; j < n.k; ++j) {
        const std::size_t u = n.order.user_at(j);
        const auto i = static_cast<Eigen::Index>(u);
        const double coef = w[u] * (aux.gamma[j] + 1.0) * n.g[u];
        grad[i] += aux.y[j] * std::sqrt(coef / p[i]);
        const double y2 = aux.y[j] * aux.y[j];
        y2_total += y2;
        // Signals of users decoded at positions >= j.
        for (std::size_t l = j; l < n.k; ++l) {
            const std::size_t v = n.order.user_at(l);
            grad[static_cast<Eigen::Index>(v)] -= y2 * n.g[v];
        }
    }
    for (std::size_t u = 0; u < n.k; ++u) {
        const auto i = static_cast<Eigen::Index>(u);
        grad[i] -= y2_total * n.distortion_d1(u, p[i]);
    }
    return grad;
}

Eigen::MatrixXd fq_hess(const Normalized& n, std::span<const double> w,
                        const QuadraticTransformPoint& aux, const Eigen::VectorXd& p) {
    Eigen::MatrixXd h = Eigen::MatrixXd::Zero(p.size(), p.size());
    double y2_total = 0.0;
    for (std::size_t j = 0; j < n.k; ++j) {
        const std::size_t u = n.order.user_at(j);
        const auto i = static_cast<Eigen::Index>(u);
        const double coef = w[u] * (aux.gamma[j] + 1.0) * n.g[u];
        h(i, i) -= 0.5 * aux.y[j] * std::sqrt(coef) * std::pow(p[i], -1.5);
        y2_total += aux.y[j] * aux.y[j];
    }
    for (std::size_t u = 0; u < n.k; ++u) {
        const auto i = static_cast<Eigen::Index>(u);
        h(i, i) -= y2_total * n.distortion_d2(u, p[i]);
    }
    return h;
}

// Change relative to the largest entry, so users driven to zero power do not
// dominate through their vanishing gamma and y.
double max_relative_change(const std::vector<double>& a, const std::vector<double>& b) {
    double diff = 0.0, scale = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        diff = std::max(diff, std::abs(a[i] - b[i]));
        scale = std::max(scale, std::abs(a[i]));
    }
    return scale > 0.0 ? diff / scale : diff;
}

}  // namespace

QuadraticTransformPoint quadratic_transform_update(std::span<const double> weights,
                                                   const DecodingOrder& order,
                                                   std::span<const double> p, const Scenario& s) {
    check_weights(weights, s.size());
    validate_allocation(p, s);
    return update_aux(Normalized(s, order), weights, detail::to_eigen(p));
}

double fq_value(std::span<const double> weights, const DecodingOrder& order,
                const QuadraticTransformPoint& aux, std::span<const double> p, const Scenario& s) {
    check_weights(weights, s.size());
    validate_allocation(p, s);
    return fq(Normalized(s, order), weights, aux, detail::to_eigen(p));
}

std::vector<double> fq_gradient(std::span<const double> weights, const DecodingOrder& order,
                                const QuadraticTransformPoint& aux, std::span<const double> p,
                                const Scenario& s) {
    check_weights(weights, s.size());
    validate_allocation(p, s);
    return detail::to_std(fq_grad(Normalized(s, order), weights, aux, detail::to_eigen(p)));
}

SolveReport wsr_maximize(std::span<const double> weights, std::span<const double> floors,
                         const DecodingOrder& order, const Scenario& s,
                         const SolverSettings& cfg) {
    cfg.validate();
    detail::require_solver_models(s);
    const std::size_t k = s.size();
    check_weights(weights, k);
    if (floors.size() != k) throw std::invalid_argument("rate floors size mismatch");
    for (double r : floors) {
        if (!(r >= 0.0) || !std::isfinite(r)) throw std::domain_error("rate floors must be >= 0");
    }
    const Normalized n(s, order);
    const std::vector<double> w(weights.begin(), weights.end());

    SolveReport report;
    for (std::size_t u = 0; u < k; ++u) {
        const double rmax = s.max_single_user_rate(u);
        if (floors[u] > rmax) {
            report.status = SolveStatus::Infeasible;
            report.certificate = rmax - floors[u];
            report.p_star.assign(k, 0.0);
            report.message = "rate floor of user " + std::to_string(u + 1) +
                             " exceeds its single-link maximum";
            return report;
        }
    }

    ConcaveProblem pr;
    pr.lower = n.lower();
    pr.upper = n.upper();
    for (std::size_t pos = 0; pos < k; ++pos) {
        const std::size_t u = order.user_at(pos);
        if (floors[u] > 0.0) pr.constraints.push_back(n.slack_fn(pos, floors[u]));
    }
    pr.objective = linear_function(Eigen::VectorXd::Zero(static_cast<Eigen::Index>(k)));
    const BarrierSettings bs = cfg.barrier();
    const FeasibilityResult feas = find_strictly_feasible(pr, bs, 0.5 * pr.upper);
    report.certificate = feas.max_min_slack;
    if (!feas.strictly_feasible) {
        report.status = SolveStatus::Infeasible;
        report.p_star = detail::to_std(feas.x);
        report.message = "rate floors are jointly infeasible";
        return report;
    }
    const Eigen::VectorXd anchor = feas.x;

    QuadraticTransformPoint aux;
    auto set_objective = [&] {
        const QuadraticTransformPoint fixed = aux;
        pr.objective.value = [&n, w, fixed](const Eigen::VectorXd& p) { return fq(n, w, fixed, p); };
        pr.objective.gradient = [&n, w, fixed](const Eigen::VectorXd& p) {
            return fq_grad(n, w, fixed, p);
        };
        pr.objective.hessian = [&n, w, fixed](const Eigen::VectorXd& p) {
            return fq_hess(n, w, fixed, p);
        };
    };
    bool inner_ok = true;
    Eigen::VectorXd p = anchor;
    auto p_step = [&]() -> Eigen::VectorXd {
        set_objective();
        const ConcaveSolution sol =
            solve_concave_subproblem(pr, bs, Eigen::VectorXd(0.5 * (p + anchor)));
        inner_ok = inner_ok && sol.status == SolveStatus::Optimal;
        if (sol.status == SolveStatus::Infeasible) return p;
        // Block ascent never accepts a worse point.
        return pr.objective.value(sol.x) >= pr.objective.value(p) ? sol.x : p;
    };

    // One alternating round: (gamma, y) from p, then the p-step.
    auto round = [&](const Eigen::VectorXd& from) {
        p = from;
        aux = update_aux(n, w, p);
        return p_step();
    };
    auto strictly_feasible = [&](const Eigen::VectorXd& x) {
        if (!((x.array() > pr.lower.array()).all() && (x.array() < pr.upper.array()).all())) {
            return false;
        }
        for (const auto& c : pr.constraints) {
            if (!(c.value(x) > 0.0)) return false;
        }
        return true;
    };
    // At aux = update_aux(p), F_q equals the weighted sum rate in nats.
    auto objective_at = [&](const Eigen::VectorXd& x) { return fq(n, w, update_aux(n, w, x), x); };

    double prev = objective_at(p);
    for (int it = 0; it < cfg.max_outer_iters; ++it) {
        // Squared extrapolation over two rounds, falling back to the plain
        // rounds whenever it would leave the feasible set or lose ascent.
        const Eigen::VectorXd p0 = p;
        const Eigen::VectorXd p1 = round(p0);
        const Eigen::VectorXd p2 = round(p1);
        const Eigen::VectorXd r = p1 - p0;
        const Eigen::VectorXd v = p2 - p1 - r;
        Eigen::VectorXd next = p2;
        if (v.norm() > 1e-14 * (1.0 + p0.norm())) {
            double step = std::min(-1.0, -r.norm() / v.norm());
            Eigen::VectorXd jump = p0 - 2.0 * step * r + step * step * v;
            while (!strictly_feasible(jump) && step < -1.0) {
                step = std::min(-1.0, 0.5 * (step - 1.0));
                jump = p0 - 2.0 * step * r + step * step * v;
            }
            if (step < -1.0) {
                const Eigen::VectorXd candidate = round(jump);
                if (objective_at(candidate) >= objective_at(p2)) next = candidate;
            }
        }
        p = next;
        aux = update_aux(n, w, p);
        const double value = fq(n, w, aux, p);
        report.trace.push_back(value);
        report.iterations = it + 1;
        if (std::abs(value - prev) < cfg.epsilon) {
            report.converged = true;
            break;
        }
        prev = value;
    }

    {
        const Eigen::VectorXd p_saved = p;
        const QuadraticTransformPoint aux_saved = aux;
        p = p_step();
        const QuadraticTransformPoint next = update_aux(n, w, p);
        report.fixed_point_residual = std::max(max_relative_change(aux_saved.gamma, next.gamma),
                                               max_relative_change(aux_saved.y, next.y));
        p = p_saved;
        aux = aux_saved;
    }

    report.p_star = detail::to_std(p);
    detail::clamp_to_caps(report.p_star, n);
    report.objective = weighted_sum_rate(weights, order, report.p_star, s);
    report.status = report.converged && inner_ok ? SolveStatus::Optimal : SolveStatus::NotConverged;
    if (!report.converged) report.message = "outer iteration limit reached";
    else if (!inner_ok) report.message = "inner solver did not reach its tolerance";
    return report;
}

}  // namespace noma::solvers
