#include "noma/concave_solver.hpp"

#include <Eigen/Cholesky>

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace noma::solvers {

const char* to_string(SolveStatus s) {
    switch (s) {
        case SolveStatus::Optimal: return "optimal";
        case SolveStatus::Infeasible: return "infeasible";
        case SolveStatus::NotConverged: return "not_converged";
    }
    return "unknown";
}

SmoothFunction linear_function(Eigen::VectorXd coefficients, double constant) {
    const auto n = coefficients.size();
    SmoothFunction f;
    f.value = [coefficients, constant](const Eigen::VectorXd& x) {
        return coefficients.dot(x) + constant;
    };
    f.gradient = [coefficients](const Eigen::VectorXd&) { return coefficients; };
    f.hessian = [n](const Eigen::VectorXd&) { return Eigen::MatrixXd::Zero(n, n); };
    return f;
}

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// Value, gradient and Hessian of a barrier function; `inside` is false when
// the point leaves the barrier domain.
struct Eval {
    bool inside = false;
    double value = kNegInf;
    Eigen::VectorXd grad;
    Eigen::MatrixXd hess;
};

using Evaluator = std::function<Eval(const Eigen::VectorXd&, bool derivatives)>;

struct CenterStats {
    int steps = 0;
    int fallbacks = 0;
    Eigen::VectorXd grad;
};

// Damped Newton ascent on a concave barrier function.
CenterStats center(const Evaluator& phi, Eigen::VectorXd& x, int max_steps) {
    CenterStats stats;
    int stalls = 0;
    for (int it = 0; it < max_steps; ++it) {
        Eval e = phi(x, true);
        stats.grad = e.grad;
        Eigen::VectorXd d;
        Eigen::LLT<Eigen::MatrixXd> llt(-e.hess);
        bool newton = llt.info() == Eigen::Success;
        if (newton) {
            d = llt.solve(e.grad);
            newton = d.allFinite() && e.grad.dot(d) >= 0.0;
        }
        if (!newton) {
            d = e.grad;
            ++stats.fallbacks;
        }
        const double dec = e.grad.dot(d);
        if (newton && 0.5 * dec <= 1e-11) break;
        if (!(dec > 0.0)) break;

        double s = 1.0;
        bool accepted = false;
        for (int ls = 0; ls < 200; ++ls, s *= 0.5) {
            Eigen::VectorXd xn = x + s * d;
            Eval en = phi(xn, false);
            if (en.inside && en.value >= e.value + 0.25 * s * dec) {
                const bool tiny = std::abs(en.value - e.value) <=
                                  1e-15 * std::max(1.0, std::abs(e.value));
                x = std::move(xn);
                accepted = true;
                stalls = tiny ? stalls + 1 : 0;
                break;
            }
        }
        ++stats.steps;
        // No ascent possible at machine precision: treat as centered.
        if (!accepted || stalls >= 3) break;
    }
    return stats;
}

bool strictly_inside_box(const ConcaveProblem& pr, const Eigen::VectorXd& x) {
    return ((x - pr.lower).array() > 0.0).all() && ((pr.upper - x).array() > 0.0).all();
}

double min_constraint(const ConcaveProblem& pr, const Eigen::VectorXd& x) {
    double m = std::numeric_limits<double>::infinity();
    for (const auto& c : pr.constraints) m = std::min(m, c.value(x));
    return m;
}

void add_box_terms(const ConcaveProblem& pr, const Eigen::VectorXd& x, Eval& e,
                   bool derivatives, Eigen::Index offset = 0) {
    const auto n = pr.lower.size();
    for (Eigen::Index i = 0; i < n; ++i) {
        const double lo = x[i] - pr.lower[i];
        const double hi = pr.upper[i] - x[i];
        e.value += std::log(lo) + std::log(hi);
        if (derivatives) {
            e.grad[offset + i] += 1.0 / lo - 1.0 / hi;
            e.hess(offset + i, offset + i) -= 1.0 / (lo * lo) + 1.0 / (hi * hi);
        }
    }
}

void validate(const ConcaveProblem& pr) {
    const auto n = pr.lower.size();
    if (n == 0 || pr.upper.size() != n) throw std::invalid_argument("concave solver: bad box");
    if (!((pr.upper - pr.lower).array() > 0.0).all()) {
        throw std::invalid_argument("concave solver: box must satisfy lower < upper");
    }
    if (!pr.objective.value || !pr.objective.gradient || !pr.objective.hessian) {
        throw std::invalid_argument("concave solver: objective incomplete");
    }
}

}  // namespace

FeasibilityResult find_strictly_feasible(const ConcaveProblem& pr, const BarrierSettings& cfg,
                                         const std::optional<Eigen::VectorXd>& start) {
    validate(pr);
    const auto n = pr.lower.size();
    Eigen::VectorXd x0 = 0.5 * (pr.lower + pr.upper);
    if (start && start->size() == n && strictly_inside_box(pr, *start)) x0 = *start;

    FeasibilityResult out;
    if (pr.constraints.empty()) {
        out.strictly_feasible = true;
        out.x = x0;
        out.max_min_slack = std::numeric_limits<double>::infinity();
        return out;
    }
    double c0 = min_constraint(pr, x0);
    if (c0 > 0.0) {
        out.strictly_feasible = true;
        out.x = x0;
        out.max_min_slack = c0;
        return out;
    }

    // Variables z = (x, s): maximize s subject to c_k(x) > s.
    const auto m = static_cast<double>(pr.constraints.size() + 2 * static_cast<std::size_t>(n));
    double t = cfg.initial_t;
    Evaluator phi = [&](const Eigen::VectorXd& z, bool deriv) {
        Eval e;
        const Eigen::VectorXd x = z.head(n);
        const double s = z[n];
        if (!strictly_inside_box(pr, x)) return e;
        if (deriv) {
            e.grad = Eigen::VectorXd::Zero(n + 1);
            e.hess = Eigen::MatrixXd::Zero(n + 1, n + 1);
            e.grad[n] = t;
        }
        e.value = t * s;
        for (const auto& c : pr.constraints) {
            const double r = c.value(x) - s;
            if (!(r > 0.0)) {
                e.value = kNegInf;
                return e;
            }
            e.value += std::log(r);
            if (deriv) {
                Eigen::VectorXd gz(n + 1);
                gz.head(n) = c.gradient(x);
                gz[n] = -1.0;
                e.grad += gz / r;
                e.hess.topLeftCorner(n, n) += c.hessian(x) / r;
                e.hess -= gz * gz.transpose() / (r * r);
            }
        }
        add_box_terms(pr, x, e, deriv);
        e.inside = std::isfinite(e.value);
        return e;
    };

    Eigen::VectorXd z(n + 1);
    z.head(n) = x0;
    z[n] = c0 - (1.0 + 0.1 * std::abs(c0));
    double scale = std::max(1.0, std::abs(c0));
    for (int stage = 0; stage < cfg.max_stages; ++stage) {
        center(phi, z, cfg.max_newton_per_stage);
        const Eigen::VectorXd x = z.head(n);
        const double achieved = min_constraint(pr, x);
        out.x = x;
        out.max_min_slack = achieved;
        if (achieved > 0.0) {
            out.strictly_feasible = true;
            return out;
        }
        // Centered points bound the optimum: s* <= s + m / t.
        if (achieved + m / t < 0.0) return out;
        if (m / t < 1e-14 * scale) return out;
        t *= cfg.barrier_mu;
    }
    return out;
}

ConcaveSolution solve_concave_subproblem(const ConcaveProblem& pr, const BarrierSettings& cfg,
                                         const std::optional<Eigen::VectorXd>& start) {
    validate(pr);
    if (!(cfg.inner_tol > 0.0) || !(cfg.barrier_mu > 1.0) || !(cfg.initial_t > 0.0)) {
        throw std::invalid_argument("concave solver: bad barrier settings");
    }
    const auto n = pr.lower.size();
    ConcaveSolution sol;

    Eigen::VectorXd x;
    if (start && start->size() == n && strictly_inside_box(pr, *start) &&
        min_constraint(pr, *start) > 0.0) {
        x = *start;
        sol.max_min_slack = min_constraint(pr, x);
    } else {
        FeasibilityResult feas = find_strictly_feasible(pr, cfg, start);
        sol.max_min_slack = feas.max_min_slack;
        if (!feas.strictly_feasible) {
            sol.status = SolveStatus::Infeasible;
            sol.x = feas.x;
            sol.objective = pr.objective.value(feas.x);
            return sol;
        }
        x = feas.x;
    }

    const double m = static_cast<double>(pr.constraints.size() + 2 * static_cast<std::size_t>(n));
    double t = cfg.initial_t;
    Evaluator phi = [&](const Eigen::VectorXd& p, bool deriv) {
        Eval e;
        if (!strictly_inside_box(pr, p)) return e;
        if (deriv) {
            e.grad = t * pr.objective.gradient(p);
            e.hess = t * pr.objective.hessian(p);
        }
        e.value = t * pr.objective.value(p);
        for (const auto& c : pr.constraints) {
            const double r = c.value(p);
            if (!(r > 0.0)) {
                e.value = kNegInf;
                return e;
            }
            e.value += std::log(r);
            if (deriv) {
                const Eigen::VectorXd g = c.gradient(p);
                e.grad += g / r;
                e.hess += c.hessian(p) / r - g * g.transpose() / (r * r);
            }
        }
        add_box_terms(pr, p, e, deriv);
        e.inside = std::isfinite(e.value);
        return e;
    };

    bool done = false;
    Eigen::VectorXd last_grad = Eigen::VectorXd::Zero(n);
    for (int stage = 0; stage < cfg.max_stages; ++stage) {
        CenterStats st = center(phi, x, cfg.max_newton_per_stage);
        sol.newton_steps += st.steps;
        sol.gradient_fallbacks += st.fallbacks;
        if (st.grad.size() == n) last_grad = st.grad / t;
        if (m / t <= cfg.inner_tol) {
            done = true;
            break;
        }
        t *= cfg.barrier_mu;
    }

    sol.duality_gap = m / t;
    sol.kkt_residual = last_grad.norm();
    sol.status = done ? SolveStatus::Optimal : SolveStatus::NotConverged;

    if (cfg.tie_break_smallest) {
        const double f_star = pr.objective.value(x);
        const double slack = 1e-13 * (1.0 + std::abs(f_star));
        auto acceptable = [&](const Eigen::VectorXd& p) {
            if (!(pr.objective.value(p) >= f_star - slack)) return false;
            for (const auto& c : pr.constraints) {
                if (!(c.value(p) >= 0.0)) return false;
            }
            return true;
        };
        for (Eigen::Index k = 0; k < n; ++k) {
            Eigen::VectorXd trial = x;
            trial[k] = pr.lower[k];
            if (acceptable(trial)) {
                x = trial;
                continue;
            }
            double lo = pr.lower[k];
            double hi = x[k];
            for (int it = 0; it < 100 && hi - lo > 1e-15 * std::max(1.0, std::abs(hi)); ++it) {
                trial[k] = 0.5 * (lo + hi);
                if (acceptable(trial)) {
                    hi = trial[k];
                } else {
                    lo = trial[k];
                }
            }
            x[k] = hi;
        }
    }

    sol.x = x;
    sol.objective = pr.objective.value(x);
    return sol;
}

}  // namespace noma::solvers
