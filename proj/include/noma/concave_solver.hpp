#pragma once

#include <Eigen/Dense>

#include <functional>
#include <optional>
#include <vector>

namespace noma::solvers {

/// A twice-differentiable function of the decision vector. Used both for
/// concave objectives and for concave "c(x) >= 0" constraints.
struct SmoothFunction {
    std::function<double(const Eigen::VectorXd&)> value;
    std::function<Eigen::VectorXd(const Eigen::VectorXd&)> gradient;
    std::function<Eigen::MatrixXd(const Eigen::VectorXd&)> hessian;
};

/// maximize f(x) s.t. c_k(x) >= 0, lower <= x <= upper; f and c_k concave.
struct ConcaveProblem {
    SmoothFunction objective;
    std::vector<SmoothFunction> constraints;
    Eigen::VectorXd lower;
    Eigen::VectorXd upper;
};

enum class SolveStatus { Optimal, Infeasible, NotConverged };

const char* to_string(SolveStatus s);

struct BarrierSettings {
    double inner_tol = 1e-8;     ///< target duality gap m/t
    double barrier_mu = 10.0;    ///< t <- mu * t between centering stages
    double initial_t = 1.0;
    int max_newton_per_stage = 200;
    int max_stages = 60;
    /// Shrink coordinates toward `lower` while the objective stays within a
    /// relative 1e-13 of the optimum (elementwise-smallest tie-breaking).
    bool tie_break_smallest = false;
};

struct ConcaveSolution {
    SolveStatus status = SolveStatus::NotConverged;
    Eigen::VectorXd x;
    double objective = 0.0;
    double duality_gap = 0.0;   ///< m / t at exit
    double kkt_residual = 0.0;  ///< Lagrangian gradient norm with barrier multiplier estimates
    int newton_steps = 0;
    int gradient_fallbacks = 0;
    /// Best min_k c_k(x) seen by the feasibility phase; +inf without
    /// constraints. For Infeasible results it is negative and the true
    /// maximum over the box is proven to be below zero.
    double max_min_slack = 0.0;
};

struct FeasibilityResult {
    bool strictly_feasible = false;
    Eigen::VectorXd x;
    double max_min_slack = 0.0;
};

/// Feasibility phase: maximizes min_k c_k(x) over the box, stopping early
/// once a point with every c_k(x) > 0 is found.
FeasibilityResult find_strictly_feasible(const ConcaveProblem& problem,
                                         const BarrierSettings& settings,
                                         const std::optional<Eigen::VectorXd>& start = {});

/// Log-barrier interior method with damped Newton centering; gradient ascent
/// with backtracking replaces Newton whenever the barrier Hessian is not
/// negative definite. `start`, if strictly feasible, skips the feasibility phase.
ConcaveSolution solve_concave_subproblem(const ConcaveProblem& problem,
                                         const BarrierSettings& settings,
                                         const std::optional<Eigen::VectorXd>& start = {});

/// Helpers for building problems.
SmoothFunction linear_function(Eigen::VectorXd coefficients, double constant = 0.0);

}  // namespace noma::solvers
