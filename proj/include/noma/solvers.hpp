#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "noma/concave_solver.hpp"
#include "noma/noma_rates.hpp"

namespace noma::solvers {

struct SolverSettings {
    double epsilon = 1e-4;        ///< outer stopping threshold
    int max_outer_iters = 100;
    double inner_tol = 1e-8;      ///< barrier duality gap
    double barrier_mu = 10.0;
    int tau_grid = 200;
    double subgradient_c = 1.0;
    std::uint64_t seed = 0;

    /// Throws std::invalid_argument naming the offending field.
    void validate() const;
    BarrierSettings barrier(bool tie_break = false) const;
};

struct SolveReport {
    SolveStatus status = SolveStatus::NotConverged;
    PowerAllocation p_star;           ///< watts, indexed by user
    double objective = 0.0;           ///< bits/s/Hz
    int iterations = 0;
    bool converged = false;
    /// Per outer iteration: the Dinkelbach ratio (rate-profile, sum rate)
    /// or the F_q value (weighted sum rate).
    std::vector<double> trace;
    /// Dinkelbach F values per outer iteration (empty for other solvers).
    std::vector<double> f_trace;
    /// Max-min constraint slack from the feasibility phase (normalized units);
    /// negative when reporting Infeasible.
    double certificate = 0.0;
    /// Weighted sum rate only: change of (gamma, y) after one more alternating
    /// round at the returned point, relative to the largest entry of each.
    double fixed_point_residual = 0.0;
    std::string message;
};

/// Maximize the rate of `target` subject to rate floors on the other users
/// (floors[target] is ignored). Single-ratio Dinkelbach with a barrier inner solver.
SolveReport maximize_user_rate(std::size_t target, std::span<const double> floors,
                               const DecodingOrder& order, const Scenario& s,
                               const SolverSettings& cfg);

/// Two-user rate profile: maximize R_1 subject to R_2 >= tau.
SolveReport dinkelbach_rate_profile(double tau, const DecodingOrder& order, const Scenario& s,
                                    const SolverSettings& cfg);

/// Weighted sum rate with rate floors, via the Lagrangian dual and quadratic
/// transforms. Stops when the change in F_q falls below cfg.epsilon.
SolveReport wsr_maximize(std::span<const double> weights, std::span<const double> floors,
                         const DecodingOrder& order, const Scenario& s,
                         const SolverSettings& cfg);

/// Sum rate with rate floors: Dinkelbach on the sum SINR with closed-form
/// per-user powers and dual multiplier updates. Floors refer to `order`.
SolveReport sum_rate_maximize(std::span<const double> floors, const Scenario& s,
                              const SolverSettings& cfg,
                              const std::optional<DecodingOrder>& order = {});

/// Euclidean projection of p_prime onto {p : R_k >= r_k, 0 <= p_k <= p_hat_k}.
SolveReport project_feasible(std::span<const double> p_prime, std::span<const double> floors,
                             const DecodingOrder& order, const Scenario& s,
                             const SolverSettings& cfg);

/// Quadratic-transform objective in nats, exposed for gradient checks.
/// gamma and y are indexed by decoding position.
struct QuadraticTransformPoint {
    std::vector<double> gamma;
    std::vector<double> y;
};
/// Values of gamma and y from their closed-form updates at p.
QuadraticTransformPoint quadratic_transform_update(std::span<const double> weights,
                                                   const DecodingOrder& order,
                                                   std::span<const double> p, const Scenario& s);
double fq_value(std::span<const double> weights, const DecodingOrder& order,
                const QuadraticTransformPoint& aux, std::span<const double> p, const Scenario& s);
std::vector<double> fq_gradient(std::span<const double> weights, const DecodingOrder& order,
                                const QuadraticTransformPoint& aux, std::span<const double> p,
                                const Scenario& s);

/// Exhaustive grid search over [0, p_hat_k]^K, K <= 3.
enum class OracleKind { SumRate, WeightedSumRate, RateProfile };

struct OracleObjective {
    OracleKind kind = OracleKind::SumRate;
    std::vector<double> weights;   ///< WeightedSumRate
    std::vector<double> floors;    ///< optional rate floors (all kinds)
    std::optional<DecodingOrder> order;
    std::size_t target = 0;        ///< RateProfile: user whose rate is maximized

    static OracleObjective sum_rate();
    static OracleObjective weighted(std::vector<double> weights, std::vector<double> floors,
                                    DecodingOrder order);
    /// Two-user profile: maximize R_1 subject to R_2 >= tau.
    static OracleObjective rate_profile(double tau, DecodingOrder order);
};

struct OracleResult {
    PowerAllocation p;
    double objective = 0.0;       ///< -inf when no grid point is feasible
    std::vector<double> step;     ///< grid spacing per axis, watts
    std::size_t feasible_points = 0;
};

OracleResult grid_oracle(const Scenario& s, const OracleObjective& objective,
                         std::size_t resolution, bool parallel = true);

}  // namespace noma::solvers
