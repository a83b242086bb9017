#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "noma/noma_rates.hpp"
#include "noma/solvers.hpp"

namespace noma::region {

/// An achievable rate tuple. Ordinary points carry the powers and decoding
/// order that achieve them; time-sharing points carry two parents and the
/// fraction of time spent on the first one.
struct RatePoint {
    std::vector<double> rates;     ///< bits/s/Hz, indexed by user
    PowerAllocation powers;
    std::optional<DecodingOrder> order;
    std::vector<RatePoint> parents;
    double mix = 1.0;
    /// False for infeasible sentinels; their rates are -infinity.
    bool valid = true;
    double tau = 0.0;              ///< rate-profile target that produced the point

    bool is_time_share() const { return parents.size() == 2; }
};

/// Evaluates `order` at `p`.
RatePoint make_point(const DecodingOrder& order, std::span<const double> p, const Scenario& s);
/// mix * a + (1 - mix) * b.
RatePoint time_share(const RatePoint& a, const RatePoint& b, double mix);
/// Recomputes the rates from powers/order (or parents) and compares.
bool is_achievable(const RatePoint& pt, const Scenario& s, double tol = 1e-9);

struct RegionBoundary {
    std::vector<RatePoint> points;   ///< raw traces, first order then second
    std::vector<RatePoint> hull;     ///< upper-right frontier, R_1 increasing
    std::pair<RatePoint, RatePoint> corners;
    double sum_rate_max = 0.0;       ///< b*
};

/// Rate-profile trace of maximize R_1 s.t. R_2 >= tau over cfg.tau_grid
/// equally spaced tau in [0, R_2^max], endpoints included. Failed solves
/// become invalid points; the trace continues.
std::vector<RatePoint> trace_boundary_2user(const DecodingOrder& order, const Scenario& s,
                                            const solvers::SolverSettings& cfg,
                                            bool parallel = true);

/// Sum-rate corners: the sum-rate optimum evaluated under 2->1 (B) and 1->2 (C).
std::pair<RatePoint, RatePoint> sum_rate_corner_points(const Scenario& s,
                                                       const solvers::SolverSettings& cfg);

/// Both orders traced, hulled, with the sum-rate corners inserted.
RegionBoundary capacity_region_2user(const Scenario& s, const solvers::SolverSettings& cfg,
                                     bool parallel = true);

/// Cartesian tau grid for users 2..K with `per_axis` points on [0, R_k^max].
std::vector<std::vector<double>> uniform_tau_grid(const Scenario& s, std::size_t per_axis);

/// Maximize R_1 subject to R_k >= tau_k for k >= 2, one solve per grid entry.
std::vector<RatePoint> trace_boundary_multiuser(const DecodingOrder& order,
                                                const std::vector<std::vector<double>>& tau_grid,
                                                const Scenario& s,
                                                const solvers::SolverSettings& cfg,
                                                bool parallel = true);

/// Two users: upper-right convex frontier (monotone chain), R_1 increasing and
/// R_2 strictly decreasing. More users: Pareto-filtered points.
/// Invalid points are ignored; throws if no valid point remains.
std::vector<RatePoint> convex_hull_frontier(const std::vector<RatePoint>& points);

/// Points not weakly dominated by any other distinct point.
std::vector<RatePoint> pareto_filter(const std::vector<RatePoint>& points);

/// 2-D frontier of the projection onto users (i, j), as (R_i, R_j) pairs.
std::vector<std::pair<double, double>> projection_frontier(const std::vector<RatePoint>& points,
                                                           std::size_t i, std::size_t j);

/// Same frontier algorithm on raw (x, y) pairs.
std::vector<std::pair<double, double>> frontier_2d(std::vector<std::pair<double, double>> pts);

/// Distance from the origin to the boundary of the region spanned by a 2-D
/// frontier (with its axis projections), along direction angle theta in
/// [0, pi/2].
double radial_extent(const std::vector<std::pair<double, double>>& frontier, double theta);

/// True when (x, y) lies in the region within `tol`.
bool region_contains(const std::vector<std::pair<double, double>>& frontier, double x, double y,
                     double tol = 1e-12);

std::vector<std::pair<double, double>> as_pairs(const std::vector<RatePoint>& frontier);

}  // namespace noma::region
