#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "noma/kernels.hpp"
#include "noma/region.hpp"

namespace noma::region {

RatePoint make_point(const DecodingOrder& order, std::span<const double> p, const Scenario& s) {
    RatePoint pt;
    pt.rates = user_rates(order, p, s);
    pt.powers.assign(p.begin(), p.end());
    pt.order = order;
    return pt;
}

RatePoint time_share(const RatePoint& a, const RatePoint& b, double mix) {
    if (!(mix >= 0.0 && mix <= 1.0)) throw std::domain_error("time-share fraction must be in [0, 1]");
    if (a.rates.size() != b.rates.size()) throw std::invalid_argument("time-share size mismatch");
    RatePoint pt;
    pt.rates.resize(a.rates.size());
    for (std::size_t i = 0; i < a.rates.size(); ++i) {
        pt.rates[i] = mix * a.rates[i] + (1.0 - mix) * b.rates[i];
    }
    pt.parents = {a, b};
    pt.mix = mix;
    return pt;
}

bool is_achievable(const RatePoint& pt, const Scenario& s, double tol) {
    if (!pt.valid) return false;
    std::vector<double> expected;
    if (pt.is_time_share()) {
        if (!is_achievable(pt.parents[0], s, tol) || !is_achievable(pt.parents[1], s, tol)) {
            return false;
        }
        expected = time_share(pt.parents[0], pt.parents[1], pt.mix).rates;
    } else {
        if (!pt.order) return false;
        expected = user_rates(*pt.order, pt.powers, s);
    }
    for (std::size_t i = 0; i < expected.size(); ++i) {
        if (std::abs(expected[i] - pt.rates[i]) > tol) return false;
    }
    return true;
}

namespace {

RatePoint sentinel(std::size_t k, const DecodingOrder& order) {
    RatePoint pt;
    pt.rates.assign(k, -std::numeric_limits<double>::infinity());
    pt.order = order;
    pt.valid = false;
    return pt;
}

}  // namespace

std::vector<RatePoint> trace_boundary_2user(const DecodingOrder& order, const Scenario& s,
                                            const solvers::SolverSettings& cfg, bool parallel) {
    cfg.validate();
    if (s.size() != 2) throw std::invalid_argument("two-user trace needs exactly two users");
    const double r2max = s.max_single_user_rate(1);
    const auto n = static_cast<std::size_t>(cfg.tau_grid);
    std::vector<RatePoint> out(n);
    kernels::for_each_index(
        n,
        [&](std::size_t i) {
            const double tau =
                (i + 1 == n) ? r2max : r2max * static_cast<double>(i) / static_cast<double>(n - 1);
            const auto rep = solvers::dinkelbach_rate_profile(tau, order, s, cfg);
            RatePoint pt = rep.status == solvers::SolveStatus::Infeasible
                               ? sentinel(2, order)
                               : make_point(order, rep.p_star, s);
            pt.valid = rep.status != solvers::SolveStatus::Infeasible;
            pt.tau = tau;
            out[i] = std::move(pt);
        },
        parallel);
    return out;
}

std::pair<RatePoint, RatePoint> sum_rate_corner_points(const Scenario& s,
                                                       const solvers::SolverSettings& cfg) {
    if (s.size() != 2) throw std::invalid_argument("corner points need exactly two users");
    solvers::SolverSettings tight = cfg;
    tight.epsilon = std::min(cfg.epsilon, 1e-10);
    tight.max_outer_iters = std::max(cfg.max_outer_iters, 200);
    const std::vector<double> floors{0.0, 0.0};
    const auto rep = solvers::sum_rate_maximize(floors, s, tight);
    if (rep.status != solvers::SolveStatus::Optimal) {
        throw std::runtime_error("sum-rate maximization failed: " + rep.message);
    }
    return {make_point(DecodingOrder::parse("2->1"), rep.p_star, s),
            make_point(DecodingOrder::parse("1->2"), rep.p_star, s)};
}

RegionBoundary capacity_region_2user(const Scenario& s, const solvers::SolverSettings& cfg,
                                     bool parallel) {
    RegionBoundary region;
    for (const char* o : {"2->1", "1->2"}) {
        auto trace = trace_boundary_2user(DecodingOrder::parse(o), s, cfg, parallel);
        region.points.insert(region.points.end(), trace.begin(), trace.end());
    }
    region.corners = sum_rate_corner_points(s, cfg);
    region.sum_rate_max = region.corners.first.rates[0] + region.corners.first.rates[1];

    auto candidates = region.points;
    candidates.push_back(region.corners.first);
    candidates.push_back(region.corners.second);
    region.hull = convex_hull_frontier(candidates);
    return region;
}

std::vector<std::vector<double>> uniform_tau_grid(const Scenario& s, std::size_t per_axis) {
    if (s.size() < 2) throw std::invalid_argument("tau grid needs at least two users");
    if (per_axis < 2) throw std::invalid_argument("tau grid needs at least 2 points per axis");
    std::vector<double> upper;
    for (std::size_t u = 1; u < s.size(); ++u) upper.push_back(s.max_single_user_rate(u));
    kernels::GridSpec grid{upper, per_axis};
    std::vector<std::vector<double>> out(grid.total(), std::vector<double>(upper.size()));
    for (std::size_t i = 0; i < out.size(); ++i) grid.coordinates(i, out[i]);
    return out;
}

std::vector<RatePoint> trace_boundary_multiuser(const DecodingOrder& order,
                                                const std::vector<std::vector<double>>& tau_grid,
                                                const Scenario& s,
                                                const solvers::SolverSettings& cfg,
                                                bool parallel) {
    cfg.validate();
    const std::size_t k = s.size();
    for (const auto& tau : tau_grid) {
        if (tau.size() + 1 != k) throw std::invalid_argument("tau vectors need K-1 entries");
    }
    std::vector<RatePoint> out(tau_grid.size());
    kernels::for_each_index(
        tau_grid.size(),
        [&](std::size_t i) {
            std::vector<double> floors(k, 0.0);
            std::copy(tau_grid[i].begin(), tau_grid[i].end(), floors.begin() + 1);
            const auto rep = solvers::maximize_user_rate(0, floors, order, s, cfg);
            out[i] = rep.status == solvers::SolveStatus::Infeasible
                         ? sentinel(k, order)
                         : make_point(order, rep.p_star, s);
        },
        parallel);
    return out;
}

}  // namespace noma::region
