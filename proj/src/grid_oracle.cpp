#include <cmath>
#include <limits>
#include <stdexcept>

#include "noma/kernels.hpp"
#include "noma/solvers.hpp"

namespace noma::solvers {

OracleObjective OracleObjective::sum_rate() { return {}; }

OracleObjective OracleObjective::weighted(std::vector<double> weights, std::vector<double> floors,
                                          DecodingOrder order) {
    OracleObjective o;
    o.kind = OracleKind::WeightedSumRate;
    o.weights = std::move(weights);
    o.floors = std::move(floors);
    o.order = std::move(order);
    return o;
}

OracleObjective OracleObjective::rate_profile(double tau, DecodingOrder order) {
    OracleObjective o;
    o.kind = OracleKind::RateProfile;
    o.floors = {0.0, tau};
    o.order = std::move(order);
    o.target = 0;
    return o;
}

OracleResult grid_oracle(const Scenario& s, const OracleObjective& obj, std::size_t resolution,
                         bool parallel) {
    const std::size_t k = s.size();
    if (k > 3) throw std::invalid_argument("grid oracle supports at most 3 users");
    if (resolution < 2 || resolution > 1001) {
        throw std::invalid_argument("grid oracle resolution must be in [2, 1001] points per axis");
    }
    if (!obj.floors.empty() && obj.floors.size() != k) {
        throw std::invalid_argument("grid oracle floors size mismatch");
    }
    if (obj.kind == OracleKind::WeightedSumRate && obj.weights.size() != k) {
        throw std::invalid_argument("grid oracle weights size mismatch");
    }
    if (obj.kind == OracleKind::RateProfile && obj.target >= k) {
        throw std::invalid_argument("grid oracle target out of range");
    }
    const DecodingOrder order = obj.order.value_or(DecodingOrder::identity(k));
    if (order.size() != k) throw std::invalid_argument("grid oracle order size mismatch");

    kernels::GridSpec grid{s.power_caps(), resolution};
    const double neg_inf = -std::numeric_limits<double>::infinity();
    kernels::GridObjective f = [&](std::span<const double> p) {
        const auto rates = user_rates(order, p, s);
        for (std::size_t u = 0; u < obj.floors.size(); ++u) {
            if (u == obj.target && obj.kind == OracleKind::RateProfile) continue;
            if (rates[u] < obj.floors[u]) return neg_inf;
        }
        double v = 0.0;
        switch (obj.kind) {
            case OracleKind::SumRate:
                for (double r : rates) v += r;
                break;
            case OracleKind::WeightedSumRate:
                for (std::size_t u = 0; u < k; ++u) v += obj.weights[u] * rates[u];
                break;
            case OracleKind::RateProfile:
                v = rates[obj.target];
                break;
        }
        return v;
    };
    const auto best = parallel ? kernels::grid_search_omp(grid, f) : kernels::grid_search_serial(grid, f);

    OracleResult out;
    out.p = best.point;
    out.objective = best.value;
    out.feasible_points = best.feasible;
    for (std::size_t a = 0; a < k; ++a) out.step.push_back(grid.step(a));
    return out;
}

}  // namespace noma::solvers
