#include "noma/kernels.hpp"

#include <cmath>
#include <exception>
#include <limits>
#include <stdexcept>

namespace noma::kernels {

std::size_t GridSpec::total() const {
    if (points < 2) throw std::invalid_argument("GridSpec: need at least 2 points per axis");
    std::size_t n = 1;
    for (std::size_t k = 0; k < upper.size(); ++k) {
        if (n > std::numeric_limits<std::size_t>::max() / points) {
            throw std::overflow_error("GridSpec: grid too large");
        }
        n *= points;
    }
    return n;
}

double GridSpec::step(std::size_t axis) const {
    return upper.at(axis) / static_cast<double>(points - 1);
}

void GridSpec::coordinates(std::size_t idx, std::span<double> out) const {
    for (std::size_t k = upper.size(); k-- > 0;) {
        const std::size_t i = idx % points;
        idx /= points;
        // Exact endpoints regardless of rounding in the step.
        out[k] = (i + 1 == points) ? upper[k] : static_cast<double>(i) * step(k);
    }
}

void for_each_index_serial(std::size_t n, const std::function<void(std::size_t)>& fn) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
}

GridSearchResult grid_search_serial(const GridSpec& grid, const GridObjective& f) {
    const std::size_t n = grid.total();
    std::vector<double> x(grid.upper.size());
    GridSearchResult best{{}, -std::numeric_limits<double>::infinity(), n, 0};
    for (std::size_t idx = 0; idx < n; ++idx) {
        grid.coordinates(idx, x);
        const double v = f(x);
        if (!std::isfinite(v)) continue;
        ++best.feasible;
        if (v > best.value) {
            best.value = v;
            best.index = idx;
        }
    }
    if (best.index < n) {
        best.point.resize(x.size());
        grid.coordinates(best.index, best.point);
    }
    return best;
}

}  // namespace noma::kernels
