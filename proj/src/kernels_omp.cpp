#include "noma/kernels.hpp"

#include <omp.h>

#include <cmath>
#include <exception>
#include <limits>
#include <vector>

namespace noma::kernels {

int max_threads() { return omp_get_max_threads(); }

void for_each_index_omp(std::size_t n, const std::function<void(std::size_t)>& fn) {
    std::vector<std::exception_ptr> errors(n);
    const auto count = static_cast<std::ptrdiff_t>(n);
#pragma omp parallel for schedule(dynamic)
    for (std::ptrdiff_t i = 0; i < count; ++i) {
        try {
            fn(static_cast<std::size_t>(i));
        } catch (...) {
            errors[static_cast<std::size_t>(i)] = std::current_exception();
        }
    }
    for (auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }
}

GridSearchResult grid_search_omp(const GridSpec& grid, const GridObjective& f) {
    const std::size_t n = grid.total();
    const double neg_inf = -std::numeric_limits<double>::infinity();
    double best_value = neg_inf;
    std::size_t best_index = n;
    std::size_t feasible = 0;
    std::exception_ptr error;

#pragma omp parallel
    {
        std::vector<double> x(grid.upper.size());
        double local_value = neg_inf;
        std::size_t local_index = n;
        std::size_t local_feasible = 0;
        const auto count = static_cast<std::ptrdiff_t>(n);
#pragma omp for schedule(static) nowait
        for (std::ptrdiff_t i = 0; i < count; ++i) {
            const auto idx = static_cast<std::size_t>(i);
            double v = neg_inf;
            try {
                grid.coordinates(idx, x);
                v = f(x);
            } catch (...) {
#pragma omp critical(noma_grid_error)
                if (!error) error = std::current_exception();
            }
            if (!std::isfinite(v)) continue;
            ++local_feasible;
            if (v > local_value || (v == local_value && idx < local_index)) {
                local_value = v;
                local_index = idx;
            }
        }
#pragma omp critical(noma_grid_reduce)
        {
            feasible += local_feasible;
            if (local_value > best_value ||
                (local_value == best_value && local_index < best_index)) {
                best_value = local_value;
                best_index = local_index;
            }
        }
    }
    if (error) std::rethrow_exception(error);

    GridSearchResult best{{}, best_value, best_index, feasible};
    if (best_index < n) {
        best.point.resize(grid.upper.size());
        grid.coordinates(best_index, best.point);
    }
    return best;
}

}  // namespace noma::kernels
