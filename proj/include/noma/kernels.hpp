#pragma once

// Data-parallel kernels. Each kernel has an OpenMP implementation and a
// plain serial reference with identical results; the serial versions are kept
// for tests and for the benchmark.

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace noma::kernels {

/// Calls fn(i) for i in [0, n). Exceptions thrown by fn are rethrown
/// (the first one by index) after all iterations finish.
void for_each_index_serial(std::size_t n, const std::function<void(std::size_t)>& fn);
void for_each_index_omp(std::size_t n, const std::function<void(std::size_t)>& fn);

/// Parallel by default; `parallel = false` selects the serial reference.
inline void for_each_index(std::size_t n, const std::function<void(std::size_t)>& fn,
                           bool parallel = true) {
    if (parallel) {
        for_each_index_omp(n, fn);
    } else {
        for_each_index_serial(n, fn);
    }
}

/// Tensor grid: axis k holds `points` equally spaced values on [0, upper[k]].
struct GridSpec {
    std::vector<double> upper;
    std::size_t points = 2;

    std::size_t total() const;
    /// Writes the coordinates of flat index `idx` (axis 0 slowest).
    void coordinates(std::size_t idx, std::span<double> out) const;
    double step(std::size_t axis) const;
};

/// Returns the objective, or -infinity for infeasible points.
using GridObjective = std::function<double(std::span<const double>)>;

struct GridSearchResult {
    std::vector<double> point;
    double value;
    std::size_t index;      ///< flat index of the argmax; ties resolve to the smallest
    std::size_t feasible;   ///< number of points with a finite value
};

GridSearchResult grid_search_serial(const GridSpec& grid, const GridObjective& f);
GridSearchResult grid_search_omp(const GridSpec& grid, const GridObjective& f);

int max_threads();

}  // namespace noma::kernels
