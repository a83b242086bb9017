#include <doctest.h>

#include <atomic>
#include <cmath>
#include <stdexcept>

#include "noma/kernels.hpp"

using namespace noma::kernels;

TEST_CASE("grid coordinates") {
    const GridSpec g{{1.0, 2.0}, 3};
    CHECK(g.total() == 9);
    std::vector<double> x(2);
    g.coordinates(5, x);   // axis 0 slowest: (1, 2)
    CHECK(x[0] == doctest::Approx(0.5));
    CHECK(x[1] == doctest::Approx(2.0));
    CHECK(g.step(1) == doctest::Approx(1.0));
}

TEST_CASE("serial and parallel grid search agree") {
    const GridSpec g{{3.0, 2.0, 1.0}, 41};
    const GridObjective f = [](std::span<const double> x) {
        if (x[0] + x[1] > 4.0) return -HUGE_VAL;
        return -std::pow(x[0] - 1.3, 2) - std::pow(x[1] - 0.7, 2) + 0.1 * x[2];
    };
    const auto s = grid_search_serial(g, f);
    const auto p = grid_search_omp(g, f);
    CHECK(s.index == p.index);
    CHECK(s.value == p.value);
    CHECK(s.feasible == p.feasible);
    CHECK(s.point == p.point);
    CHECK(s.point[2] == doctest::Approx(1.0));
}

TEST_CASE("ties resolve to the smallest index") {
    const GridSpec g{{1.0}, 101};
    const GridObjective flat = [](std::span<const double>) { return 1.0; };
    CHECK(grid_search_serial(g, flat).index == 0);
    CHECK(grid_search_omp(g, flat).index == 0);
}

TEST_CASE("no feasible point") {
    const GridSpec g{{1.0}, 11};
    const GridObjective none = [](std::span<const double>) { return -HUGE_VAL; };
    const auto r = grid_search_omp(g, none);
    CHECK(r.feasible == 0);
    CHECK(std::isinf(r.value));
}

TEST_CASE("for_each_index visits every index once") {
    for (bool parallel : {false, true}) {
        std::vector<std::atomic<int>> hits(1000);
        for_each_index(1000, [&](std::size_t i) { hits[i]++; }, parallel);
        for (auto& h : hits) CHECK(h.load() == 1);
    }
}

TEST_CASE("for_each_index rethrows the first failure by index") {
    for (bool parallel : {false, true}) {
        try {
            for_each_index(
                100,
                [](std::size_t i) {
                    if (i == 17 || i == 63) throw std::runtime_error(std::to_string(i));
                },
                parallel);
            FAIL("expected an exception");
        } catch (const std::runtime_error& e) {
            CHECK(std::string(e.what()) == "17");
        }
    }
}
