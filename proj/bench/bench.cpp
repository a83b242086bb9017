// Serial reference vs OpenMP timings for the parallel kernels.
//
//   noma_bench [--quick]

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <functional>
#include <vector>

#include "noma/dpd_lab.hpp"
#include "noma/kernels.hpp"
#include "noma/region.hpp"

using namespace noma;

namespace {

double seconds(const std::function<void()>& fn, int reps) {
    double best = 1e300;
    for (int r = 0; r < reps; ++r) {
        const auto t0 = std::chrono::steady_clock::now();
        fn();
        best = std::min(best, std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
    }
    return best;
}

void report(const char* name, double serial, double omp) {
    std::printf("%-26s serial %9.4f s   omp %9.4f s   speedup %5.2fx\n", name, serial, omp, serial / omp);
}

Scenario two_user() {
    const double noise = std::pow(10.0, -17.4) * 30e6 * 1e-3;
    auto gain = [](double d) { return 4.11 * std::pow(3e8 / (4.0 * M_PI * 2.4e9 * d), 2.6); };
    const std::vector<double> gains{gain(120.0), gain(80.0)};
    return Scenario::homogeneous(gains, std::pow(10.0, 0.6), PaModel(0.0032, 1.3552), noise, 30e6);
}

}  // namespace

int main(int argc, char** argv) {
    const bool quick = argc > 1 && std::strcmp(argv[1], "--quick") == 0;
    const int reps = quick ? 1 : 3;
    std::printf("threads: %d%s\n", kernels::max_threads(), quick ? " (quick)" : "");

    const Scenario s = two_user();
    const auto order = DecodingOrder::parse("2->1");

    {
        kernels::GridSpec grid{{s.power_cap(0), s.power_cap(1), s.power_cap(1)}, quick ? 40u : 160u};
        kernels::GridObjective f = [&](std::span<const double> p) {
            double v = 0.0;
            for (double x : p) v += std::log1p(x) - 0.01 * x * x;
            return v;
        };
        const double a = seconds([&] { kernels::grid_search_serial(grid, f); }, reps);
        const double b = seconds([&] { kernels::grid_search_omp(grid, f); }, reps);
        report("grid_search (3-D)", a, b);
    }
    {
        solvers::SolverSettings cfg;
        cfg.tau_grid = quick ? 20 : 200;
        const double a = seconds([&] { region::trace_boundary_2user(order, s, cfg, false); }, reps);
        const double b = seconds([&] { region::trace_boundary_2user(order, s, cfg, true); }, reps);
        report("trace_boundary_2user", a, b);
    }
    {
        dpd::SweepConfig cfg;
        if (quick) {
            cfg.step_db = 4.0;
            cfg.frames = 5;
        }
        const double a = seconds([&] { dpd::run_sweep(cfg, false); }, reps);
        const double b = seconds([&] { dpd::run_sweep(cfg, true); }, reps);
        report("dpd run_sweep", a, b);
    }
    return 0;
}
