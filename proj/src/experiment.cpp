#include "noma/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <numeric>
#include <optional>
#include <random>
#include <sstream>
#include <stdexcept>

#include "noma/kernels.hpp"
#include "noma/ofdm.hpp"
#include "noma/region.hpp"

namespace noma::cli {

using nlohmann::json;

ExperimentKind parse_kind(const std::string& name) {
    if (name == "fit") return ExperimentKind::Fit;
    if (name == "region") return ExperimentKind::Region;
    if (name == "wsr") return ExperimentKind::Wsr;
    if (name == "sumrate") return ExperimentKind::SumRate;
    if (name == "ofdm") return ExperimentKind::Ofdm;
    if (name == "dpd-sweep") return ExperimentKind::DpdSweep;
    throw std::invalid_argument("unknown experiment '" + name + "'");
}

const char* to_string(ExperimentKind kind) {
    switch (kind) {
        case ExperimentKind::Fit: return "fit";
        case ExperimentKind::Region: return "region";
        case ExperimentKind::Wsr: return "wsr";
        case ExperimentKind::SumRate: return "sumrate";
        case ExperimentKind::Ofdm: return "ofdm";
        case ExperimentKind::DpdSweep: return "dpd-sweep";
    }
    return "?";
}

namespace {

// Powers get full precision so the W/dBm pair round-trips.
std::string num(double v, int digits = 12) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.*g", digits, v);
    return buf;
}

std::string pw(double w) { return num(w, 17); }
std::string dbm(double w) { return num(watts_to_dbm(w), 17); }

class Csv {
public:
    explicit Csv(std::vector<std::string> header) : width_(header.size()) { add(header); }

    void add(const std::vector<std::string>& row) {
        if (row.size() != width_) throw std::logic_error("csv row width mismatch");
        for (std::size_t i = 0; i < row.size(); ++i) text_ << (i ? "," : "") << row[i];
        text_ << '\n';
    }

    void write(const std::filesystem::path& path) const {
        std::ofstream out(path, std::ios::binary);
        if (!out) throw std::runtime_error("cannot write " + path.string());
        out << text_.str();
    }

private:
    std::size_t width_;
    std::ostringstream text_;
};

json powers_json(const PowerAllocation& p) {
    json w = json::array(), d = json::array();
    for (double x : p) {
        w.push_back(x);
        d.push_back(watts_to_dbm(x));
    }
    return {{"watts", w}, {"dbm", d}};
}

json rates_json(const std::vector<double>& r, double bandwidth) {
    json hz = json::array(), bps = json::array();
    for (double x : r) {
        hz.push_back(x);
        bps.push_back(x * bandwidth);
    }
    return {{"bits_per_s_per_hz", hz}, {"bits_per_s", bps}};
}

json report_json(const solvers::SolveReport& r) {
    return {{"status", solvers::to_string(r.status)},
            {"converged", r.converged},
            {"iterations", r.iterations},
            {"objective_bits_per_s_per_hz", r.objective},
            {"trace", r.trace},
            {"message", r.message}};
}

class Run {
public:
    Run(const ExperimentConfig& cfg, std::filesystem::path dir, bool parallel)
        : cfg_(cfg), dir_(std::move(dir)), parallel_(parallel) {
        std::filesystem::create_directories(dir_);
    }

    void save(const Csv& csv, const std::string& name) {
        const auto path = dir_ / name;
        csv.write(path);
        result_.files.push_back(path);
    }

    void save_text(const std::string& text, const std::string& name) {
        const auto path = dir_ / name;
        std::ofstream out(path, std::ios::binary);
        if (!out) throw std::runtime_error("cannot write " + path.string());
        out << text;
        result_.files.push_back(path);
    }

    // Records a solver failure; the run continues so the other points are kept.
    bool check(const solvers::SolveReport& r, const std::string& what) {
        if (r.status == solvers::SolveStatus::Optimal) return true;
        result_.exit_code = 2;
        result_.diagnostics.push_back(what + ": " + solvers::to_string(r.status) +
                                      (r.message.empty() ? "" : " (" + r.message + ")"));
        return false;
    }

    ExperimentResult finish(json summary) {
        summary["diagnostics"] = result_.diagnostics;
        summary["exit_code"] = result_.exit_code;
        const auto path = dir_ / "summary.json";
        std::ofstream out(path, std::ios::binary);
        if (!out) throw std::runtime_error("cannot write " + path.string());
        out << summary.dump(2) << '\n';
        result_.files.push_back(path);
        result_.summary = std::move(summary);
        return std::move(result_);
    }

    const ExperimentConfig& cfg() const { return cfg_; }
    bool parallel() const { return parallel_; }

private:
    const ExperimentConfig& cfg_;
    std::filesystem::path dir_;
    bool parallel_;
    ExperimentResult result_;
};

json scenario_json(const ExperimentConfig& cfg, const Scenario& s, const std::vector<double>& d) {
    json users = json::array();
    for (std::size_t k = 0; k < s.size(); ++k) {
        users.push_back({{"distance_m", d[k]},
                         {"channel_gain", s.user(k).channel_gain},
                         {"power_cap_w", s.power_cap(k)},
                         {"power_cap_dbm", watts_to_dbm(s.power_cap(k))}});
    }
    const auto& m = s.user(0).model;
    return {{"bandwidth_hz", s.bandwidth()},
            {"noise_power_w", s.noise_power()},
            {"p_max_w", dbm_to_watts(cfg.p_max_dbm)},
            {"p_max_dbm", cfg.p_max_dbm},
            {"pathloss_exponent", cfg.pathloss_exponent},
            {"pa_a", m.a()},
            {"pa_alpha", m.alpha()},
            {"users", users}};
}

// Users 60 + 20(k-1) m unless the explicit distance list already has K entries.
std::vector<double> distances_for(const ExperimentConfig& cfg, std::size_t k) {
    if (cfg.users == 0 && cfg.distances.size() == k) return cfg.distances;
    return resolve_distances(cfg, k);
}

Scenario scenario_for(const ExperimentConfig& cfg, const PaModel& model, std::size_t k,
                      double sigma, double bandwidth) {
    ExperimentConfig c = cfg;
    c.users = 0;
    c.distances = distances_for(cfg, k);
    return build_scenario(c, model, sigma, std::nullopt, bandwidth);
}

std::vector<double> to_spectral(const std::vector<double>& bps, double bandwidth) {
    std::vector<double> out;
    for (double r : bps) out.push_back(r / bandwidth);
    return out;
}

// PC-IDEAL: powers optimized for a = 0, projected onto the true feasible set
// when floors are present.
struct IdealPolicy {
    solvers::SolveReport optimize;
    std::optional<solvers::SolveReport> projection;
    PowerAllocation p;
    bool ok = false;
};

template <typename Optimize>
IdealPolicy ideal_policy(const Scenario& s, const std::vector<double>& floors,
                         const DecodingOrder& order, const solvers::SolverSettings& st,
                         Optimize&& optimize) {
    IdealPolicy out;
    out.optimize = optimize(s.with_ideal_pa());
    if (out.optimize.status != solvers::SolveStatus::Optimal) return out;
    out.p = out.optimize.p_star;
    const bool has_floors =
        std::any_of(floors.begin(), floors.end(), [](double r) { return r > 0.0; });
    if (has_floors) {
        out.projection = solvers::project_feasible(out.p, floors, order, s, st);
        if (out.projection->status != solvers::SolveStatus::Optimal) return out;
        out.p = out.projection->p_star;
    } else {
        // Caps of the true model still apply.
        for (std::size_t k = 0; k < s.size(); ++k) out.p[k] = std::min(out.p[k], s.user(k).p_max);
    }
    out.ok = true;
    return out;
}

// --- region -------------------------------------------------------------

ExperimentResult run_region(Run& run) {
    const auto& cfg = run.cfg();
    const PaModel model = resolve_pa_model(cfg);
    const auto d = resolve_distances(cfg);
    if (d.size() != 2) throw std::invalid_argument("region: needs exactly two users");
    const Scenario s = build_scenario(cfg, model);
    const double b = s.bandwidth();

    const auto region = region::capacity_region_2user(s, cfg.solver, run.parallel());
    const auto ideal = region::capacity_region_2user(s.with_ideal_pa(), cfg.solver, run.parallel());

    Csv trace({"model", "order", "tau_bps_hz", "valid", "r1_bps_hz", "r2_bps_hz", "r1_bps",
               "r2_bps", "p1_w", "p2_w", "p1_dbm", "p2_dbm"});
    std::size_t invalid = 0;
    auto emit = [&](const char* name, const region::RegionBoundary& r) {
        for (const auto& pt : r.points) {
            invalid += pt.valid ? 0 : 1;
            if (!pt.valid) {
                trace.add({name, pt.order->to_string(), num(pt.tau), "0", "", "", "", "", "", "",
                           "", ""});
                continue;
            }
            trace.add({name, pt.order->to_string(), num(pt.tau), "1", num(pt.rates[0]),
                       num(pt.rates[1]), num(pt.rates[0] * b), num(pt.rates[1] * b),
                       pw(pt.powers[0]), pw(pt.powers[1]), dbm(pt.powers[0]), dbm(pt.powers[1])});
        }
    };
    emit("ndm", region);
    emit("ideal", ideal);
    run.save(trace, "region_boundary.csv");

    Csv hull({"model", "r1_bps_hz", "r2_bps_hz", "r1_bps", "r2_bps"});
    for (const auto& [name, r] : {std::pair{"ndm", &region}, std::pair{"ideal", &ideal}}) {
        for (const auto& pt : r->hull) {
            hull.add({name, num(pt.rates[0]), num(pt.rates[1]), num(pt.rates[0] * b),
                      num(pt.rates[1] * b)});
        }
    }
    run.save(hull, "region_hull.csv");

    // G: PC-NDM sum-rate point. H: ideal-PA powers under the true model.
    const DecodingOrder pi1 = DecodingOrder::parse("2->1");
    const std::vector<double> zero{0.0, 0.0};
    const auto g = solvers::sum_rate_maximize(zero, s, cfg.solver, pi1);
    run.check(g, "region: PC-NDM sum rate");
    const auto h = ideal_policy(s, zero, pi1, cfg.solver, [&](const Scenario& si) {
        return solvers::sum_rate_maximize(zero, si, cfg.solver, pi1);
    });
    run.check(h.optimize, "region: PC-IDEAL sum rate");

    json summary{{"experiment", "region"}, {"scenario", scenario_json(cfg, s, d)}};
    auto point = [&](const PowerAllocation& p) {
        const auto r = user_rates(pi1, p, s);
        return json{{"order", pi1.to_string()},
                    {"powers", powers_json(p)},
                    {"rates", rates_json(r, b)},
                    {"sum_rate_bits_per_s", (r[0] + r[1]) * b}};
    };
    if (g.status == solvers::SolveStatus::Optimal && h.ok) {
        const double sg = sum_rate(g.p_star, s);
        const double sh = sum_rate(h.p, s);
        summary["G"] = point(g.p_star);
        summary["G"]["solver"] = report_json(g);
        summary["H"] = point(h.p);
        summary["gain_percent"] = 100.0 * (sg / sh - 1.0);
    }
    auto corners = [&](const region::RegionBoundary& r) {
        return json{{"b_star_bits_per_s_per_hz", r.sum_rate_max},
                    {"B", rates_json(r.corners.first.rates, b)},
                    {"C", rates_json(r.corners.second.rates, b)},
                    {"hull_points", r.hull.size()}};
    };
    summary["ndm"] = corners(region);
    summary["ideal"] = corners(ideal);
    summary["tau_grid"] = cfg.solver.tau_grid;
    summary["invalid_trace_points"] = invalid;
    return run.finish(std::move(summary));
}

// --- sumrate ------------------------------------------------------------

struct SumRateRow {
    double bandwidth, sigma;
    std::size_t users;
    solvers::SolveReport ndm;
    IdealPolicy ideal;
    std::vector<double> floors;
    Scenario scenario;
};

ExperimentResult run_sumrate(Run& run) {
    const auto& cfg = run.cfg();
    const PaModel model = resolve_pa_model(cfg);

    struct Point {
        std::string sweep;
        double bandwidth, sigma;
        std::size_t users;
    };
    std::vector<Point> points;
    for (double bw : cfg.sumrate_bandwidths) {
        for (double sg : cfg.sumrate_sigmas) points.push_back({"sigma", bw, sg, cfg.sumrate_users});
    }
    for (double bw : cfg.sumrate_bandwidths) {
        for (std::size_t k : cfg.sumrate_user_sweep) {
            points.push_back({"users", bw, cfg.sumrate_user_sweep_sigma, k});
        }
    }

    std::vector<std::optional<SumRateRow>> rows(points.size());
    kernels::for_each_index(
        points.size(),
        [&](std::size_t i) {
            const auto& pt = points[i];
            const Scenario s = scenario_for(cfg, model, pt.users, pt.sigma, pt.bandwidth);
            std::vector<double> floors(pt.users, 0.0);
            if (!cfg.sumrate_floors.empty()) {
                if (cfg.sumrate_floors.size() != pt.users) {
                    throw std::invalid_argument("sumrate.floors: expected " +
                                                std::to_string(pt.users) + " entries");
                }
                floors = to_spectral(cfg.sumrate_floors, pt.bandwidth);
            }
            const auto order = DecodingOrder::identity(pt.users);
            auto ndm = solvers::sum_rate_maximize(floors, s, cfg.solver, order);
            auto ideal = ideal_policy(s, floors, order, cfg.solver, [&](const Scenario& si) {
                return solvers::sum_rate_maximize(floors, si, cfg.solver, order);
            });
            rows[i] = SumRateRow{pt.bandwidth, pt.sigma, pt.users, std::move(ndm),
                                 std::move(ideal), floors, s};
        },
        run.parallel());

    Csv table({"sweep", "bandwidth_hz", "sigma", "users", "status", "pc_ndm_bps", "pc_ideal_bps",
               "gain_percent", "iterations"});
    Csv powers({"sweep", "bandwidth_hz", "sigma", "users", "policy", "user", "p_w", "p_dbm",
                "rate_bps_hz", "rate_bps"});
    json per_bw = json::object();
    std::map<std::string, std::pair<double, int>> gains;
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const auto& r = *rows[i];
        const auto& pt = points[i];
        const std::string what = "sumrate: " + pt.sweep + " B=" + num(r.bandwidth) +
                                 " sigma=" + num(r.sigma) + " K=" + std::to_string(r.users);
        const bool ok = run.check(r.ndm, what + " PC-NDM") &
                        run.check(r.ideal.projection.value_or(r.ideal.optimize), what + " PC-IDEAL");
        if (!ok) {
            table.add({pt.sweep, num(r.bandwidth), num(r.sigma), std::to_string(r.users),
                       "failed", "", "", "", std::to_string(r.ndm.iterations)});
            continue;
        }
        const double ndm = sum_rate(r.ndm.p_star, r.scenario) * r.bandwidth;
        const double ideal = sum_rate(r.ideal.p, r.scenario) * r.bandwidth;
        const double gain = 100.0 * (ndm / ideal - 1.0);
        auto& acc = gains[pt.sweep + "_" + num(r.bandwidth)];
        acc.first += gain;
        acc.second += 1;
        table.add({pt.sweep, num(r.bandwidth), num(r.sigma), std::to_string(r.users), "ok",
                   num(ndm), num(ideal), num(gain), std::to_string(r.ndm.iterations)});
        const auto order = DecodingOrder::identity(r.users);
        for (const auto& [policy, p] :
             {std::pair{"pc_ndm", &r.ndm.p_star}, std::pair{"pc_ideal", &r.ideal.p}}) {
            const auto rates = user_rates(order, *p, r.scenario);
            for (std::size_t k = 0; k < r.users; ++k) {
                powers.add({pt.sweep, num(r.bandwidth), num(r.sigma), std::to_string(r.users),
                            policy, std::to_string(k + 1), pw((*p)[k]), dbm((*p)[k]),
                            num(rates[k]), num(rates[k] * r.bandwidth)});
            }
        }
    }
    run.save(table, "sumrate.csv");
    run.save(powers, "sumrate_powers.csv");

    json mean = json::object();
    for (const auto& [key, acc] : gains) mean[key] = acc.first / acc.second;
    json summary{{"experiment", "sumrate"},
                 {"points", points.size()},
                 {"mean_gain_percent", mean},
                 {"pa_a", model.a()},
                 {"pa_alpha", model.alpha()}};
    return run.finish(std::move(summary));
}

// --- wsr ----------------------------------------------------------------

ExperimentResult run_wsr(Run& run) {
    const auto& cfg = run.cfg();
    const PaModel model = resolve_pa_model(cfg);
    const std::size_t k = cfg.wsr_weights.size();
    if (k < 2) throw std::invalid_argument("wsr.weights: need at least two users");
    const Scenario s = scenario_for(cfg, model, k, cfg.pathloss_exponent, cfg.bandwidth);
    const double b = s.bandwidth();
    const double wsum = std::accumulate(cfg.wsr_weights.begin(), cfg.wsr_weights.end(), 0.0);
    if (!(wsum > 0.0)) throw std::invalid_argument("wsr.weights: must have a positive sum");

    // Weight-proportional time shares, each user alone at its best power.
    double tdma = 0.0;
    for (std::size_t u = 0; u < k; ++u) {
        tdma += cfg.wsr_weights[u] * (cfg.wsr_weights[u] / wsum) * s.max_single_user_rate(u);
    }

    std::vector<DecodingOrder> orders;
    for (const auto& o : cfg.wsr_orders) {
        orders.push_back(DecodingOrder::parse(o));
        if (orders.back().size() != k) throw std::invalid_argument("wsr.orders: '" + o + "' has wrong size");
    }

    struct Cell {
        solvers::SolveReport ndm;
        IdealPolicy ideal;
    };
    const std::size_t nf = cfg.wsr_floor_sweep.size();
    std::vector<std::optional<Cell>> cells(orders.size() * nf);
    kernels::for_each_index(
        cells.size(),
        [&](std::size_t i) {
            const auto& order = orders[i / nf];
            const std::vector<double> floors(k, cfg.wsr_floor_sweep[i % nf] / b);
            auto ndm = solvers::wsr_maximize(cfg.wsr_weights, floors, order, s, cfg.solver);
            auto ideal = ideal_policy(s, floors, order, cfg.solver, [&](const Scenario& si) {
                return solvers::wsr_maximize(cfg.wsr_weights, floors, order, si, cfg.solver);
            });
            cells[i] = Cell{std::move(ndm), std::move(ideal)};
        },
        run.parallel());

    Csv table({"order", "floor_bps", "status", "pc_ndm_wsr_bps", "pc_ideal_wsr_bps", "tdma_wsr_bps",
               "iterations", "fixed_point_residual"});
    Csv powers({"order", "floor_bps", "policy", "user", "p_w", "p_dbm", "rate_bps_hz", "rate_bps"});
    json runs = json::array();
    for (std::size_t i = 0; i < cells.size(); ++i) {
        const auto& c = *cells[i];
        const auto& order = orders[i / nf];
        const double floor = cfg.wsr_floor_sweep[i % nf];
        const std::string what = "wsr: order " + order.to_string() + " floor " + num(floor);
        const bool ok = run.check(c.ndm, what + " PC-NDM") &
                        run.check(c.ideal.projection.value_or(c.ideal.optimize), what + " PC-IDEAL");
        runs.push_back({{"order", order.to_string()}, {"floor_bps", floor},
                        {"pc_ndm", report_json(c.ndm)}});
        if (!ok) {
            table.add({order.to_string(), num(floor), "failed", "", "", num(tdma * b),
                       std::to_string(c.ndm.iterations), ""});
            continue;
        }
        const double ndm = weighted_sum_rate(cfg.wsr_weights, order, c.ndm.p_star, s);
        const double ideal = weighted_sum_rate(cfg.wsr_weights, order, c.ideal.p, s);
        table.add({order.to_string(), num(floor), "ok", num(ndm * b), num(ideal * b), num(tdma * b),
                   std::to_string(c.ndm.iterations), num(c.ndm.fixed_point_residual)});
        for (const auto& [policy, p] :
             {std::pair{"pc_ndm", &c.ndm.p_star}, std::pair{"pc_ideal", &c.ideal.p}}) {
            const auto rates = user_rates(order, *p, s);
            for (std::size_t u = 0; u < k; ++u) {
                powers.add({order.to_string(), num(floor), policy, std::to_string(u + 1),
                            pw((*p)[u]), dbm((*p)[u]), num(rates[u]), num(rates[u] * b)});
            }
        }
    }
    run.save(table, "wsr.csv");
    run.save(powers, "wsr_powers.csv");

    json summary{{"experiment", "wsr"},
                 {"scenario", scenario_json(cfg, s, distances_for(cfg, k))},
                 {"weights", cfg.wsr_weights},
                 {"tdma_wsr_bits_per_s", tdma * b},
                 {"runs", runs}};
    return run.finish(std::move(summary));
}

// --- ofdm ---------------------------------------------------------------

ExperimentResult run_ofdm(Run& run) {
    const auto& cfg = run.cfg();
    const PaModel model = resolve_pa_model(cfg);
    const auto d = resolve_distances(cfg);
    const double gain = pathloss_gain(d.front(), cfg.carrier_freq, cfg.pathloss_exponent,
                                      cfg.antenna_gain);
    const double n1 = dbm_to_watts(cfg.noise_psd_dbm);
    const double pt = dbm_to_watts(cfg.ofdm_total_power_dbm);
    const double b = cfg.bandwidth;
    const LinkBudget link(gain, b * n1, pt);
    const double single = b * p2p_rate(pt, link, model);

    Csv red({"subcarriers", "cp", "ofdm_sum_rate_bps", "single_link_bps", "relative_error"});
    double worst = 0.0;
    for (std::size_t n : cfg.ofdm_subcarriers) {
        const auto oc = ofdm::OfdmConfig::flat(n, cfg.ofdm_cp, b, n1, gain, pt);
        const double r = ofdm::ofdm_sum_rate(oc, model);
        const double rel = std::abs(r - single) / single;
        worst = std::max(worst, rel);
        red.add({std::to_string(n), std::to_string(cfg.ofdm_cp), num(r), num(single), num(rel, 3)});
    }
    run.save(red, "ofdm_reduction.csv");

    // Frequency-selective allocation: Rayleigh-faded subchannels.
    const std::size_t n = cfg.ofdm_alloc_subcarriers;
    std::mt19937_64 rng(cfg.seed);
    std::exponential_distribution<double> fade(1.0);
    std::vector<double> gains(n);
    for (auto& g : gains) g = gain * fade(rng);
    auto oc = ofdm::OfdmConfig::flat(n, cfg.ofdm_cp, b, n1, gain, pt);
    oc.subchannel_gains = gains;
    const double equal = ofdm::ofdm_sum_rate(oc, model);
    const auto alloc = ofdm::grid_allocate(oc, model, pt, cfg.ofdm_alloc_resolution, run.parallel());

    Csv al({"subcarrier", "gain", "equal_p_w", "equal_p_dbm", "grid_p_w", "grid_p_dbm"});
    for (std::size_t m = 0; m < n; ++m) {
        al.add({std::to_string(m), num(gains[m]), pw(pt / n), dbm(pt / n), pw(alloc.powers[m]),
                dbm(alloc.powers[m])});
    }
    run.save(al, "ofdm_allocation.csv");

    json summary{{"experiment", "ofdm"},
                 {"total_power_w", pt},
                 {"total_power_dbm", cfg.ofdm_total_power_dbm},
                 {"single_link_bits_per_s", single},
                 {"max_relative_error", worst},
                 {"allocation",
                  {{"subcarriers", n},
                   {"resolution", cfg.ofdm_alloc_resolution},
                   {"equal_split_bits_per_s", equal},
                   {"grid_bits_per_s", alloc.sum_rate},
                   {"powers", powers_json(alloc.powers)}}}};
    return run.finish(std::move(summary));
}

// --- dpd-sweep and fit --------------------------------------------------

json fit_json(const dpd::PowerLawFit& f) {
    return {{"a", f.model.a()}, {"alpha", f.model.alpha()}, {"k1", f.regression.k1},
            {"k2", f.regression.k2}, {"r_squared", f.r_squared}};
}

ExperimentResult run_dpd_sweep(Run& run) {
    auto sc = run.cfg().dpd;
    sc.seed = run.cfg().seed;
    const auto rows = dpd::run_sweep(sc, run.parallel());
    std::ostringstream os;
    dpd::write_sweep_csv(os, rows, sc.seed);
    run.save_text(os.str(), "dpd_sweep.csv");

    const auto without = dpd::fit_power_law(dpd::sweep_measurements(rows, false));
    const auto with = dpd::fit_power_law(dpd::sweep_measurements(rows, true));
    Csv fits({"dpd_enabled", "a", "alpha", "k1", "k2", "r_squared"});
    for (const auto& [flag, f] : {std::pair{"0", &without}, std::pair{"1", &with}}) {
        fits.add({flag, num(f->model.a()), num(f->model.alpha()), num(f->regression.k1),
                  num(f->regression.k2), num(f->r_squared)});
    }
    run.save(fits, "dpd_fit.csv");

    std::size_t diverged = 0, improved = 0;
    for (const auto& r : rows) {
        diverged += r.diverged ? 1 : 0;
        improved += r.with_dpd.nmse_db < r.without_dpd.nmse_db ? 1 : 0;
    }
    json summary{{"experiment", "dpd-sweep"},
                 {"seed", sc.seed},
                 {"levels", rows.size()},
                 {"levels_improved", improved},
                 {"levels_diverged", diverged},
                 {"fit_without_dpd", fit_json(without)},
                 {"fit_with_dpd", fit_json(with)}};
    return run.finish(std::move(summary));
}

ExperimentResult run_fit(Run& run) {
    const auto& cfg = run.cfg();
    if (cfg.fit_input.empty()) throw std::invalid_argument("fit.input: required for the fit experiment");
    const auto data = read_measurements(cfg.fit_input, cfg.fit_rows);
    const auto f = dpd::fit_power_law(data);
    Csv out({"p_out_w", "p_out_dbm", "nmse_db", "fitted_nmse_db", "residual_db"});
    for (const auto& m : data) {
        const double fitted = nmse_db(m.p_out, f.regression);
        out.add({pw(m.p_out), dbm(m.p_out), num(m.nmse_db), num(fitted), num(m.nmse_db - fitted)});
    }
    run.save(out, "fit.csv");
    json summary{{"experiment", "fit"},
                 {"input", cfg.fit_input},
                 {"rows", cfg.fit_rows},
                 {"points", data.size()},
                 {"fit", fit_json(f)}};
    return run.finish(std::move(summary));
}

}  // namespace

ExperimentResult run_experiment(ExperimentKind kind, const ExperimentConfig& cfg,
                                const std::filesystem::path& out_dir, bool parallel) {
    cfg.solver.validate();
    Run run(cfg, out_dir, parallel);
    switch (kind) {
        case ExperimentKind::Fit: return run_fit(run);
        case ExperimentKind::Region: return run_region(run);
        case ExperimentKind::Wsr: return run_wsr(run);
        case ExperimentKind::SumRate: return run_sumrate(run);
        case ExperimentKind::Ofdm: return run_ofdm(run);
        case ExperimentKind::DpdSweep: return run_dpd_sweep(run);
    }
    throw std::logic_error("unknown experiment kind");
}

}  // namespace noma::cli
