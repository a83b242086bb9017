#include <doctest.h>

#include <fstream>
#include <sstream>
#include <unistd.h>

#include "fixtures.hpp"
#include "noma/experiment.hpp"

using namespace noma;
using namespace noma::cli;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
    const fs::path p = fs::temp_directory_path() / ("noma_test_" + std::to_string(getpid())) / name;
    fs::remove_all(p);
    return p;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

std::vector<std::vector<std::string>> read_csv(const fs::path& p) {
    std::vector<std::vector<std::string>> rows;
    std::istringstream in(slurp(p));
    std::string line;
    while (std::getline(in, line)) {
        std::vector<std::string> f;
        std::stringstream ss(line);
        std::string c;
        while (std::getline(ss, c, ',')) f.push_back(c);
        if (!line.empty() && line.back() == ',') f.emplace_back();
        rows.push_back(f);
    }
    return rows;
}

// Every (x_w, x_dbm) column pair must satisfy W = 10^((dBm - 30)/10).
void audit_units(const fs::path& p) {
    const auto rows = read_csv(p);
    REQUIRE_FALSE(rows.empty());
    const auto& h = rows[0];
    for (std::size_t c = 0; c < h.size(); ++c) {
        if (h[c].size() < 2 || h[c].substr(h[c].size() - 2) != "_w") continue;
        const std::string twin = h[c].substr(0, h[c].size() - 2) + "_dbm";
        const auto it = std::find(h.begin(), h.end(), twin);
        REQUIRE(it != h.end());
        const std::size_t d = static_cast<std::size_t>(it - h.begin());
        for (std::size_t r = 1; r < rows.size(); ++r) {
            if (rows[r][c].empty()) continue;
            const double w = std::stod(rows[r][c]);
            if (w == 0.0) continue;
            const double dbm = std::stod(rows[r][d]);
            CHECK(std::abs(fixture::watts(dbm) - w) <= 1e-12 * w);
        }
    }
}

ExperimentConfig parse(const std::string& text) {
    std::istringstream in(text);
    return parse_config(in, "test.cfg");
}

}  // namespace

TEST_CASE("config parsing") {
    const auto cfg = parse(
        "# comment\n"
        "distances = 100, 50   # meters\n"
        "pa.source = regression\n"
        "pa.k1 = 0.4\n"
        "solver.tau_grid = 17\n"
        "wsr.orders = 1->2, 2->1\n"
        "dpd.structure = 3,2,0,0,0,0,0,0\n");
    CHECK(cfg.distances == std::vector<double>{100.0, 50.0});
    CHECK(cfg.pa_source == PaSource::Regression);
    CHECK(cfg.pa_k1 == 0.4);
    CHECK(cfg.solver.tau_grid == 17);
    CHECK(cfg.wsr_orders.size() == 2);
    CHECK(cfg.dpd.structure.term_count() == 6);
    CHECK(resolve_pa_model(cfg).alpha() == doctest::Approx(1.4));
}

TEST_CASE("config errors name the field and line") {
    auto message = [](const std::string& text) {
        try {
            parse(text);
        } catch (const std::invalid_argument& e) {
            return std::string(e.what());
        }
        return std::string();
    };
    const auto unknown = message("seed = 1\nbogus = 3\n");
    CHECK(unknown.find("test.cfg:2") != std::string::npos);
    CHECK(unknown.find("bogus") != std::string::npos);
    const auto bad = message("bandwidth = -5\n");
    CHECK(bad.find("bandwidth") != std::string::npos);
    CHECK(message("carrier_freq = fast\n").find("carrier_freq") != std::string::npos);
    CHECK(message("distances = 1,,2\n").find("distances") != std::string::npos);
    CHECK(message("no equals sign\n").find("test.cfg:1") != std::string::npos);
    CHECK(message("solver.tau_grid = 1\n").find("tau_grid") != std::string::npos);
    CHECK_THROWS(load_config("/nonexistent/file.cfg"));
}

TEST_CASE("path loss") {
    // sigma = 2, G_A = 1 is the Friis form.
    const double lambda = 3e8 / 2.4e9;
    CHECK(pathloss_gain(100.0, 2.4e9, 2.0, 1.0) ==
          doctest::Approx(std::pow(lambda / (4.0 * fixture::kPi * 100.0), 2)).epsilon(1e-14));
    const long double ref =
        4.11L * std::pow(3e8L / (4.0L * 3.14159265358979323846264L * 2.4e9L * 80.0L), 2.6L);
    CHECK(pathloss_gain(80.0, 2.4e9, 2.6, 4.11) == doctest::Approx((double)ref).epsilon(1e-13));
    CHECK(pathloss_gain(80.0, 2.4e9, 2.6, 4.11) == doctest::Approx(2.88e-10).epsilon(0.005));
    double prev = kInf;
    for (double d = 10.0; d < 500.0; d += 10.0) {
        const double g = pathloss_gain(d, 2.4e9, 2.6, 4.11);
        CHECK(g < prev);
        prev = g;
    }
    CHECK_THROWS(pathloss_gain(0.0, 2.4e9, 2.6, 4.11));
}

TEST_CASE("scenario construction") {
    ExperimentConfig cfg;
    CHECK(resolve_distances(cfg) == std::vector<double>{120.0, 80.0});
    CHECK(resolve_distances(cfg, 4) == std::vector<double>{60.0, 80.0, 100.0, 120.0});
    const Scenario s = build_scenario(cfg, resolve_pa_model(cfg));
    CHECK(s.noise_power() == doctest::Approx(fixture::noise(30e6)).epsilon(1e-14));
    CHECK(s.user(0).p_max == doctest::Approx(fixture::watts(36.0)));
    cfg.force_ideal = true;
    CHECK(resolve_pa_model(cfg).is_ideal());
}

TEST_CASE("dpd sweep, fit and determinism") {
    ExperimentConfig cfg;
    cfg.dpd.frames = 8;
    const auto a = run_experiment(ExperimentKind::DpdSweep, cfg, scratch("dpd_a"));
    const auto b = run_experiment(ExperimentKind::DpdSweep, cfg, scratch("dpd_b"), false);
    CHECK(a.exit_code == 0);
    for (const char* f : {"dpd_sweep.csv", "dpd_fit.csv"}) {
        CHECK(slurp(a.files[0].parent_path() / f) == slurp(b.files[0].parent_path() / f));
    }
    CHECK(a.summary["levels_improved"] == 17);

    ExperimentConfig fit;
    fit.fit_input = (a.files[0].parent_path() / "dpd_sweep.csv").string();
    fit.fit_rows = "0";
    const auto f = run_experiment(ExperimentKind::Fit, fit, scratch("fit"));
    CHECK(f.exit_code == 0);
    CHECK(f.summary["fit"]["alpha"].get<double>() ==
          doctest::Approx(a.summary["fit_without_dpd"]["alpha"].get<double>()).epsilon(1e-5));   // CSV keeps 6 decimals
    audit_units(f.files[0]);

    // A config can take its PA model from the sweep file.
    ExperimentConfig from_file;
    from_file.pa_source = PaSource::FitFile;
    from_file.pa_fit_file = fit.fit_input;
    from_file.pa_fit_dpd = true;
    CHECK(resolve_pa_model(from_file).alpha() ==
          doctest::Approx(a.summary["fit_with_dpd"]["alpha"].get<double>()).epsilon(1e-5));   // CSV keeps 6 decimals
}

TEST_CASE("region experiment reports both operating points") {
    ExperimentConfig cfg;
    cfg.solver.tau_grid = 21;
    const auto r = run_experiment(ExperimentKind::Region, cfg, scratch("region"));
    CHECK(r.exit_code == 0);
    CHECK(r.summary.contains("G"));
    CHECK(r.summary.contains("H"));
    CHECK(r.summary["gain_percent"].get<double>() > 0.0);
    for (const auto& f : r.files) {
        if (f.extension() == ".csv") audit_units(f);
    }
    const auto again = run_experiment(ExperimentKind::Region, cfg, scratch("region2"), false);
    CHECK(slurp(r.files[0]) == slurp(again.files[0]));
}

TEST_CASE("sumrate and wsr experiments") {
    ExperimentConfig cfg;
    cfg.sumrate_bandwidths = {30e6};
    cfg.sumrate_user_sweep = {2, 3};
    const auto s = run_experiment(ExperimentKind::SumRate, cfg, scratch("sumrate"));
    CHECK(s.exit_code == 0);
    const auto rows = read_csv(s.files[0]);
    for (std::size_t i = 1; i < rows.size(); ++i) CHECK(std::stod(rows[i][5]) >= std::stod(rows[i][6]));
    audit_units(s.files[1]);

    cfg.wsr_floor_sweep = {0.0, 1e7};
    const auto w = run_experiment(ExperimentKind::Wsr, cfg, scratch("wsr"));
    CHECK(w.exit_code == 0);
    const auto wr = read_csv(w.files[0]);
    for (std::size_t i = 1; i < wr.size(); ++i) {
        CHECK(std::stod(wr[i][3]) > std::stod(wr[i][4]));
        CHECK(std::stod(wr[i][5]) > 0.0);
    }
    audit_units(w.files[1]);
}

TEST_CASE("infeasible floors give a nonzero exit code") {
    ExperimentConfig cfg;
    cfg.sumrate_bandwidths = {30e6};
    cfg.sumrate_sigmas = {2.6};
    cfg.sumrate_users = 2;
    cfg.sumrate_user_sweep = {2};
    cfg.sumrate_floors = {1e9, 1e9};
    const auto r = run_experiment(ExperimentKind::SumRate, cfg, scratch("infeasible"));
    CHECK(r.exit_code != 0);
    CHECK_FALSE(r.diagnostics.empty());
    CHECK(r.diagnostics[0].find("infeasible") != std::string::npos);
}

TEST_CASE("ofdm experiment") {
    ExperimentConfig cfg;
    const auto r = run_experiment(ExperimentKind::Ofdm, cfg, scratch("ofdm"));
    CHECK(r.exit_code == 0);
    CHECK(r.summary["max_relative_error"].get<double>() <= 1e-12);
    CHECK(r.summary["allocation"]["grid_bits_per_s"].get<double>() >=
          r.summary["allocation"]["equal_split_bits_per_s"].get<double>() - 1e-6);
    audit_units(r.files[1]);
    CHECK(parse_kind("dpd-sweep") == ExperimentKind::DpdSweep);
    CHECK_THROWS(parse_kind("plot"));
}
