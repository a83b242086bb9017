#include <doctest.h>

#include <random>
#include <sstream>

#include "noma/dpd_lab.hpp"
#include "oracles.hpp"

using namespace noma;
using namespace noma::dpd;

namespace {

double power(const Signal& x) {
    double p = 0.0;
    for (const auto& v : x) p += std::norm(v);
    return p / static_cast<double>(x.size());
}

Signal random_signal(std::size_t n, std::uint64_t seed, double scale = 1.0) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> g(0.0, scale);
    Signal x(n);
    for (auto& v : x) v = {g(rng), g(rng)};
    return x;
}

}  // namespace

TEST_CASE("waveform power and repeatability") {
    const auto x = generate_ofdm_waveform(64, 16, 0.5, 3, 1250);
    CHECK(x.size() == 80 * 1250);
    CHECK(power(x) == doctest::Approx(0.5).epsilon(0.01));
    CHECK(x == generate_ofdm_waveform(64, 16, 0.5, 3, 1250));
    CHECK(x != generate_ofdm_waveform(64, 16, 0.5, 4, 1250));
    // Cyclic prefix copies the tail of the symbol.
    for (std::size_t i = 0; i < 16; ++i) CHECK(x[i] == x[64 + i]);
    CHECK_THROWS(generate_ofdm_waveform(0, 0, 1.0, 1));
}

TEST_CASE("waveform peak to average ratio") {
    int above = 0;
    for (std::uint64_t seed = 0; seed < 1000; ++seed) {
        const auto x = generate_ofdm_waveform(64, 0, 1.0, seed);
        double peak = 0.0;
        for (const auto& v : x) peak = std::max(peak, std::norm(v));
        above += 10.0 * std::log10(peak / power(x)) > 3.0 ? 1 : 0;
    }
    CHECK(above > 990);
}

TEST_CASE("synthetic PA limits") {
    const SyntheticPa pa;
    const Signal tiny{{1e-6, -2e-6}, {3e-6, 0.0}};
    SyntheticPa memoryless = pa;
    memoryless.memory_taps = {1.0};
    const auto y = memoryless.apply(tiny);
    for (std::size_t i = 0; i < tiny.size(); ++i) {
        CHECK(std::abs(y[i] - pa.linear_gain * tiny[i]) <= 1e-3 * std::abs(pa.linear_gain * tiny[i]));
    }
    const auto big = memoryless.apply(Signal{{1e12, 0.0}});
    CHECK(std::abs(big[0]) == doctest::Approx(pa.linear_gain * pa.saturation_amplitude).epsilon(1e-6));
    const auto x = random_signal(1000, 1, 10.0);
    for (const auto& v : pa.apply(x)) CHECK(std::abs(v) <= pa.saturation_amplitude * pa.linear_gain * (1 + 1e-12));
    SyntheticPa bad = pa;
    bad.smoothness = 0.0;
    CHECK_THROWS(bad.validate());
}

TEST_CASE("GMP basis structure") {
    const auto u = random_signal(50, 2);
    const auto m = gmp_basis(u, GmpStructure::memory_polynomial(1, 1));
    REQUIRE(m.cols() == 1);
    for (Eigen::Index r = 0; r < m.rows(); ++r) CHECK(m(r, 0) == u[static_cast<std::size_t>(r)]);

    Signal cm(20);
    for (std::size_t i = 0; i < cm.size(); ++i) cm[i] = std::polar(2.0, 0.3 * i);
    const auto a = gmp_basis(cm, GmpStructure::memory_polynomial(3, 1));
    for (Eigen::Index r = 0; r < a.rows(); ++r) {
        CHECK(std::abs(a(r, 1) - 2.0 * a(r, 0)) < 1e-12);
        CHECK(std::abs(a(r, 2) - 4.0 * a(r, 0)) < 1e-12);
    }
    CHECK(GmpStructure::memory_polynomial(5, 5).term_count() == 25);
    CHECK_THROWS(gmp_basis(Signal(3), GmpStructure::memory_polynomial(5, 5)));
    CHECK_THROWS(GmpStructure{0, 0}.validate());
}

TEST_CASE("GMP basis against the scalar oracle") {
    const auto u = random_signal(60, 4);
    const GmpStructure g{3, 3, 2, 2, 2, 2, 2, 1};
    const auto m = gmp_basis(u, g);
    REQUIRE(static_cast<std::size_t>(m.cols()) == g.term_count());
    std::mt19937_64 rng(5);
    std::normal_distribution<double> n(0.0, 1.0);
    std::vector<std::complex<double>> theta(g.term_count());
    for (auto& t : theta) t = {n(rng), n(rng)};
    Eigen::VectorXcd th(static_cast<Eigen::Index>(theta.size()));
    for (std::size_t i = 0; i < theta.size(); ++i) th[static_cast<Eigen::Index>(i)] = theta[i];
    const Eigen::VectorXcd rows = m * th;
    const auto full = gmp_apply(u, g, th);
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        const long n_idx = static_cast<long>(g.first_row()) + r;
        const auto ref = oracle::gmp_sample(u, n_idx, 3, 3, 2, 2, 2, 2, 2, 1, theta);
        CHECK(std::abs(rows[r] - ref) <= 1e-12 * (1.0 + std::abs(ref)));
    }
    for (long i = 0; i < static_cast<long>(u.size()); ++i) {
        const auto ref = oracle::gmp_sample(u, i, 3, 3, 2, 2, 2, 2, 2, 1, theta);
        CHECK(std::abs(full[static_cast<std::size_t>(i)] - ref) <= 1e-12 * (1.0 + std::abs(ref)));
    }
}

TEST_CASE("least squares") {
    const auto u = random_signal(400, 6);
    const auto m = gmp_basis(u, GmpStructure::memory_polynomial(3, 2));
    Eigen::VectorXcd truth(m.cols());
    for (Eigen::Index i = 0; i < truth.size(); ++i) truth[i] = {0.1 * i, -0.05 * i + 1.0};
    const auto exact = ls_fit(m, m * truth);
    CHECK_FALSE(exact.regularized);
    CHECK((exact.theta - truth).norm() <= 1e-10 * truth.norm());

    // Orthogonal target.
    Eigen::MatrixXcd a = Eigen::MatrixXcd::Zero(4, 2);
    a(0, 0) = 1.0;
    a(1, 1) = 1.0;
    Eigen::VectorXcd t = Eigen::VectorXcd::Zero(4);
    t[2] = 1.0;
    CHECK(ls_fit(a, t).theta.norm() == 0.0);

    // Noisy target against long-double normal equations.
    const auto noise = random_signal(static_cast<std::size_t>(m.rows()), 7, 0.1);
    Eigen::VectorXcd target = m * truth;
    for (Eigen::Index i = 0; i < target.size(); ++i) target[i] += noise[static_cast<std::size_t>(i)];
    const auto fit = ls_fit(m, target);
    std::vector<std::complex<double>> flat, b;
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        for (Eigen::Index c = 0; c < m.cols(); ++c) flat.push_back(m(r, c));
        b.push_back(target[r]);
    }
    const auto ref = oracle::normal_equations(flat, m.rows(), m.cols(), b);
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
        CHECK(std::abs(fit.theta[c] - std::complex<double>(ref[c])) <= 1e-9 * (1.0 + std::abs(fit.theta[c])));
    }
    // Residual orthogonal to the columns.
    const Eigen::VectorXcd res = target - m * fit.theta;
    CHECK((m.adjoint() * res).norm() <= 1e-9 * m.norm() * target.norm());

    Eigen::MatrixXcd dup(5, 2);
    dup.col(0) = Eigen::VectorXcd::Ones(5);
    dup.col(1) = Eigen::VectorXcd::Ones(5);
    const auto reg = ls_fit(dup, Eigen::VectorXcd::Ones(5));
    CHECK(reg.regularized);
    CHECK(reg.theta.allFinite());
}

TEST_CASE("Bussgang decomposition") {
    const auto u = random_signal(500, 8);
    Signal y2(u.size());
    for (std::size_t i = 0; i < u.size(); ++i) y2[i] = 2.0 * u[i];
    const auto b = bussgang_decompose(u, y2);
    CHECK(std::abs(b.gain - 2.0) < 1e-14);
    for (const auto& e : b.residual) CHECK(std::abs(e) < 1e-14);
    CHECK(measure_nmse(u, y2, b.gain) == kNmseFloorDb);

    const Signal a{{1, 0}, {0, 0}}, c{{0, 0}, {0, 1}};
    const auto orth = bussgang_decompose(a, c);
    CHECK(orth.gain == std::complex<double>(0.0, 0.0));
    CHECK(orth.residual == c);
    CHECK(measure_nmse(a, c, 0.0) == doctest::Approx(0.0));
    CHECK_THROWS(bussgang_decompose(Signal(3), Signal(3)));
    CHECK_THROWS(measure_nmse(a, Signal(2), 1.0));

    // Saturated PA output: power accounting and orthogonality.
    const SyntheticPa pa;
    const auto x = generate_ofdm_waveform(64, 16, 4.0, 9, 20);
    const auto y = pa.apply(x);
    const auto d = bussgang_decompose(x, y);
    double uu = 0, yy = 0, ee = 0;
    std::complex<double> ue = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        uu += std::norm(x[i]);
        yy += std::norm(y[i]);
        ee += std::norm(d.residual[i]);
        ue += x[i] * std::conj(d.residual[i]);
    }
    CHECK(std::abs(yy - (std::norm(d.gain) * uu + ee)) <= 1e-9 * yy);
    CHECK(std::abs(ue) / std::sqrt(uu * ee) < 1e-6);
    CHECK(measure_nmse(x, y, d.gain) == doctest::Approx(10.0 * std::log10(ee / yy)).epsilon(1e-12));
}

TEST_CASE("indirect learning") {
    SyntheticPa linear;
    linear.saturation_amplitude = 1e6;
    linear.smoothness = 50.0;
    linear.memory_taps = {1.0};
    const auto u = generate_ofdm_waveform(64, 16, 0.1, 1, 10);
    const auto lin = dpd_train_indirect(u, linear, GmpStructure::memory_polynomial(3, 2), 3);
    CHECK(std::abs(lin.coefficients.theta[0] - 1.0) < 1e-6);
    for (Eigen::Index i = 1; i < lin.coefficients.theta.size(); ++i) CHECK(std::abs(lin.coefficients.theta[i]) < 1e-6);

    const SyntheticPa pa;
    const double g2 = pa.linear_gain * pa.linear_gain;
    const auto x = generate_ofdm_waveform(64, 16, std::pow(10.0, (30.0 - 30.0) / 10.0) / g2, 2, 30);
    const auto res = dpd_train_indirect(x, pa, GmpStructure{}, 3);
    REQUIRE(res.nmse_history.size() >= 2);
    const double best = *std::min_element(res.nmse_history.begin(), res.nmse_history.end());
    CHECK(res.nmse_history.front() - best >= 5.0);
    CHECK_FALSE(res.diverged);
    CHECK_THROWS(dpd_train_indirect(x, pa, GmpStructure{}, 0));
}

TEST_CASE("power-law fit") {
    const PaModel truth(0.0032, 1.3552);
    const RegressionForm reg = to_regression(truth);
    std::vector<NmseMeasurement> data;
    for (double dbm = 20.0; dbm <= 36.0; dbm += 1.0) {
        const double p = std::pow(10.0, (dbm - 30.0) / 10.0);
        data.push_back({p, nmse_db(p, reg)});
    }
    const auto f = fit_power_law(data);
    CHECK(f.model.a() == doctest::Approx(0.0032).epsilon(1e-9));
    CHECK(f.model.alpha() == doctest::Approx(1.3552).epsilon(1e-9));
    CHECK(f.r_squared == doctest::Approx(1.0).epsilon(1e-12));

    const auto two = fit_power_law({{0.1, -30.0}, {1.0, -25.0}});
    CHECK(two.regression.k1 == doctest::Approx(0.5));
    CHECK(two.r_squared == doctest::Approx(1.0));
    CHECK_THROWS(fit_power_law({{0.1, -30.0}, {0.1, -25.0}}));
    CHECK_THROWS(fit_power_law({{0.1, -30.0}}));
}

TEST_CASE("sweep on the default PA") {
    SweepConfig cfg;
    const auto rows = run_sweep(cfg);
    REQUIRE(rows.size() == 17);
    for (const auto& r : rows) {
        CHECK(r.with_dpd.nmse_db < r.without_dpd.nmse_db);
        CHECK(r.without_dpd.p_out > 0.0);
    }
    for (std::size_t i = 1; i < rows.size(); ++i) CHECK(rows[i].without_dpd.nmse_db > rows[i - 1].without_dpd.nmse_db);
    const auto raw = fit_power_law(sweep_measurements(rows, false));
    const auto pre = fit_power_law(sweep_measurements(rows, true));
    CHECK(raw.r_squared > 0.9);
    CHECK(raw.model.alpha() > 1.2);
    CHECK(raw.model.alpha() < 1.5);
    CHECK(raw.regression.k1 > 0.0);
    // Directional: predistortion lowers a and raises alpha.
    CHECK(pre.model.alpha() > raw.model.alpha());
    CHECK(pre.model.a() < raw.model.a());

    const auto serial = run_sweep(cfg, false);
    for (std::size_t i = 0; i < rows.size(); ++i) {
        CHECK(rows[i].with_dpd.nmse_db == serial[i].with_dpd.nmse_db);
        CHECK(rows[i].without_dpd.p_out == serial[i].without_dpd.p_out);
    }

    std::ostringstream os;
    write_sweep_csv(os, rows, cfg.seed);
    std::istringstream is(os.str());
    std::string line;
    std::getline(is, line);
    CHECK(line == "p_out_dBm,nmse_db,dpd_enabled,seed");
    int n = 0;
    while (std::getline(is, line)) ++n;
    CHECK(n == 34);
}
