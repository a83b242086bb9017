#include "noma/dpd_lab.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <mutex>
#include <ostream>
#include <random>
#include <stdexcept>

#include "noma/kernels.hpp"

namespace noma::dpd {

namespace {

// FFTW planning is not thread-safe; execution on distinct arrays is.
std::mutex& fftw_planner_mutex() {
    static std::mutex m;
    return m;
}

double power_dbm(double watts) { return 10.0 * std::log10(watts * 1000.0); }

double mean_power(const Signal& x) {
    double sum = 0.0;
    for (const auto& v : x) sum += std::norm(v);
    return sum / static_cast<double>(x.size());
}

}  // namespace

Signal generate_ofdm_waveform(std::size_t n, std::size_t cp, double total_power,
                              std::uint64_t seed, std::size_t frames) {
    if (n < 1) throw std::invalid_argument("waveform needs at least one subcarrier");
    if (frames < 1) throw std::invalid_argument("waveform needs at least one frame");
    if (cp > n) throw std::invalid_argument("cyclic prefix longer than the symbol");
    if (!(total_power >= 0.0)) throw std::invalid_argument("total_power must be >= 0");

    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, std::sqrt(0.5));

    fftw_complex* in = fftw_alloc_complex(n);
    fftw_complex* out = fftw_alloc_complex(n);
    fftw_plan plan;
    {
        std::lock_guard<std::mutex> lock(fftw_planner_mutex());
        plan = fftw_plan_dft_1d(static_cast<int>(n), in, out, FFTW_BACKWARD, FFTW_ESTIMATE);
    }

    const double scale = std::sqrt(total_power / static_cast<double>(n));
    Signal x;
    x.reserve(frames * (n + cp));
    for (std::size_t f = 0; f < frames; ++f) {
        for (std::size_t m = 0; m < n; ++m) {
            in[m][0] = normal(rng);
            in[m][1] = normal(rng);
        }
        fftw_execute(plan);
        for (std::size_t i = n - cp; i < n; ++i) x.emplace_back(out[i][0] * scale, out[i][1] * scale);
        for (std::size_t i = 0; i < n; ++i) x.emplace_back(out[i][0] * scale, out[i][1] * scale);
    }

    {
        std::lock_guard<std::mutex> lock(fftw_planner_mutex());
        fftw_destroy_plan(plan);
    }
    fftw_free(in);
    fftw_free(out);
    return x;
}

void SyntheticPa::validate() const {
    if (!(smoothness > 0.0)) throw std::invalid_argument("SyntheticPa: smoothness must be > 0");
    if (!(saturation_amplitude > 0.0)) {
        throw std::invalid_argument("SyntheticPa: saturation_amplitude must be > 0");
    }
    if (!(linear_gain > 0.0)) throw std::invalid_argument("SyntheticPa: linear_gain must be > 0");
    if (memory_taps.empty()) throw std::invalid_argument("SyntheticPa: memory_taps is empty");
}

Signal SyntheticPa::apply(const Signal& x) const {
    validate();
    Signal y(x.size());
    const double two_s = 2.0 * smoothness;
    for (std::size_t n = 0; n < x.size(); ++n) {
        cplx v = 0.0;
        for (std::size_t t = 0; t < memory_taps.size() && t <= n; ++t) v += memory_taps[t] * x[n - t];
        const double r = std::abs(v) / saturation_amplitude;
        y[n] = linear_gain * v / std::pow(1.0 + std::pow(r, two_s), 1.0 / two_s);
    }
    return y;
}

std::size_t GmpStructure::term_count() const {
    return p_a * l_a + p_b * l_b * q_b + p_c * l_c * q_c;
}

std::size_t GmpStructure::first_row() const {
    std::size_t first = 0;
    if (p_a * l_a > 0) first = std::max(first, l_a - 1);
    if (p_b * l_b * q_b > 0) first = std::max(first, l_b - 1 + q_b);
    if (p_c * l_c * q_c > 0) first = std::max(first, l_c - 1);
    return first;
}

std::size_t GmpStructure::trailing() const { return p_c * l_c * q_c > 0 ? q_c : 0; }

void GmpStructure::validate() const {
    if (term_count() == 0) throw std::invalid_argument("GMP structure has no terms");
}

GmpStructure GmpStructure::memory_polynomial(std::size_t p, std::size_t l) {
    GmpStructure g;
    g.p_a = p;
    g.l_a = l;
    return g;
}

namespace {

// Basis value of column j at sample n; samples outside [0, len) read as zero.
template <typename Emit>
void for_each_term(const GmpStructure& g, Emit&& emit) {
    for (std::size_t p = 0; p < g.p_a; ++p)
        for (std::size_t l = 0; l < g.l_a; ++l) emit(p, l, std::ptrdiff_t{0});
    for (std::size_t p = 1; p <= g.p_b; ++p)
        for (std::size_t l = 0; l < g.l_b; ++l)
            for (std::size_t q = 1; q <= g.q_b; ++q) emit(p, l, -static_cast<std::ptrdiff_t>(q));
    for (std::size_t p = 1; p <= g.p_c; ++p)
        for (std::size_t l = 0; l < g.l_c; ++l)
            for (std::size_t q = 1; q <= g.q_c; ++q) emit(p, l, static_cast<std::ptrdiff_t>(q));
}

cplx sample(const Signal& u, std::ptrdiff_t i) {
    if (i < 0 || i >= static_cast<std::ptrdiff_t>(u.size())) return 0.0;
    return u[static_cast<std::size_t>(i)];
}

// Fills column by column; `rows` lists the sample index of each row.
Eigen::MatrixXcd build_basis(const Signal& u, const GmpStructure& g, std::size_t first,
                             std::size_t count) {
    Eigen::MatrixXcd m(static_cast<Eigen::Index>(count), static_cast<Eigen::Index>(g.term_count()));
    Eigen::Index col = 0;
    for_each_term(g, [&](std::size_t p, std::size_t l, std::ptrdiff_t shift) {
        for (std::size_t r = 0; r < count; ++r) {
            const auto n = static_cast<std::ptrdiff_t>(first + r);
            const cplx signal = sample(u, n - static_cast<std::ptrdiff_t>(l));
            // shift < 0 lags the envelope, shift > 0 leads it.
            const cplx env = sample(u, n - static_cast<std::ptrdiff_t>(l) + shift);
            m(static_cast<Eigen::Index>(r), col) =
                signal * std::pow(std::abs(env), static_cast<double>(p));
        }
        ++col;
    });
    return m;
}

}  // namespace

Eigen::MatrixXcd gmp_basis(const Signal& u, const GmpStructure& g) {
    g.validate();
    const std::size_t first = g.first_row();
    const std::size_t tail = g.trailing();
    if (u.size() <= first + tail) throw std::invalid_argument("sequence too short for GMP basis");
    return build_basis(u, g, first, u.size() - first - tail);
}

Signal gmp_apply(const Signal& u, const GmpStructure& g, const Eigen::VectorXcd& theta) {
    g.validate();
    if (static_cast<std::size_t>(theta.size()) != g.term_count()) {
        throw std::invalid_argument("coefficient count does not match GMP structure");
    }
    const Eigen::VectorXcd x = build_basis(u, g, 0, u.size()) * theta;
    return Signal(x.data(), x.data() + x.size());
}

DpdCoefficients ls_fit(const Eigen::MatrixXcd& design, const Eigen::VectorXcd& target) {
    if (design.rows() != target.size()) throw std::invalid_argument("ls_fit: size mismatch");
    if (design.rows() < design.cols()) throw std::invalid_argument("ls_fit: fewer rows than columns");
    DpdCoefficients out;
    Eigen::ColPivHouseholderQR<Eigen::MatrixXcd> qr(design);
    if (qr.rank() == design.cols()) {
        out.theta = qr.solve(target);
        return out;
    }
    const Eigen::MatrixXcd gram = design.adjoint() * design;
    const double ridge = 1e-10 * std::max(gram.trace().real() / static_cast<double>(design.cols()), 1e-300);
    const Eigen::MatrixXcd reg =
        gram + ridge * Eigen::MatrixXcd::Identity(design.cols(), design.cols());
    out.theta = reg.ldlt().solve(design.adjoint() * target);
    out.regularized = true;
    return out;
}

Bussgang bussgang_decompose(const Signal& u, const Signal& y) {
    if (u.size() != y.size()) throw std::invalid_argument("bussgang: length mismatch");
    cplx yu = 0.0;
    double uu = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) {
        yu += y[i] * std::conj(u[i]);
        uu += std::norm(u[i]);
    }
    if (!(uu > 0.0)) throw std::invalid_argument("bussgang: input has zero power");
    Bussgang b{yu / uu, Signal(y.size())};
    for (std::size_t i = 0; i < y.size(); ++i) b.residual[i] = y[i] - b.gain * u[i];
    return b;
}

double measure_nmse(const Signal& u, const Signal& y, cplx gain) {
    if (u.size() != y.size()) throw std::invalid_argument("measure_nmse: length mismatch");
    double err = 0.0;
    double ref = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) {
        err += std::norm(y[i] - gain * u[i]);
        ref += std::norm(y[i]);
    }
    if (!(ref > 0.0)) throw std::invalid_argument("measure_nmse: output has zero power");
    if (err == 0.0) return kNmseFloorDb;
    return std::max(kNmseFloorDb, 10.0 * std::log10(err / ref));
}

TrainResult dpd_train_indirect(const Signal& u, const SyntheticPa& pa, const GmpStructure& g,
                               int iters) {
    if (iters < 1) throw std::invalid_argument("dpd_train_indirect: iters must be >= 1");
    g.validate();
    if (g.p_a == 0 || g.l_a == 0) {
        throw std::invalid_argument("dpd_train_indirect: structure needs the linear aligned term");
    }
    const std::size_t first = g.first_row();
    const std::size_t rows = u.size() - std::min(u.size(), first + g.trailing());

    Eigen::VectorXcd theta = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(g.term_count()));
    theta[0] = 1.0;  // (p, l) = (0, 0): pass-through

    TrainResult result;
    double best = std::numeric_limits<double>::infinity();
    int worse_streak = 0;
    for (int it = 0; it <= iters; ++it) {
        const Signal x = gmp_apply(u, g, theta);
        const Signal y = pa.apply(x);
        const Bussgang b = bussgang_decompose(u, y);
        const double nmse = measure_nmse(u, y, b.gain);
        if (!result.nmse_history.empty() && nmse > result.nmse_history.back()) {
            ++worse_streak;
        } else {
            worse_streak = 0;
        }
        result.nmse_history.push_back(nmse);
        if (nmse < best) {
            best = nmse;
            result.coefficients.theta = theta;
        }
        if (worse_streak >= 3) {
            result.diverged = true;
            break;
        }
        if (it == iters) break;

        Signal y_hat(y.size());
        for (std::size_t i = 0; i < y.size(); ++i) y_hat[i] = y[i] / b.gain;
        const Eigen::MatrixXcd design = gmp_basis(y_hat, g);
        Eigen::VectorXcd target(static_cast<Eigen::Index>(rows));
        for (std::size_t r = 0; r < rows; ++r) target[static_cast<Eigen::Index>(r)] = x[first + r];
        const DpdCoefficients fit = ls_fit(design, target);
        theta = fit.theta;
        result.coefficients.regularized = result.coefficients.regularized || fit.regularized;
    }
    return result;
}

PowerLawFit fit_power_law(const std::vector<NmseMeasurement>& data) {
    if (data.size() < 2) throw std::invalid_argument("fit_power_law: need at least two measurements");
    const double n = static_cast<double>(data.size());
    double mx = 0.0, my = 0.0;
    for (const auto& d : data) {
        if (!(d.p_out > 0.0)) throw std::invalid_argument("fit_power_law: p_out must be > 0");
        mx += power_dbm(d.p_out);
        my += d.nmse_db;
    }
    mx /= n;
    my /= n;
    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (const auto& d : data) {
        const double dx = power_dbm(d.p_out) - mx;
        const double dy = d.nmse_db - my;
        sxx += dx * dx;
        sxy += dx * dy;
        syy += dy * dy;
    }
    if (!(sxx > 1e-12 * n)) throw std::invalid_argument("fit_power_law: output powers do not vary");
    RegressionForm reg{sxy / sxx, 0.0};
    reg.k2 = my - reg.k1 * mx;
    double ss_res = 0.0;
    for (const auto& d : data) {
        const double r = d.nmse_db - (reg.k1 * power_dbm(d.p_out) + reg.k2);
        ss_res += r * r;
    }
    const double r2 = syy > 0.0 ? 1.0 - ss_res / syy : 1.0;
    return {to_power_law(reg), reg, r2};
}

void SweepConfig::validate() const {
    if (!(step_db > 0.0)) throw std::invalid_argument("sweep: step_db must be > 0");
    if (!(p_max_dbm >= p_min_dbm)) throw std::invalid_argument("sweep: p_max_dbm < p_min_dbm");
    if (n_subcarriers < 1 || frames < 1) throw std::invalid_argument("sweep: empty waveform");
    if (dpd_iters < 1) throw std::invalid_argument("sweep: dpd_iters must be >= 1");
    structure.validate();
    pa.validate();
}

std::vector<SweepRow> run_sweep(const SweepConfig& cfg, bool parallel) {
    cfg.validate();
    const Signal unit = generate_ofdm_waveform(cfg.n_subcarriers, cfg.cp_len, 1.0, cfg.seed, cfg.frames);
    const auto levels =
        static_cast<std::size_t>(std::floor((cfg.p_max_dbm - cfg.p_min_dbm) / cfg.step_db + 1e-9)) + 1;
    std::vector<SweepRow> rows(levels);
    kernels::for_each_index(
        levels,
        [&](std::size_t i) {
            const double dbm = cfg.p_min_dbm + cfg.step_db * static_cast<double>(i);
            const double p_in = std::pow(10.0, (dbm - 30.0) / 10.0) /
                                (cfg.pa.linear_gain * cfg.pa.linear_gain);
            Signal u = unit;
            for (auto& v : u) v *= std::sqrt(p_in);

            const Signal y0 = cfg.pa.apply(u);
            const double n0 = measure_nmse(u, y0, bussgang_decompose(u, y0).gain);

            const TrainResult tr = dpd_train_indirect(u, cfg.pa, cfg.structure, cfg.dpd_iters);
            const Signal y1 = cfg.pa.apply(gmp_apply(u, cfg.structure, tr.coefficients.theta));
            const double n1 = measure_nmse(u, y1, bussgang_decompose(u, y1).gain);

            rows[i] = {dbm, {mean_power(y0), n0}, {mean_power(y1), n1}, tr.diverged};
        },
        parallel);
    return rows;
}

std::vector<NmseMeasurement> sweep_measurements(const std::vector<SweepRow>& rows, bool dpd) {
    std::vector<NmseMeasurement> out;
    for (const auto& r : rows) out.push_back(dpd ? r.with_dpd : r.without_dpd);
    return out;
}

void write_sweep_csv(std::ostream& os, const std::vector<SweepRow>& rows, std::uint64_t seed) {
    os << "p_out_dBm,nmse_db,dpd_enabled,seed\n";
    char line[128];
    for (int dpd = 0; dpd < 2; ++dpd) {
        for (const auto& r : rows) {
            const auto& m = dpd ? r.with_dpd : r.without_dpd;
            std::snprintf(line, sizeof line, "%.6f,%.6f,%d,%llu\n", power_dbm(m.p_out), m.nmse_db,
                          dpd, static_cast<unsigned long long>(seed));
            os << line;
        }
    }
}

}  // namespace noma::dpd
