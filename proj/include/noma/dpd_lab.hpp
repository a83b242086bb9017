#pragma once

#include <Eigen/Dense>

#include <complex>
#include <cstdint>
#include <iosfwd>
#include <vector>

#include "noma/pa_model.hpp"

namespace noma::dpd {

using cplx = std::complex<double>;
using Signal = std::vector<cplx>;

/// OFDM frames: i.i.d. CN(0,1) subcarrier symbols, unitary IFFT, cyclic
/// prefix, scaled so the expected sample power equals total_power.
Signal generate_ofdm_waveform(std::size_t n, std::size_t cp, double total_power,
                              std::uint64_t seed, std::size_t frames = 1);

/// Behavioral PA: FIR memory followed by a Rapp soft limiter.
struct SyntheticPa {
    double smoothness = 0.3;
    double saturation_amplitude = 3.0;
    double linear_gain = 10.0;
    std::vector<double> memory_taps{1.0, 0.03};

    void validate() const;
    Signal apply(const Signal& x) const;
};

/// Generalized memory polynomial shape. Aligned terms use orders 0..P_a-1,
/// cross terms use orders 1..P and delays 1..Q.
struct GmpStructure {
    std::size_t p_a = 5, l_a = 5;
    std::size_t p_b = 0, l_b = 0, q_b = 0;
    std::size_t p_c = 0, l_c = 0, q_c = 0;

    std::size_t term_count() const;
    /// Samples needed before the first and after the last fully defined row.
    std::size_t first_row() const;
    std::size_t trailing() const;
    void validate() const;

    /// Aligned terms only; (5, 5) is the 5-5-0 structure.
    static GmpStructure memory_polynomial(std::size_t p, std::size_t l);
};

/// Rows are the valid sample indices [first_row, len - trailing); columns are
/// aligned, lagging, leading terms, each ordered by (p, l, q).
Eigen::MatrixXcd gmp_basis(const Signal& u, const GmpStructure& g);

/// GMP output over the full length, samples outside the input taken as zero.
Signal gmp_apply(const Signal& u, const GmpStructure& g, const Eigen::VectorXcd& theta);

struct DpdCoefficients {
    Eigen::VectorXcd theta;
    bool regularized = false;   ///< rank-deficient design, ridge solution used
};

/// Least squares via column-pivoted QR; ridge fallback when rank deficient.
DpdCoefficients ls_fit(const Eigen::MatrixXcd& design, const Eigen::VectorXcd& target);

struct Bussgang {
    cplx gain;
    Signal residual;
};

/// G = <y, u> / <u, u> with <x, y> = sum x conj(y); e = y - G u.
Bussgang bussgang_decompose(const Signal& u, const Signal& y);

inline constexpr double kNmseFloorDb = -200.0;

/// 10 log10(||y - G u||^2 / ||y||^2), floored at kNmseFloorDb.
double measure_nmse(const Signal& u, const Signal& y, cplx gain);

struct TrainResult {
    DpdCoefficients coefficients;        ///< best iterate
    std::vector<double> nmse_history;    ///< NMSE of each evaluated iterate
    bool diverged = false;
};

/// Indirect learning: x = DPD(u), y = PA(x), fit the postinverse on y / G.
TrainResult dpd_train_indirect(const Signal& u, const SyntheticPa& pa, const GmpStructure& g,
                               int iters);

struct NmseMeasurement {
    double p_out;    ///< W
    double nmse_db;
};

struct PowerLawFit {
    PaModel model;
    RegressionForm regression;
    double r_squared;
};

/// Ordinary least squares of nmse_db on 10 log10(1000 p_out).
PowerLawFit fit_power_law(const std::vector<NmseMeasurement>& data);

struct SweepConfig {
    double p_min_dbm = 20.0;
    double p_max_dbm = 36.0;
    double step_db = 1.0;
    std::size_t n_subcarriers = 64;
    std::size_t cp_len = 16;
    std::size_t frames = 30;
    std::uint64_t seed = 1;
    int dpd_iters = 3;
    GmpStructure structure{};
    SyntheticPa pa{};

    void validate() const;
};

struct SweepRow {
    double target_dbm;
    NmseMeasurement without_dpd;
    NmseMeasurement with_dpd;
    bool diverged;
};

/// Drives the PA at input power P/G^2 for each target output level P, with
/// and without a trained predistorter. Levels run in parallel.
std::vector<SweepRow> run_sweep(const SweepConfig& cfg, bool parallel = true);

std::vector<NmseMeasurement> sweep_measurements(const std::vector<SweepRow>& rows, bool dpd);

/// CSV with header p_out_dBm,nmse_db,dpd_enabled,seed.
void write_sweep_csv(std::ostream& os, const std::vector<SweepRow>& rows, std::uint64_t seed);

}  // namespace noma::dpd
