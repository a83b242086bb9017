#pragma once

// Internal helpers shared by the solvers. Everything works in normalized
// units: g_k = |h_k|^2 / N0, so the receiver noise is 1.

#include <Eigen/Dense>

#include <span>
#include <vector>

#include "noma/concave_solver.hpp"
#include "noma/noma_rates.hpp"
#include "noma/solvers.hpp"

namespace noma::solvers::detail {

struct Normalized {
    std::size_t k = 0;
    std::vector<double> g;
    std::vector<double> a;
    std::vector<double> alpha;
    std::vector<double> cap;   ///< p_hat_k
    DecodingOrder order;

    Normalized(const Scenario& s, const DecodingOrder& order);

    /// a p^alpha g and its first two derivatives in p.
    double distortion(std::size_t u, double p) const;
    double distortion_d1(std::size_t u, double p) const;
    double distortion_d2(std::size_t u, double p) const;
    /// Distortion of user u does not depend on its power.
    bool distortion_constant(std::size_t u) const { return a[u] == 0.0 || alpha[u] == 0.0; }

    double total_distortion(const Eigen::VectorXd& p) const;

    /// Interference + distortion + 1 for the user at `position`; with
    /// include_own the user's own signal is added (the quadratic-transform
    /// denominator).
    double denominator(std::size_t position, const Eigen::VectorXd& p, bool include_own) const;
    SmoothFunction denominator_fn(std::size_t position, bool include_own) const;

    /// p g - (2^r - 1) * denominator.
    SmoothFunction slack_fn(std::size_t position, double rate_floor) const;

    double rate(std::size_t position, const Eigen::VectorXd& p) const;

    Eigen::VectorXd lower() const { return Eigen::VectorXd::Zero(static_cast<Eigen::Index>(k)); }
    Eigen::VectorXd upper() const;
};

/// Throws unless every user has a = 0, alpha = 0 or alpha >= 1.
void require_solver_models(const Scenario& s);

/// Largest shortfall max_k (r_k - R_k) in bits/s/Hz, floors indexed by user.
double floor_violation(std::span<const double> floors, const DecodingOrder& order,
                       std::span<const double> p, const Scenario& s);

std::vector<double> to_std(const Eigen::VectorXd& v);
Eigen::VectorXd to_eigen(std::span<const double> v);

/// Clamp to the box (guards barrier round-off at the caps).
void clamp_to_caps(std::vector<double>& p, const Normalized& n);

}  // namespace noma::solvers::detail
