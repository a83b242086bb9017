#pragma once

// Independent reference computations used by the tests. Nothing here calls
// into the library's own evaluation code.

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <random>
#include <utility>
#include <vector>

namespace oracle {

using ld = long double;

inline ld sinr_ld(ld p, ld h, ld n0, ld a, ld alpha) {
    const ld dist = (a == 0 || p == 0) ? 0.0L : a * std::pow(p, alpha) * h;
    return p * h / (dist + n0);
}

inline ld rate_ld(ld p, ld h, ld n0, ld a, ld alpha) { return std::log2(1.0L + sinr_ld(p, h, n0, a, alpha)); }

/// Golden-section maximizer of a unimodal function on [lo, hi].
inline std::pair<ld, ld> golden_max(const std::function<ld(ld)>& f, ld lo, ld hi, ld tol) {
    const ld r = (std::sqrt(5.0L) - 1.0L) / 2.0L;
    ld a = lo, b = hi;
    ld c = b - r * (b - a), d = a + r * (b - a);
    ld fc = f(c), fd = f(d);
    while (b - a > tol) {
        if (fc < fd) {
            a = c;
            c = d;
            fc = fd;
            d = a + r * (b - a);
            fd = f(d);
        } else {
            b = d;
            d = c;
            fd = fc;
            c = b - r * (b - a);
            fc = f(c);
        }
    }
    const ld x = 0.5L * (a + b);
    // The box edges can win for monotone functions.
    ld best_x = x, best = f(x);
    for (ld e : {lo, hi}) {
        if (f(e) > best) {
            best = f(e);
            best_x = e;
        }
    }
    return {best_x, best};
}

/// Rate of the user decoded at `pos` under perm (perm[pos] = user), in long double.
inline ld user_rate_ld(std::size_t pos, const std::vector<std::size_t>& perm,
                       const std::vector<double>& p, const std::vector<double>& h, double n0,
                       const std::vector<double>& a, const std::vector<double>& alpha) {
    ld denom = n0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        if (a[i] > 0 && p[i] > 0) denom += (ld)a[i] * std::pow((ld)p[i], (ld)alpha[i]) * h[i];
    }
    for (std::size_t j = pos + 1; j < perm.size(); ++j) denom += (ld)p[perm[j]] * h[perm[j]];
    const std::size_t u = perm[pos];
    return std::log2(1.0L + (ld)p[u] * h[u] / denom);
}

/// Upper-right frontier by brute force: keep points that no other point weakly
/// dominates and that are not strictly below the segment joining any two
/// other points. O(n^3); small inputs only.
inline std::vector<std::pair<double, double>> brute_frontier(std::vector<std::pair<double, double>> pts) {
    std::sort(pts.begin(), pts.end());
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
    std::vector<std::pair<double, double>> out;
    for (std::size_t i = 0; i < pts.size(); ++i) {
        const auto [x, y] = pts[i];
        bool keep = true;
        for (std::size_t j = 0; j < pts.size() && keep; ++j) {
            if (j != i && pts[j].first >= x && pts[j].second >= y) keep = false;
        }
        // Below or on a chord between points on either side in x.
        for (std::size_t j = 0; j < pts.size() && keep; ++j) {
            for (std::size_t k = 0; k < pts.size() && keep; ++k) {
                if (j == i || k == i) continue;
                const auto& l = pts[j];
                const auto& r = pts[k];
                if (!(l.first < x && x < r.first)) continue;
                const double t = (x - l.first) / (r.first - l.first);
                const double yc = l.second + t * (r.second - l.second);
                if (y <= yc) keep = false;
            }
        }
        if (keep) out.push_back(pts[i]);
    }
    return out;
}

/// Direct evaluation of the GMP sum for one output sample, zero outside [0, n).
inline std::complex<double> gmp_sample(const std::vector<std::complex<double>>& u, long n,
                                       int pa, int la, int pb, int lb, int qb, int pc, int lc,
                                       int qc, const std::vector<std::complex<double>>& theta) {
    auto at = [&](long i) { return (i < 0 || i >= (long)u.size()) ? std::complex<double>{} : u[i]; };
    std::complex<double> y{};
    std::size_t c = 0;
    for (int p = 0; p < pa; ++p)
        for (int l = 0; l < la; ++l) y += theta[c++] * at(n - l) * std::pow(std::abs(at(n - l)), p);
    for (int p = 1; p <= pb; ++p)
        for (int l = 0; l < lb; ++l)
            for (int q = 1; q <= qb; ++q)
                y += theta[c++] * at(n - l) * std::pow(std::abs(at(n - l - q)), p);
    for (int p = 1; p <= pc; ++p)
        for (int l = 0; l < lc; ++l)
            for (int q = 1; q <= qc; ++q)
                y += theta[c++] * at(n - l) * std::pow(std::abs(at(n - l + q)), p);
    return y;
}

/// Solves the normal equations A^H A x = A^H b in long double by Gaussian
/// elimination with partial pivoting. A is row-major, rows x cols.
inline std::vector<std::complex<ld>> normal_equations(const std::vector<std::complex<double>>& a,
                                                      std::size_t rows, std::size_t cols,
                                                      const std::vector<std::complex<double>>& b) {
    using C = std::complex<ld>;
    std::vector<std::vector<C>> m(cols, std::vector<C>(cols + 1));
    for (std::size_t i = 0; i < cols; ++i) {
        for (std::size_t j = 0; j < cols; ++j) {
            C s{};
            for (std::size_t r = 0; r < rows; ++r) s += std::conj(C(a[r * cols + i])) * C(a[r * cols + j]);
            m[i][j] = s;
        }
        C s{};
        for (std::size_t r = 0; r < rows; ++r) s += std::conj(C(a[r * cols + i])) * C(b[r]);
        m[i][cols] = s;
    }
    for (std::size_t c = 0; c < cols; ++c) {
        std::size_t piv = c;
        for (std::size_t r = c + 1; r < cols; ++r)
            if (std::abs(m[r][c]) > std::abs(m[piv][c])) piv = r;
        std::swap(m[c], m[piv]);
        for (std::size_t r = 0; r < cols; ++r) {
            if (r == c) continue;
            const C f = m[r][c] / m[c][c];
            for (std::size_t k = c; k <= cols; ++k) m[r][k] -= f * m[c][k];
        }
    }
    std::vector<C> x(cols);
    for (std::size_t c = 0; c < cols; ++c) x[c] = m[c][cols] / m[c][c];
    return x;
}

/// Two-user MAC corners without distortion: (R1 alone, R2 after R1) and the mirror.
inline std::pair<std::pair<double, double>, std::pair<double, double>>
mac_corners(double s1, double s2) {
    const double r1_alone = std::log2(1.0 + s1);
    const double r2_alone = std::log2(1.0 + s2);
    const double total = std::log2(1.0 + s1 + s2);
    return {{total - r2_alone, r2_alone}, {r1_alone, total - r1_alone}};
}

}  // namespace oracle
