#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "noma/region.hpp"

namespace noma::region {

namespace {

using Pt = std::pair<double, double>;

double cross(const Pt& o, const Pt& a, const Pt& b) {
    return (a.first - o.first) * (b.second - o.second) -
           (a.second - o.second) * (b.first - o.first);
}

bool dominates(const std::vector<double>& a, const std::vector<double>& b) {
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (a[i] < b[i]) return false;
    }
    return true;
}

}  // namespace

std::vector<Pt> frontier_2d(std::vector<Pt> pts) {
    if (pts.empty()) throw std::invalid_argument("frontier of an empty point set");
    std::sort(pts.begin(), pts.end());
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());

    std::vector<Pt> upper;
    for (const auto& p : pts) {
        while (upper.size() >= 2 && cross(upper[upper.size() - 2], upper.back(), p) >= 0.0) {
            upper.pop_back();
        }
        upper.push_back(p);
    }
    // Start at the highest vertex (rightmost among ties); everything before it
    // is dominated.
    std::size_t top = 0;
    for (std::size_t i = 1; i < upper.size(); ++i) {
        if (upper[i].second >= upper[top].second) top = i;
    }
    return {upper.begin() + static_cast<std::ptrdiff_t>(top), upper.end()};
}

std::vector<RatePoint> pareto_filter(const std::vector<RatePoint>& points) {
    std::vector<RatePoint> out;
    for (std::size_t i = 0; i < points.size(); ++i) {
        if (!points[i].valid) continue;
        bool dominated = false;
        for (std::size_t j = 0; j < points.size() && !dominated; ++j) {
            if (j == i || !points[j].valid || points[j].rates == points[i].rates) continue;
            dominated = dominates(points[j].rates, points[i].rates);
        }
        // Keep the first of exact duplicates only.
        for (const auto& kept : out) dominated = dominated || kept.rates == points[i].rates;
        if (!dominated) out.push_back(points[i]);
    }
    return out;
}

std::vector<RatePoint> convex_hull_frontier(const std::vector<RatePoint>& points) {
    std::vector<RatePoint> valid;
    for (const auto& p : points) {
        if (p.valid) valid.push_back(p);
    }
    if (valid.empty()) throw std::invalid_argument("convex hull needs at least one valid point");
    const std::size_t k = valid.front().rates.size();
    if (k != 2) return pareto_filter(valid);

    std::vector<Pt> pts;
    for (const auto& p : valid) pts.emplace_back(p.rates[0], p.rates[1]);
    const auto front = frontier_2d(pts);
    std::vector<RatePoint> out;
    for (const auto& v : front) {
        for (const auto& p : valid) {
            if (p.rates[0] == v.first && p.rates[1] == v.second) {
                out.push_back(p);
                break;
            }
        }
    }
    return out;
}

std::vector<Pt> projection_frontier(const std::vector<RatePoint>& points, std::size_t i,
                                    std::size_t j) {
    std::vector<Pt> pts;
    for (const auto& p : points) {
        if (p.valid) pts.emplace_back(p.rates.at(i), p.rates.at(j));
    }
    return frontier_2d(std::move(pts));
}

std::vector<Pt> as_pairs(const std::vector<RatePoint>& frontier) {
    std::vector<Pt> out;
    for (const auto& p : frontier) out.emplace_back(p.rates.at(0), p.rates.at(1));
    return out;
}

double radial_extent(const std::vector<Pt>& frontier, double theta) {
    if (frontier.empty()) throw std::invalid_argument("radial extent of an empty frontier");
    // Closed boundary: top axis projection, frontier, right axis projection.
    std::vector<Pt> chain;
    chain.emplace_back(0.0, frontier.front().second);
    chain.insert(chain.end(), frontier.begin(), frontier.end());
    chain.emplace_back(frontier.back().first, 0.0);

    const double dx = std::cos(theta);
    const double dy = std::sin(theta);
    double best = 0.0;
    for (std::size_t i = 0; i + 1 < chain.size(); ++i) {
        const auto& a = chain[i];
        const auto& b = chain[i + 1];
        const double ex = b.first - a.first;
        const double ey = b.second - a.second;
        // Solve r * d = a + s * e.
        const double det = dx * (-ey) - dy * (-ex);
        if (std::abs(det) < 1e-300) continue;
        const double r = (a.first * (-ey) - a.second * (-ex)) / det;
        const double s = (dx * a.second - dy * a.first) / det;
        if (s >= -1e-12 && s <= 1.0 + 1e-12 && r >= 0.0) best = std::max(best, r);
    }
    return best;
}

bool region_contains(const std::vector<Pt>& frontier, double x, double y, double tol) {
    if (x < -tol || y < -tol) return false;
    const double r = std::hypot(x, y);
    if (r == 0.0) return true;
    const double theta = std::atan2(std::max(y, 0.0), std::max(x, 0.0));
    return r <= radial_extent(frontier, theta) + tol;
}

}  // namespace noma::region
