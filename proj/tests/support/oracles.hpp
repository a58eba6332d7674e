#pragma once

// Test-side oracles, each an independent implementation of the quantity it
// checks: quadratic brute-force dominance sorting, Deb's crowding procedure
// computed directly from sorted copies, the SBX / polynomial-mutation
// formulas, and a Monte-Carlo box-union estimator for hypervolume.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <vector>

#include "evoforecast/rng.hpp"

namespace oracle {

using Point = std::vector<double>;

inline bool dominates(const Point& a, const Point& b) {
    bool better = false;
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (a[i] > b[i]) return false;
        if (a[i] < b[i]) better = true;
    }
    return better;
}

// Peels fronts one at a time: a point is in the current front when no
// remaining point dominates it.
inline std::vector<std::vector<std::size_t>> brute_force_sort(const std::vector<Point>& points) {
    std::vector<std::vector<std::size_t>> fronts;
    std::vector<std::size_t> remaining(points.size());
    std::iota(remaining.begin(), remaining.end(), 0);
    while (!remaining.empty()) {
        std::vector<std::size_t> front;
        std::vector<std::size_t> rest;
        for (std::size_t p : remaining) {
            bool dominated = false;
            for (std::size_t q : remaining) {
                if (q != p && dominates(points[q], points[p])) {
                    dominated = true;
                    break;
                }
            }
            (dominated ? rest : front).push_back(p);
        }
        fronts.push_back(front);
        remaining = rest;
    }
    return fronts;
}

inline std::vector<double> crowding_reference(const std::vector<Point>& front) {
    const std::size_t n = front.size();
    const std::size_t n_obj = front[0].size();
    std::vector<double> dist(n, 0.0);
    for (std::size_t m = 0; m < n_obj; ++m) {
        std::vector<std::size_t> idx(n);
        std::iota(idx.begin(), idx.end(), 0);
        std::stable_sort(idx.begin(), idx.end(),
                         [&](std::size_t a, std::size_t b) { return front[a][m] < front[b][m]; });
        dist[idx.front()] = std::numeric_limits<double>::infinity();
        dist[idx.back()] = std::numeric_limits<double>::infinity();
        const double span = front[idx.back()][m] - front[idx.front()][m];
        if (span == 0.0) continue;
        for (std::size_t k = 1; k + 1 < n; ++k) {
            dist[idx[k]] += (front[idx[k + 1]][m] - front[idx[k - 1]][m]) / span;
        }
    }
    return dist;
}

// Bounded SBX children written straight from the distribution formulas.
inline std::pair<double, double> sbx_reference(double x1, double x2, double lo, double hi,
                                               double eta, double u) {
    if (std::abs(x1 - x2) <= 1e-14) return {x1, x2};
    const double y1 = std::min(x1, x2);
    const double y2 = std::max(x1, x2);

    auto child = [&](double edge_gap, bool upper) {
        const double beta = 1.0 + 2.0 * edge_gap / (y2 - y1);
        const double alpha = 2.0 - std::pow(beta, -(eta + 1.0));
        double betaq;
        if (u <= 1.0 / alpha) {
            betaq = std::pow(u * alpha, 1.0 / (eta + 1.0));
        } else {
            betaq = std::pow(1.0 / (2.0 - u * alpha), 1.0 / (eta + 1.0));
        }
        double c = upper ? 0.5 * ((y1 + y2) + betaq * (y2 - y1))
                         : 0.5 * ((y1 + y2) - betaq * (y2 - y1));
        return std::clamp(c, lo, hi);
    };
    return {child(y1 - lo, false), child(hi - y2, true)};
}

inline double polynomial_mutation_reference(double x, double lo, double hi, double eta,
                                            double u) {
    const double range = hi - lo;
    double deltaq;
    if (u < 0.5) {
        const double xy = 1.0 - (x - lo) / range;
        const double val = 2.0 * u + (1.0 - 2.0 * u) * std::pow(xy, eta + 1.0);
        deltaq = std::pow(val, 1.0 / (eta + 1.0)) - 1.0;
    } else {
        const double xy = 1.0 - (hi - x) / range;
        const double val = 2.0 * (1.0 - u) + 2.0 * (u - 0.5) * std::pow(xy, eta + 1.0);
        deltaq = 1.0 - std::pow(val, 1.0 / (eta + 1.0));
    }
    return std::clamp(x + deltaq * range, lo, hi);
}

struct McEstimate {
    double value = 0.0;
    double sigma = 0.0;
};

// Monte-Carlo estimate of the box-union measure: samples the bounding box
// [componentwise min, reference] and counts points dominated by the front.
inline McEstimate mc_hypervolume(const std::vector<Point>& front, const Point& reference,
                                 std::size_t samples, std::uint64_t seed) {
    const std::size_t d = reference.size();
    Point lo = reference;
    for (const auto& p : front) {
        for (std::size_t i = 0; i < d; ++i) lo[i] = std::min(lo[i], p[i]);
    }
    double box = 1.0;
    for (std::size_t i = 0; i < d; ++i) box *= reference[i] - lo[i];

    evoforecast::Rng rng(seed);
    std::size_t hits = 0;
    Point x(d);
    for (std::size_t s = 0; s < samples; ++s) {
        for (std::size_t i = 0; i < d; ++i) x[i] = lo[i] + (reference[i] - lo[i]) * rng.uniform01();
        for (const auto& p : front) {
            bool covers = true;
            for (std::size_t i = 0; i < d && covers; ++i) covers = p[i] <= x[i];
            if (covers) {
                ++hits;
                break;
            }
        }
    }
    const double rate = static_cast<double>(hits) / static_cast<double>(samples);
    McEstimate out;
    out.value = box * rate;
    out.sigma = box * std::sqrt(rate * (1.0 - rate) / static_cast<double>(samples));
    return out;
}

}  // namespace oracle
