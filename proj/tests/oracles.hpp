#pragma once

// Independent reference implementations used only by the tests.

#include "segwise/segment_stats.hpp"
#include "segwise/series.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <random>
#include <vector>

namespace segwise::oracle {

struct BruteForceResult {
    std::vector<std::size_t> change_points;
    double cost = std::numeric_limits<double>::infinity();
};

// Every r-subset of {1..n-1} respecting the minimum segment length, visited in
// lexicographic order. Returns the minimum cost and, among tied minima
// (relative 1e-10), the lexicographically smallest vector.
inline BruteForceResult brute_force_segmentation(const Series& x, std::size_t r, std::size_t m) {
    const std::size_t n = x.n();
    std::vector<std::vector<std::size_t>> all;
    std::vector<double> costs;
    std::vector<std::size_t> cur;
    auto rec = [&](auto&& self, std::size_t start) -> void {
        if (cur.size() == r) {
            if (n - (cur.empty() ? 0 : cur.back()) < m) return;
            double c = 0.0;
            std::size_t prev = 0;
            for (std::size_t t : cur) {
                c += sse_cost(x, prev, t);
                prev = t;
            }
            c += sse_cost(x, prev, n);
            all.push_back(cur);
            costs.push_back(c);
            return;
        }
        for (std::size_t t = start; t < n; ++t) {
            if (t - (cur.empty() ? 0 : cur.back()) < m) continue;
            cur.push_back(t);
            self(self, t + 1);
            cur.pop_back();
        }
    };
    rec(rec, 1);
    BruteForceResult best;
    if (all.empty()) return best;
    best.cost = *std::min_element(costs.begin(), costs.end());
    for (std::size_t k = 0; k < all.size(); ++k) {
        if (costs[k] - best.cost <= 1e-10 * (1.0 + 2.0 * std::abs(best.cost))) {
            best.change_points = all[k];
            break;
        }
    }
    return best;
}

// inf{t : #{draws > t} <= alpha_percent * B / 100}, by direct counting.
inline double counting_critical_value(const std::vector<double>& draws, int alpha_percent) {
    std::vector<double> candidates = draws;
    std::sort(candidates.begin(), candidates.end());
    const auto B = static_cast<long long>(draws.size());
    for (double t : candidates) {
        long long above = 0;
        for (double d : draws) above += d > t ? 1 : 0;
        if (above * 100 <= alpha_percent * B) return t;
    }
    return candidates.back();
}

inline Series random_series(std::mt19937_64& rng, std::size_t n, std::size_t d, bool integer_valued = false) {
    RowMatrix m(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(d));
    std::normal_distribution<double> normal(0.0, 1.0);
    std::uniform_int_distribution<int> small(-3, 3);
    for (Eigen::Index i = 0; i < m.rows(); ++i)
        for (Eigen::Index k = 0; k < m.cols(); ++k) m(i, k) = integer_valued ? small(rng) : normal(rng);
    return Series(std::move(m));
}

inline Segmentation random_segmentation(std::mt19937_64& rng, std::size_t n, std::size_t max_r) {
    std::uniform_int_distribution<std::size_t> count(0, std::min(max_r, n - 1));
    std::vector<std::size_t> pool(n - 1);
    for (std::size_t i = 0; i < pool.size(); ++i) pool[i] = i + 1;
    std::shuffle(pool.begin(), pool.end(), rng);
    std::vector<std::size_t> cps(pool.begin(), pool.begin() + static_cast<std::ptrdiff_t>(count(rng)));
    std::sort(cps.begin(), cps.end());
    return Segmentation(std::move(cps), n);
}

}  // namespace segwise::oracle
