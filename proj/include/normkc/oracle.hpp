#pragma once

// Ground-truth solvers for verification at desk scale: exhaustive search over
// all k-subsets of a finite center set, and the classic farthest-first
// traversal baseline.

#include <algorithm>
#include <cstdint>
#include <limits>
#include <vector>

#include "normkc/errors.hpp"
#include "normkc/metrics.hpp"
#include "normkc/solver.hpp"

namespace normkc {

struct BruteForceResult {
    double cost = 0.0;
    std::vector<int> centers;  // lexicographically least argmin
    Solution solution;
};

// Enumerates every k-subset of F, guarded against blowups.
inline BruteForceResult brute_force_opt(const Instance& inst,
                                        std::uint64_t max_combinations = 1'000'000) {
    validate_instance(inst);
    if (!inst.space.finite_centers())
        throw unsupported_error("brute force requires a finite center set");
    const int m = inst.space.num_centers();
    const int k = inst.k;
    double combos = 1.0;
    for (int i = 1; i <= k; ++i)
        combos = combos * static_cast<double>(m - k + i) / static_cast<double>(i);
    if (combos > static_cast<double>(max_combinations))
        throw input_error("brute force: too many center subsets to enumerate");

    std::vector<int> pick(static_cast<std::size_t>(k));
    for (int i = 0; i < k; ++i)
        pick[static_cast<std::size_t>(i)] = i;
    BruteForceResult best;
    best.cost = std::numeric_limits<double>::infinity();
    std::vector<Center> centers(static_cast<std::size_t>(k));
    for (;;) {
        for (int i = 0; i < k; ++i)
            centers[static_cast<std::size_t>(i)] = Center{pick[static_cast<std::size_t>(i)]};
        std::vector<double> dist = inst.space.distance_vector(centers);
        const double cost = inst.norm.evaluate(dist);
        if (cost < best.cost) {
            best.cost = cost;
            best.centers = pick;
            best.solution = Solution{centers, std::move(dist), cost};
        }
        // next combination in lexicographic order
        int i = k - 1;
        while (i >= 0 && pick[static_cast<std::size_t>(i)] == m - k + i)
            --i;
        if (i < 0)
            break;
        ++pick[static_cast<std::size_t>(i)];
        for (int j = i + 1; j < k; ++j)
            pick[static_cast<std::size_t>(j)] = pick[static_cast<std::size_t>(j - 1)] + 1;
    }
    return best;
}

// Farthest-first traversal seeded at the first point: a 2-approximation for
// the max distance objective. The traversal selects points; for finite center
// sets each selected point maps to its nearest center.
inline Solution gonzalez_kcenter(const Instance& inst) {
    validate_instance(inst);
    const int n = inst.space.num_points();
    const int k = inst.k;
    std::vector<int> selected;
    std::vector<double> nearest(static_cast<std::size_t>(n), std::numeric_limits<double>::infinity());
    int next = 0;  // seed at the first point
    while (static_cast<int>(selected.size()) < std::min(k, n)) {
        selected.push_back(next);
        for (int p = 0; p < n; ++p)
            nearest[static_cast<std::size_t>(p)] = std::min(
                nearest[static_cast<std::size_t>(p)], inst.space.point_distance(p, next));
        next = 0;
        for (int p = 1; p < n; ++p)
            if (nearest[static_cast<std::size_t>(p)] > nearest[static_cast<std::size_t>(next)])
                next = p;
    }
    while (static_cast<int>(selected.size()) < k)
        selected.push_back(0);

    std::vector<Center> centers;
    centers.reserve(selected.size());
    for (int p : selected) {
        if (inst.space.finite_centers()) {
            int best = 0;
            double bd = std::numeric_limits<double>::infinity();
            for (int c = 0; c < inst.space.num_centers(); ++c) {
                const double d = inst.space.point_center_distance(p, Center{c});
                if (d < bd) {
                    bd = d;
                    best = c;
                }
            }
            centers.push_back(Center{best});
        } else {
            centers.push_back(Center{inst.space.point_coords(p)});
        }
    }
    Solution sol;
    sol.centers = std::move(centers);
    sol.dist_vector = inst.space.distance_vector(sol.centers);
    sol.cost = inst.norm.evaluate(sol.dist_vector);
    return sol;
}

}  // namespace normkc
