#pragma once

// The scattering game: a center player repeatedly proposes a center covering
// all previously played points at their radii, and a point player answers
// with a point further than (1+eps) times its radius from that center. The
// recorded (center, point, radius) triples form a scattering whose length
// lower-bounds the scatter dimension of the metric.

#include <algorithm>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "normkc/ball_intersection.hpp"
#include "normkc/errors.hpp"
#include "normkc/metrics.hpp"
#include "normkc/rng.hpp"

namespace normkc {

struct ScatterTriple {
    Center center;
    int point = -1;
    double radius = 1.0;
};

struct ScatterRecord {
    enum class Mode { plain, algorithmic };
    std::vector<ScatterTriple> triples;
    double eps = 0.0;
    Mode mode = Mode::plain;
};

enum class CenterStrategy { exact_finite, ky_continuous };
enum class PointStrategy { farthest_violator, random_violator };

// Scale the space so the circumradius around the first point is 1, making
// unit-radius play meaningful. Identity when the space is degenerate.
inline MetricSpace normalized_for_game(const MetricSpace& space) {
    const double r = space.max_point_distance_from(0);
    if (!(r > 0.0))
        return space;
    return space.scaled(1.0 / r);
}

inline ScatterRecord play_scatter_game(const MetricSpace& space, double eps,
                                       CenterStrategy center_strategy,
                                       PointStrategy point_strategy, int max_len,
                                       std::uint64_t seed = 0) {
    if (max_len < 1)
        throw input_error("scatter game: max_len must be at least 1");
    if (!(eps > 0.0 && eps < 1.0))
        throw input_error("scatter game: eps must lie in (0,1)");
    if (center_strategy == CenterStrategy::exact_finite && !space.finite_centers())
        throw unsupported_error("scatter game: exact strategy needs a finite center set");
    if (center_strategy == CenterStrategy::ky_continuous && space.finite_centers())
        throw unsupported_error("scatter game: the continuous strategy needs a continuous space");

    ScatterRecord rec;
    rec.eps = eps;
    rec.mode = center_strategy == CenterStrategy::exact_finite ? ScatterRecord::Mode::plain
                                                               : ScatterRecord::Mode::algorithmic;
    SplitRng rng(seed, 2);
    std::vector<Request> played;  // unit radii
    const int n = space.num_points();

    // The first center is unconstrained, and the center player wants a long
    // game: open with the candidate that admits the most refutations (lowest
    // index on ties). Continuous spaces draw the opening from the point
    // locations.
    auto count_violators = [&](const Center& x) {
        int count = 0;
        for (int p = 0; p < n; ++p)
            if (space.point_center_distance(p, x) > (1.0 + eps) * (1.0 + 1e-12))
                ++count;
        return count;
    };
    Center opening{0};
    int opening_count = -1;
    const int candidates = space.finite_centers() ? space.num_centers() : n;
    for (int c = 0; c < candidates; ++c) {
        const Center x = space.finite_centers() ? Center{c} : Center{space.point_coords(c)};
        const int count = count_violators(x);
        if (count > opening_count) {
            opening_count = count;
            opening = x;
        }
    }

    std::vector<int> violators;
    while (static_cast<int>(rec.triples.size()) < max_len) {
        Center x = opening;
        if (!played.empty()) {
            const BallIntersectionOutcome outcome = solve_ball_intersection(space, played, eps / 2.0);
            if (!outcome.ok())
                break;  // no coverer exists, the center player is stuck
            x = *outcome.center;
        }
        violators.clear();
        for (int p = 0; p < n; ++p)
            if (space.point_center_distance(p, x) > (1.0 + eps) * (1.0 + 1e-12))
                violators.push_back(p);
        if (violators.empty())
            break;  // the center player's claim stands
        int chosen;
        if (point_strategy == PointStrategy::farthest_violator) {
            chosen = violators.front();
            double best = space.point_center_distance(chosen, x);
            for (int p : violators) {
                const double d = space.point_center_distance(p, x);
                if (d > best) {
                    best = d;
                    chosen = p;
                }
            }
        } else {
            chosen = violators[rng.next_index(violators.size())];
        }
        rec.triples.push_back({x, chosen, 1.0});
        played.push_back({chosen, 1.0});
    }
    return rec;
}

struct ScatterCheck {
    bool valid = true;
    int bad_i = -1;  // 1-based triple index of the first violation
    int bad_j = -1;  // covered triple index, or bad_i itself for a refutation failure
    std::string what;
};

// Covering: every center is within the (slack-adjusted) radius of each
// earlier point. Refutation: every center is refuted by its own point at
// more than (1+eps) times the radius. 1e-9 relative tolerance throughout;
// records produced by an approximate solver carry its (1+eps/2) slack.
inline ScatterCheck verify_scattering(const MetricSpace& space, const ScatterRecord& rec,
                                      double eps) {
    ScatterCheck c;
    const double slack = rec.mode == ScatterRecord::Mode::plain ? 1.0 : 1.0 + eps / 2.0;
    for (std::size_t i = 0; i < rec.triples.size(); ++i) {
        for (std::size_t j = 0; j < i; ++j) {
            const double bound =
                rec.mode == ScatterRecord::Mode::plain ? 1.0 : slack * rec.triples[j].radius;
            const double d = space.point_center_distance(rec.triples[j].point, rec.triples[i].center);
            if (d > bound * (1.0 + 1e-9)) {
                c.valid = false;
                c.bad_i = static_cast<int>(i + 1);
                c.bad_j = static_cast<int>(j + 1);
                c.what = "covering violated";
                return c;
            }
        }
        const double d = space.point_center_distance(rec.triples[i].point, rec.triples[i].center);
        if (d <= (1.0 + eps) * rec.triples[i].radius * (1.0 - 1e-9)) {
            c.valid = false;
            c.bad_i = static_cast<int>(i + 1);
            c.bad_j = static_cast<int>(i + 1);
            c.what = "refutation violated";
            return c;
        }
    }
    return c;
}

struct PackingReport {
    std::vector<Center> centers;  // x_2 .. x_l
    bool pairwise_gt_eps = true;
    bool pairwise_le_two = true;
    bool contained_in_unit_ball = true;
    double min_pairwise = std::numeric_limits<double>::infinity();
    double max_pairwise = 0.0;

    bool ok() const { return pairwise_gt_eps && pairwise_le_two && contained_in_unit_ball; }
};

// The centers from the second triple onward form an eps-packing inside the
// unit ball around the first played point.
inline PackingReport packing_from_scattering(const MetricSpace& space, const ScatterRecord& rec) {
    if (rec.mode != ScatterRecord::Mode::plain)
        throw input_error("packing: requires a plain (unit radii, exact covering) record");
    if (rec.triples.size() < 2)
        throw input_error("packing: record too short, need length at least 2");
    PackingReport rep;
    for (std::size_t i = 1; i < rec.triples.size(); ++i)
        rep.centers.push_back(rec.triples[i].center);
    const double eps = rec.eps;
    for (std::size_t a = 0; a < rep.centers.size(); ++a) {
        for (std::size_t b = a + 1; b < rep.centers.size(); ++b) {
            const double d = space.center_distance(rep.centers[a], rep.centers[b]);
            rep.min_pairwise = std::min(rep.min_pairwise, d);
            rep.max_pairwise = std::max(rep.max_pairwise, d);
        }
    }
    if (rep.centers.size() > 1) {
        rep.pairwise_gt_eps = rep.min_pairwise > eps * (1.0 - 1e-9);
        rep.pairwise_le_two = rep.max_pairwise <= 2.0 * (1.0 + 1e-9);
    }
    const int p1 = rec.triples.front().point;
    for (const Center& x : rep.centers)
        if (space.point_center_distance(p1, x) > 1.0 + 1e-9)
            rep.contained_in_unit_ball = false;
    return rep;
}

}  // namespace normkc
