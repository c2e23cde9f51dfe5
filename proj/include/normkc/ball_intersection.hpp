#pragma once

// Ball Intersection: find a center within distance r of every request point
// (p, r), up to a (1+eta) slack. Finite center sets are searched exhaustively;
// continuous Euclidean instances go through a small-radius filter and a
// Frank-Wolfe iteration for the weighted 1-center problem.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <vector>

#include "normkc/errors.hpp"
#include "normkc/metrics.hpp"

namespace normkc {

// One distance constraint: the chosen center must lie within `radius` of
// point `point`.
struct Request {
    int point = 0;
    double radius = 0.0;
};

struct BallIntersectionOutcome {
    std::optional<Center> center;  // empty on failure
    double eta = 0.0;
    double satisfied_margin = std::numeric_limits<double>::infinity();  // max delta(x,p)/r
    std::size_t iterations = 0;

    bool ok() const { return center.has_value(); }
};

namespace detail {
inline double request_margin(const MetricSpace& space, std::span<const Request> requests,
                             const Center& x) {
    double m = 0.0;
    for (const Request& q : requests)
        m = std::max(m, space.point_center_distance(q.point, x) / q.radius);
    return m;
}
}  // namespace detail

// Exhaustive search over a finite center set; returns the lowest-indexed
// center satisfying every request exactly. Valid as an eta-approximate solver
// for every eta.
inline BallIntersectionOutcome solve_exact_finite(const MetricSpace& space,
                                                  std::span<const Request> requests) {
    if (!space.finite_centers())
        throw unsupported_error("exact ball intersection requires a finite center set");
    for (const Request& q : requests)
        if (!(q.radius > 0.0))
            throw input_error("ball intersection: request radius must be positive");
    BallIntersectionOutcome out;
    out.eta = 0.0;
    const int m = space.num_centers();
    for (int c = 0; c < m; ++c) {
        bool feasible = true;
        for (const Request& q : requests) {
            if (space.point_center_distance(q.point, Center{c}) > q.radius * (1.0 + 1e-12)) {
                feasible = false;
                break;
            }
        }
        if (feasible) {
            out.center = Center{c};
            out.satisfied_margin = requests.empty() ? 0.0 : detail::request_margin(space, requests, *out.center);
            return out;
        }
    }
    return out;
}

// A coordinate-level request for the continuous solver.
struct CoordRequest {
    Coords point;
    double radius = 0.0;
};

struct WeightedOneCenterResult {
    Coords center;
    double margin = std::numeric_limits<double>::infinity();  // max ||x-p_i|| / r_i
    std::size_t iterations = 0;
    std::size_t budget = 0;
};

// Frank-Wolfe iteration for min_x max_i ||x - p_i|| / r_i. Maintains convex
// weights u over the requests; the iterate x = sum u_i p_i / r_i^2 normalized
// is the exact minimizer of sum u_i (||x - p_i|| / r_i)^2, whose value dual(u)
// lower-bounds the squared optimum ratio. Each step moves u toward the
// currently worst ball with step size 2/(t+2) and stops once
// margin^2 <= (1+eta)^2 * dual(u), certifying margin <= (1+eta) * optimum.
// The iteration budget is budget_constant * tau / eta^2 with tau the squared
// radius aspect ratio; past it the best iterate seen is returned.
inline WeightedOneCenterResult solve_weighted_one_center(std::span<const CoordRequest> requests,
                                                         double eta,
                                                         int budget_constant = 64) {
    if (requests.empty())
        throw input_error("weighted 1-center: empty request set");
    if (!(eta > 0.0 && eta < 1.0))
        throw input_error("weighted 1-center: eta must lie in (0,1)");
    const std::size_t m = requests.size();
    const std::size_t d = requests.front().point.size();
    if (d == 0)
        throw input_error("weighted 1-center: zero-dimensional points");
    double r_min = std::numeric_limits<double>::infinity(), r_max = 0.0;
    for (const CoordRequest& q : requests) {
        if (q.point.size() != d)
            throw input_error("weighted 1-center: inconsistent dimensions");
        if (!(q.radius > 0.0))
            throw input_error("weighted 1-center: radii must be positive");
        r_min = std::min(r_min, q.radius);
        r_max = std::max(r_max, q.radius);
    }
    const double tau = (r_max / r_min) * (r_max / r_min);
    const double raw_budget = std::ceil(static_cast<double>(budget_constant) * tau / (eta * eta));
    const std::size_t budget =
        static_cast<std::size_t>(std::min(raw_budget, 1e8));  // overflow guard for absurd aspect ratios

    std::vector<double> u(m, 1.0 / static_cast<double>(m));
    // running sums for x = S1 / S0 with per-request mass u_i / r_i^2
    std::vector<double> s1(d, 0.0);
    double s0 = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        const double mass = u[i] / (requests[i].radius * requests[i].radius);
        for (std::size_t j = 0; j < d; ++j)
            s1[j] += mass * requests[i].point[j];
        s0 += mass;
    }
    Coords x(d);
    auto refresh_x = [&] {
        for (std::size_t j = 0; j < d; ++j)
            x[j] = s1[j] / s0;
    };
    refresh_x();

    WeightedOneCenterResult best;
    best.budget = budget;
    std::vector<double> ratio_sq(m);
    for (std::size_t t = 0; t <= budget; ++t) {
        double worst_sq = -1.0;
        double dual = 0.0;
        std::size_t worst_i = 0;
        for (std::size_t i = 0; i < m; ++i) {
            const double dist = euclidean_distance(x, requests[i].point);
            ratio_sq[i] = (dist / requests[i].radius) * (dist / requests[i].radius);
            dual += u[i] * ratio_sq[i];
            if (ratio_sq[i] > worst_sq) {
                worst_sq = ratio_sq[i];
                worst_i = i;
            }
        }
        const double worst = std::sqrt(worst_sq);
        if (worst < best.margin) {
            best.margin = worst;
            best.center = x;
            best.iterations = t;
        }
        const double target = (1.0 + eta) * (1.0 + eta) * dual;
        if (worst_sq <= target * (1.0 + 1e-12) + 1e-30 || t == budget)
            break;
        const double gamma = 2.0 / (static_cast<double>(t) + 2.0);
        for (std::size_t i = 0; i < m; ++i)
            u[i] *= 1.0 - gamma;
        u[worst_i] += gamma;
        const double mass = 1.0 / (requests[worst_i].radius * requests[worst_i].radius);
        for (std::size_t j = 0; j < d; ++j)
            s1[j] = (1.0 - gamma) * s1[j] + gamma * mass * requests[worst_i].point[j];
        s0 = (1.0 - gamma) * s0 + gamma * mass;
        refresh_x();
    }
    return best;
}

// Smallest power of two (integer exponent of either sign) that is >= r.
inline double smallest_pow2_at_least(double r) {
    if (!(r > 0.0))
        throw input_error("aspect filter: radii must be positive");
    double rho = std::exp2(std::ceil(std::log2(r)));
    while (rho * 0.5 >= r)
        rho *= 0.5;
    while (rho < r)
        rho *= 2.0;
    return rho;
}

// Keep only requests whose radius is within a bounded factor of the smallest:
// rho is the smallest power of two at least min r_i, and (p,r) survives iff
// (eta/3) * r <= rho. Dropped requests are implied by the kept ones whenever
// a common exact center exists, so the caller must still verify the full
// request list against the returned center.
inline std::vector<Request> aspect_filter(std::span<const Request> requests, double eta) {
    if (requests.empty())
        throw input_error("aspect filter: empty request list");
    if (!(eta > 0.0 && eta < 1.0))
        throw input_error("aspect filter: eta must lie in (0,1)");
    double r_min = std::numeric_limits<double>::infinity();
    for (const Request& q : requests)
        r_min = std::min(r_min, q.radius);
    const double rho = smallest_pow2_at_least(r_min);
    std::vector<Request> kept;
    for (const Request& q : requests)
        if (eta / 3.0 * q.radius <= rho)
            kept.push_back(q);
    return kept;
}

// Round each radius up to the smallest power of (1 + eta/50), integer
// exponents of either sign. Preserves order and inflates by less than a
// factor of 1 + eta/50.
inline std::vector<Request> round_radii(std::span<const Request> requests, double eta) {
    if (!(eta > 0.0 && eta < 1.0))
        throw input_error("round_radii: eta must lie in (0,1)");
    const double base = 1.0 + eta / 50.0;
    const double log_base = std::log(base);
    std::vector<Request> out;
    out.reserve(requests.size());
    for (const Request& q : requests) {
        if (!(q.radius > 0.0))
            throw input_error("round_radii: radii must be positive");
        double e = std::ceil(std::log(q.radius) / log_base);
        while (std::pow(base, e - 1.0) >= q.radius)
            e -= 1.0;
        while (std::pow(base, e) < q.radius)
            e += 1.0;
        out.push_back({q.point, std::pow(base, e)});
    }
    return out;
}

// Composed solver: substitute pinned (zero) radii, round radii, then run the
// exhaustive search (finite F) or the aspect filter plus weighted 1-center
// iteration (continuous F), and finally verify every effective request to
// (1+eta). If some center satisfies all requests exactly, the solve cannot
// fail.
inline BallIntersectionOutcome solve_ball_intersection(const MetricSpace& space,
                                                       std::span<const Request> raw,
                                                       double eta,
                                                       int ky_budget_constant = 64) {
    if (!(eta > 0.0 && eta < 1.0))
        throw input_error("ball intersection: eta must lie in (0,1)");

    // Zero radii pin the center to the request point; substitute a radius far
    // below any real distance scale.
    std::vector<Request> effective(raw.begin(), raw.end());
    bool has_pin = false;
    double pin_radius = 0.0;
    for (Request& q : effective) {
        if (q.point < 0 || q.point >= space.num_points())
            throw input_error("ball intersection: request point out of range");
        if (q.radius < 0.0)
            throw input_error("ball intersection: negative request radius");
        if (q.radius == 0.0) {
            if (!has_pin) {
                const double diam = space.point_diameter();
                pin_radius = 1e-12 * (diam > 0.0 ? diam : 1.0);
                has_pin = true;
            }
            q.radius = pin_radius;
        }
    }

    BallIntersectionOutcome out;
    out.eta = eta;
    if (effective.empty()) {
        if (space.finite_centers()) {
            out.center = Center{0};
            if (space.num_centers() == 0)
                throw input_error("ball intersection: empty center set");
        } else {
            out.center = Center{space.point_coords(0)};
        }
        out.satisfied_margin = 0.0;
        return out;
    }

    const std::vector<Request> rounded = round_radii(effective, eta);
    Center candidate;
    std::size_t iterations = 0;
    if (space.finite_centers()) {
        const BallIntersectionOutcome inner = solve_exact_finite(space, rounded);
        if (!inner.ok())
            return out;
        candidate = *inner.center;
    } else if (has_pin) {
        // a pinned request forces the center onto that point
        int pin_point = -1;
        for (std::size_t i = 0; i < effective.size(); ++i)
            if (raw[i].radius == 0.0) {
                pin_point = effective[i].point;
                break;
            }
        candidate = Center{space.point_coords(pin_point)};
    } else {
        const std::vector<Request> filtered = aspect_filter(rounded, eta);
        const double scale = space.distance_scale();
        std::vector<CoordRequest> coord;
        coord.reserve(filtered.size());
        for (const Request& q : filtered)
            coord.push_back({space.point_coords(q.point), q.radius / scale});
        const WeightedOneCenterResult res =
            solve_weighted_one_center(coord, eta / 2.0, ky_budget_constant);
        iterations = res.iterations;
        if (res.margin > (1.0 + eta / 2.0) * (1.0 + 1e-12))
            return out;
        candidate = Center{res.center};
    }

    // final check against the full effective request list
    const double margin = detail::request_margin(space, effective, candidate);
    out.iterations = iterations;
    if (margin > (1.0 + eta) * (1.0 + 1e-12))
        return out;
    out.center = std::move(candidate);
    out.satisfied_margin = margin;
    return out;
}

}  // namespace normkc
