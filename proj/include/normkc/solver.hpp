#pragma once

// The norm k-clustering engine. A run at a guessed optimum value computes
// per-point upper bounds from dense-ball detection, bootstraps a solution by
// greedy marking of pairwise-far balls, then iterates: take a subgradient of
// the objective at the current distance vector, sample a witness point with
// probability proportional to its weighted distance, assign it to a random
// cluster, tighten that cluster's distance constraints, and re-solve the
// cluster's ball intersection. Restart boosting and a descending geometric
// grid over the optimum guess complete the scheme.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <optional>
#include <span>
#include <thread>
#include <vector>

#include "normkc/ball_intersection.hpp"
#include "normkc/errors.hpp"
#include "normkc/metrics.hpp"
#include "normkc/norms.hpp"
#include "normkc/rng.hpp"

namespace normkc {

struct Instance {
    MetricSpace space;
    NormObjective norm;
    int k = 1;
};

inline void validate_instance(const Instance& inst) {
    if (inst.k < 1)
        throw input_error("instance: k must be a positive integer");
    if (inst.norm.dimension() != inst.space.num_points())
        throw input_error("instance: norm dimension does not match the number of points");
    if (inst.space.finite_centers() && inst.k > inst.space.num_centers())
        throw input_error("instance: k exceeds the number of candidate centers");
}

struct EngineConfig {
    // Stand-in for the scatter-dimension bound of the metric class; scales
    // the default iteration cap. Together with the restart budget these are
    // the two exponential-factor knobs of the scheme.
    int lambda = 100;
    int iteration_cap = 0;        // 0 -> default_iteration_cap formula
    double opt_grid_factor = 0.0; // 0 -> 1 + eps/3
    int ky_budget_constant = 64;
    bool trace = false;
    int jobs = 1;
};

// ceil(8 * (k/eps) * ln(k/eps) * lambda); converts a potentially unbounded
// walk into a countable failure.
inline int default_iteration_cap(int k, double eps, int lambda) {
    const double ratio = static_cast<double>(k) / eps;
    const double cap = std::ceil(8.0 * ratio * std::log(ratio) * static_cast<double>(lambda));
    return static_cast<int>(std::max(1.0, cap));
}

// Smallest alpha > 0 such that the norm mass of ball(p, alpha/3) is at least
// 3 * opt_guess / alpha, for every point p. Computed exactly by a segment
// scan over the sorted distances from p: on alpha in [3 d_j, 3 d_{j+1}) the
// ball content is frozen, so the condition becomes a closed-form threshold.
inline std::vector<double> upper_bounds(const Instance& inst, double opt_guess) {
    if (!(opt_guess > 0.0))
        throw input_error("upper_bounds: opt_guess must be positive");
    const int n = inst.space.num_points();
    std::vector<double> u(static_cast<std::size_t>(n), 0.0);
    std::vector<int> order(static_cast<std::size_t>(n));
    std::vector<double> dist(static_cast<std::size_t>(n));
    std::vector<double> indicator(static_cast<std::size_t>(n));
    for (int p = 0; p < n; ++p) {
        for (int q = 0; q < n; ++q)
            dist[static_cast<std::size_t>(q)] = inst.space.point_distance(p, q);
        std::iota(order.begin(), order.end(), 0);
        std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
            return dist[static_cast<std::size_t>(a)] < dist[static_cast<std::size_t>(b)];
        });
        std::fill(indicator.begin(), indicator.end(), 0.0);
        double value = std::numeric_limits<double>::infinity();
        for (int j = 0; j < n; ++j) {
            indicator[static_cast<std::size_t>(order[static_cast<std::size_t>(j)])] = 1.0;
            const double dj = dist[static_cast<std::size_t>(order[static_cast<std::size_t>(j)])];
            const double mass = inst.norm.evaluate(indicator);
            if (!(mass > 0.0))
                continue;
            const double candidate = std::max(3.0 * dj, 3.0 * opt_guess / mass);
            const bool last = (j + 1 == n);
            if (last || candidate < 3.0 * dist[static_cast<std::size_t>(order[static_cast<std::size_t>(j + 1)])]) {
                value = candidate;
                break;
            }
        }
        if (!std::isfinite(value))
            throw input_error("upper_bounds: objective assigns no mass to any ball around point " +
                              std::to_string(p));
        u[static_cast<std::size_t>(p)] = value;
    }
    return u;
}

struct Seeding {
    enum class Status { ok, too_many_marked, seed_solver_failed };
    Status status = Status::ok;
    std::vector<int> marked;  // in marking order
    std::vector<std::vector<Request>> cluster_requests;
    std::vector<Center> centers;
};

// Greedy marking in nondecreasing order of u: a point is marked when its ball
// is surrogate-disjoint from all marked balls, i.e. the center distance
// exceeds the radius sum. More than k marks means the guess is too small.
inline Seeding greedy_seed(const Instance& inst, std::span<const double> u, double eps,
                           const EngineConfig& cfg = {}) {
    const int n = inst.space.num_points();
    const int k = inst.k;
    Seeding s;
    std::vector<int> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
        return u[static_cast<std::size_t>(a)] < u[static_cast<std::size_t>(b)];
    });
    for (int p : order) {
        bool disjoint = true;
        for (int m : s.marked) {
            if (inst.space.point_distance(p, m) <=
                u[static_cast<std::size_t>(p)] + u[static_cast<std::size_t>(m)]) {
                disjoint = false;
                break;
            }
        }
        if (disjoint) {
            s.marked.push_back(p);
            if (static_cast<int>(s.marked.size()) > k) {
                s.status = Seeding::Status::too_many_marked;
                return s;
            }
        }
    }
    const int marked_count = static_cast<int>(s.marked.size());
    s.cluster_requests.assign(static_cast<std::size_t>(k), {});
    s.centers.reserve(static_cast<std::size_t>(k));
    for (int kappa = 0; kappa < marked_count; ++kappa) {
        const int p = s.marked[static_cast<std::size_t>(kappa)];
        s.cluster_requests[static_cast<std::size_t>(kappa)].push_back(
            {p, u[static_cast<std::size_t>(p)]});
        if (inst.space.finite_centers()) {
            const BallIntersectionOutcome seed_center = solve_ball_intersection(
                inst.space, s.cluster_requests[static_cast<std::size_t>(kappa)], eps / 10.0,
                cfg.ky_budget_constant);
            if (!seed_center.ok()) {
                s.status = Seeding::Status::seed_solver_failed;
                return s;
            }
            s.centers.push_back(*seed_center.center);
        } else {
            s.centers.push_back(Center{inst.space.point_coords(p)});
        }
    }
    for (int kappa = marked_count; kappa < k; ++kappa) {
        if (inst.space.finite_centers())
            s.centers.push_back(Center{kappa - marked_count});
        else
            s.centers.push_back(Center{inst.space.point_coords(std::min(kappa - marked_count, n - 1))});
    }
    return s;
}

enum class FailReason { none, seed_infeasible, solver_fail, iteration_cap, empty_admissible };

inline const char* to_string(FailReason r) {
    switch (r) {
    case FailReason::none: return "none";
    case FailReason::seed_infeasible: return "seed_infeasible";
    case FailReason::solver_fail: return "solver_fail";
    case FailReason::iteration_cap: return "iteration_cap";
    case FailReason::empty_admissible: return "empty_admissible";
    }
    return "?";
}

struct IterationTrace {
    int iteration = 0;
    int point = -1;
    int cluster = -1;
    double radius = 0.0;
    double solver_margin = 0.0;
    double cost = 0.0;
    bool head_bound_ok = true;     // delta(p,X) <= 4 (1+eps/10) u(p) for all p
    double head_bound_worst = 0.0; // max_p delta(p,X) / (4 (1+eps/10) u(p))
    bool admissible_ok = true;     // sampled point met the admissibility bound
};

struct RunReport {
    std::optional<Solution> solution;
    FailReason fail = FailReason::none;
    int iterations = 0;
    int head_checks_failed = 0;
    bool aspect_ok = true;      // evaluated on success over all cluster requests
    double aspect_worst = 1.0;  // max over clusters of (max radius / min radius)
    std::vector<IterationTrace> trace;
};

namespace detail {

inline RunReport run_once_prepared(const Instance& inst, double eps, double opt_guess,
                                   std::uint64_t seed, int iteration_cap,
                                   const EngineConfig& cfg, std::span<const double> u,
                                   const Seeding& seeding) {
    RunReport rep;
    if (seeding.status != Seeding::Status::ok) {
        rep.fail = FailReason::seed_infeasible;
        return rep;
    }
    const int n = inst.space.num_points();
    const int k = inst.k;
    std::vector<Center> centers = seeding.centers;
    std::vector<std::vector<Request>> requests = seeding.cluster_requests;
    SplitRng point_rng(seed, 0);
    SplitRng cluster_rng(seed, 1);

    const double head_slack = 4.0 * (1.0 + eps / 10.0);
    auto head_check = [&](std::span<const double> dist, double& worst) {
        worst = 0.0;
        for (int p = 0; p < n; ++p)
            worst = std::max(worst, dist[static_cast<std::size_t>(p)] /
                                        (head_slack * u[static_cast<std::size_t>(p)]));
        return worst <= 1.0 + 1e-9;
    };
    auto finish_aspect = [&] {
        rep.aspect_worst = 1.0;
        for (const auto& q : requests) {
            double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
            for (const Request& r : q) {
                lo = std::min(lo, r.radius);
                hi = std::max(hi, r.radius);
            }
            if (!q.empty())
                rep.aspect_worst = std::max(rep.aspect_worst, hi / lo);
        }
        rep.aspect_ok = rep.aspect_worst <= 1e4 * static_cast<double>(k) / (eps * eps) * (1.0 + 1e-9);
    };

    std::vector<int> admissible;
    std::vector<double> weights;
    for (int iter = 0;; ++iter) {
        const std::vector<double> dist = inst.space.distance_vector(centers);
        const double cost = inst.norm.evaluate(dist);
        double head_worst = 0.0;
        const bool head_ok = head_check(dist, head_worst);
        if (!head_ok)
            ++rep.head_checks_failed;
        if (cost <= (1.0 + eps) * opt_guess) {
            rep.solution = Solution{centers, dist, cost};
            rep.iterations = iter;
            finish_aspect();
            return rep;
        }
        if (iter >= iteration_cap) {
            rep.fail = FailReason::iteration_cap;
            rep.iterations = iter;
            return rep;
        }
        const SubgradientVector sg = inst.norm.subgradient(dist, eps / 10.0);
        admissible.clear();
        weights.clear();
        const double floor_factor = eps / (1000.0 * static_cast<double>(k));
        for (int p = 0; p < n; ++p) {
            if (dist[static_cast<std::size_t>(p)] >= floor_factor * u[static_cast<std::size_t>(p)]) {
                admissible.push_back(p);
                weights.push_back(sg.g[static_cast<std::size_t>(p)] * dist[static_cast<std::size_t>(p)]);
            }
        }
        double total_weight = 0.0;
        for (double w : weights)
            total_weight += w;
        if (admissible.empty() || !(total_weight > 0.0)) {
            // the analysis guarantees a nonempty admissible set while the
            // loop condition holds, so this signals a too-small guess
            rep.fail = FailReason::empty_admissible;
            rep.iterations = iter;
            return rep;
        }
        const int p = admissible[point_rng.sample_discrete(weights)];
        const int kappa = static_cast<int>(cluster_rng.next_index(static_cast<std::size_t>(k)));
        const double radius = dist[static_cast<std::size_t>(p)] / (1.0 + eps / 3.0);
        requests[static_cast<std::size_t>(kappa)].push_back({p, radius});
        const BallIntersectionOutcome outcome =
            solve_ball_intersection(inst.space, requests[static_cast<std::size_t>(kappa)],
                                    eps / 10.0, cfg.ky_budget_constant);
        if (cfg.trace) {
            IterationTrace t;
            t.iteration = iter;
            t.point = p;
            t.cluster = kappa;
            t.radius = radius;
            t.solver_margin = outcome.ok() ? outcome.satisfied_margin : -1.0;
            t.cost = cost;
            t.head_bound_ok = head_ok;
            t.head_bound_worst = head_worst;
            t.admissible_ok =
                dist[static_cast<std::size_t>(p)] >= floor_factor * u[static_cast<std::size_t>(p)];
            rep.trace.push_back(std::move(t));
        }
        if (!outcome.ok()) {
            rep.fail = FailReason::solver_fail;
            rep.iterations = iter + 1;
            return rep;
        }
        centers[static_cast<std::size_t>(kappa)] = *outcome.center;
    }
}

}  // namespace detail

// One run of the scheme at a fixed optimum guess and seed. Identical inputs
// give identical traces and outputs.
inline RunReport run_once(const Instance& inst, double eps, double opt_guess, std::uint64_t seed,
                          int iteration_cap, const EngineConfig& cfg = {}) {
    validate_instance(inst);
    if (!(eps > 0.0 && eps < 1.0))
        throw input_error("run_once: eps must lie in (0,1)");
    if (!(opt_guess > 0.0))
        throw input_error("run_once: opt_guess must be positive");
    if (iteration_cap < 1)
        throw input_error("run_once: iteration cap must be at least 1");
    const std::vector<double> u = upper_bounds(inst, opt_guess);
    const Seeding seeding = greedy_seed(inst, u, eps, cfg);
    return detail::run_once_prepared(inst, eps, opt_guess, seed, iteration_cap, cfg, u, seeding);
}

struct RestartReport {
    std::optional<Solution> solution;
    int restarts_used = 0;
    std::uint64_t winning_seed = 0;
    int winner_iterations = 0;
    FailReason last_fail = FailReason::none;
};

// Runs with seeds base_seed, base_seed+1, ... and returns the first success.
// With jobs > 1 the runs execute in parallel blocks; the lowest succeeding
// seed wins regardless of completion order.
inline RestartReport solve_with_restarts(const Instance& inst, double eps, double opt_guess,
                                         int restart_budget, std::uint64_t base_seed,
                                         const EngineConfig& cfg = {}) {
    validate_instance(inst);
    if (restart_budget < 1)
        throw input_error("solve_with_restarts: restart budget must be at least 1");
    if (!(eps > 0.0 && eps < 1.0))
        throw input_error("solve_with_restarts: eps must lie in (0,1)");
    if (!(opt_guess > 0.0))
        throw input_error("solve_with_restarts: opt_guess must be positive");
    const int cap = cfg.iteration_cap > 0 ? cfg.iteration_cap
                                          : default_iteration_cap(inst.k, eps, cfg.lambda);
    const std::vector<double> u = upper_bounds(inst, opt_guess);
    const Seeding seeding = greedy_seed(inst, u, eps, cfg);
    RestartReport rep;
    if (seeding.status != Seeding::Status::ok) {
        // seeding is seed-independent, so one run settles every restart
        rep.restarts_used = 1;
        rep.last_fail = FailReason::seed_infeasible;
        return rep;
    }
    const int jobs = std::max(1, cfg.jobs);
    EngineConfig run_cfg = cfg;
    run_cfg.trace = false;
    for (int block = 0; block < restart_budget; block += jobs) {
        const int block_size = std::min(jobs, restart_budget - block);
        std::vector<RunReport> results(static_cast<std::size_t>(block_size));
        if (block_size == 1) {
            results[0] = detail::run_once_prepared(inst, eps, opt_guess, base_seed + static_cast<std::uint64_t>(block),
                                                   cap, run_cfg, u, seeding);
        } else {
            std::vector<std::thread> workers;
            workers.reserve(static_cast<std::size_t>(block_size));
            for (int j = 0; j < block_size; ++j) {
                workers.emplace_back([&, j] {
                    results[static_cast<std::size_t>(j)] = detail::run_once_prepared(
                        inst, eps, opt_guess, base_seed + static_cast<std::uint64_t>(block + j), cap,
                        run_cfg, u, seeding);
                });
            }
            for (std::thread& w : workers)
                w.join();
        }
        for (int j = 0; j < block_size; ++j) {
            RunReport& r = results[static_cast<std::size_t>(j)];
            if (r.solution) {
                rep.solution = std::move(r.solution);
                rep.restarts_used = block + j + 1;
                rep.winning_seed = base_seed + static_cast<std::uint64_t>(block + j);
                rep.winner_iterations = r.iterations;
                return rep;
            }
            rep.last_fail = r.fail;
        }
    }
    rep.restarts_used = restart_budget;
    return rep;
}

struct SearchReport {
    Solution solution;
    double opt_guess = 0.0;  // guess that produced the returned solution
    int winner_iterations = 0;
    long long restarts_used_total = 0;
    int guesses_tried = 0;
    bool from_run = false;  // false: zero-cost fast path or bracket fallback
    std::uint64_t winning_seed = 0;
};

namespace detail {

// Solution of cost zero by k centers, if one exists; deterministic choice.
inline std::optional<Solution> zero_cost_solution(const Instance& inst) {
    const int n = inst.space.num_points();
    std::vector<Center> chosen;
    if (inst.space.finite_centers()) {
        const int m = inst.space.num_centers();
        std::vector<int> chosen_idx;
        for (int p = 0; p < n; ++p) {
            int found = -1;
            for (int c = 0; c < m; ++c)
                if (inst.space.point_center_distance(p, Center{c}) == 0.0) {
                    found = c;
                    break;
                }
            if (found < 0)
                return std::nullopt;
            if (std::find(chosen_idx.begin(), chosen_idx.end(), found) == chosen_idx.end())
                chosen_idx.push_back(found);
            if (static_cast<int>(chosen_idx.size()) > inst.k)
                return std::nullopt;
        }
        for (int c : chosen_idx)
            chosen.push_back(Center{c});
        for (int c = 0; static_cast<int>(chosen.size()) < inst.k; ++c)
            chosen.push_back(Center{std::min(c, m - 1)});
    } else {
        std::vector<Coords> locations;
        for (int p = 0; p < n; ++p) {
            const Coords& x = inst.space.point_coords(p);
            if (std::find(locations.begin(), locations.end(), x) == locations.end())
                locations.push_back(x);
            if (static_cast<int>(locations.size()) > inst.k)
                return std::nullopt;
        }
        for (const Coords& x : locations)
            chosen.push_back(Center{x});
        while (static_cast<int>(chosen.size()) < inst.k)
            chosen.push_back(Center{inst.space.point_coords(0)});
    }
    Solution sol;
    sol.centers = std::move(chosen);
    sol.dist_vector = inst.space.distance_vector(sol.centers);
    sol.cost = inst.norm.evaluate(sol.dist_vector);
    return sol;
}

// Positive lower bound on any positive solution cost, or 0 when none can be
// certified. Finite spaces: any point with a positive nearest-center distance
// contributes at least that distance times the mass of its unit vector.
// Continuous spaces: with more distinct locations than k, two of them share a
// center, so half the smallest positive pairwise distance applies.
inline double positive_cost_lower_bound(const Instance& inst) {
    const int n = inst.space.num_points();
    std::vector<double> e(static_cast<std::size_t>(n), 0.0);
    auto unit_mass = [&](int p) {
        e[static_cast<std::size_t>(p)] = 1.0;
        const double v = inst.norm.evaluate(e);
        e[static_cast<std::size_t>(p)] = 0.0;
        return v;
    };
    double lo = std::numeric_limits<double>::infinity();
    if (inst.space.finite_centers()) {
        const int m = inst.space.num_centers();
        for (int p = 0; p < n; ++p) {
            double dmin = std::numeric_limits<double>::infinity();
            for (int c = 0; c < m; ++c) {
                const double d = inst.space.point_center_distance(p, Center{c});
                if (d > 0.0)
                    dmin = std::min(dmin, d);
            }
            if (std::isfinite(dmin))
                lo = std::min(lo, dmin * unit_mass(p));
        }
    } else {
        double pair_min = std::numeric_limits<double>::infinity();
        double mass_min = std::numeric_limits<double>::infinity();
        for (int p = 0; p < n; ++p) {
            mass_min = std::min(mass_min, unit_mass(p));
            for (int q = p + 1; q < n; ++q) {
                const double d = inst.space.point_distance(p, q);
                if (d > 0.0)
                    pair_min = std::min(pair_min, d);
            }
        }
        if (std::isfinite(pair_min) && std::isfinite(mass_min))
            lo = pair_min / 2.0 * mass_min;
    }
    return std::isfinite(lo) ? lo : 0.0;
}

inline Solution bracket_solution(const Instance& inst) {
    std::vector<Center> centers;
    if (inst.space.finite_centers()) {
        for (int c = 0; c < inst.k; ++c)
            centers.push_back(Center{std::min(c, inst.space.num_centers() - 1)});
    } else {
        for (int c = 0; c < inst.k; ++c)
            centers.push_back(Center{inst.space.point_coords(std::min(c, inst.space.num_points() - 1))});
    }
    Solution sol;
    sol.centers = std::move(centers);
    sol.dist_vector = inst.space.distance_vector(sol.centers);
    sol.cost = inst.norm.evaluate(sol.dist_vector);
    return sol;
}

}  // namespace detail

// Optimum-guess enumeration: descend a geometric grid from the single-center
// bracket cost, keep the cheapest solution any guess produces, and stop after
// two consecutive exhausted budgets or once the certified lower bound is
// crossed. Always returns a solution (at worst the bracket itself). The
// returned cost is within (1+eps)^2 of optimal whenever the restarts succeed
// at the pivotal guess; callers wanting a clean (1+eps) factor pass eps/3.
inline SearchReport search_opt(const Instance& inst, double eps, int restart_budget,
                               std::uint64_t base_seed, const EngineConfig& cfg = {}) {
    validate_instance(inst);
    if (!(eps > 0.0 && eps < 1.0))
        throw input_error("search_opt: eps must lie in (0,1)");
    if (restart_budget < 1)
        throw input_error("search_opt: restart budget must be at least 1");
    SearchReport rep;
    if (std::optional<Solution> zero = detail::zero_cost_solution(inst)) {
        rep.solution = std::move(*zero);
        rep.opt_guess = 0.0;
        return rep;
    }
    const Solution bracket = detail::bracket_solution(inst);
    const double hi = bracket.cost;
    const double lo = detail::positive_cost_lower_bound(inst);
    const double factor = cfg.opt_grid_factor > 1.0 ? cfg.opt_grid_factor : 1.0 + eps / 3.0;

    rep.solution = bracket;
    rep.opt_guess = hi;
    int consecutive_failures = 0;
    for (double guess = hi; guess >= lo && guess > 0.0; guess /= factor) {
        const RestartReport rr = solve_with_restarts(inst, eps, guess, restart_budget, base_seed, cfg);
        rep.restarts_used_total += rr.restarts_used;
        ++rep.guesses_tried;
        if (rr.solution) {
            consecutive_failures = 0;
            if (rr.solution->cost < rep.solution.cost) {
                rep.solution = *rr.solution;
                rep.opt_guess = guess;
                rep.winner_iterations = rr.winner_iterations;
                rep.from_run = true;
                rep.winning_seed = rr.winning_seed;
            }
        } else if (++consecutive_failures >= 2) {
            break;
        }
    }
    return rep;
}

}  // namespace normkc
