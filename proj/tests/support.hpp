#pragma once

// Shared test support: independent oracles kept deliberately separate from the
// library implementation paths they check, plus random instance generators.

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <string>
#include <vector>

#include "normkc/normkc.hpp"

namespace testsupport {

using normkc::Center;
using normkc::Coords;
using normkc::Instance;
using normkc::MetricSpace;
using normkc::NormObjective;
using normkc::SplitRng;

// --- oracles ---------------------------------------------------------------

// All-pairs shortest paths over an explicit edge list; the matrix-based
// counterpart to the library's per-source search.
inline std::vector<std::vector<double>> floyd_warshall(
    int nv, const std::vector<std::tuple<int, int, double>>& edges) {
    const double inf = std::numeric_limits<double>::infinity();
    std::vector<std::vector<double>> d(static_cast<std::size_t>(nv),
                                       std::vector<double>(static_cast<std::size_t>(nv), inf));
    for (int i = 0; i < nv; ++i)
        d[static_cast<std::size_t>(i)][static_cast<std::size_t>(i)] = 0.0;
    for (const auto& [u, v, w] : edges) {
        d[static_cast<std::size_t>(u)][static_cast<std::size_t>(v)] =
            std::min(d[static_cast<std::size_t>(u)][static_cast<std::size_t>(v)], w);
        d[static_cast<std::size_t>(v)][static_cast<std::size_t>(u)] =
            std::min(d[static_cast<std::size_t>(v)][static_cast<std::size_t>(u)], w);
    }
    for (int m = 0; m < nv; ++m)
        for (int i = 0; i < nv; ++i)
            for (int j = 0; j < nv; ++j)
                d[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] =
                    std::min(d[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)],
                             d[static_cast<std::size_t>(i)][static_cast<std::size_t>(m)] +
                                 d[static_cast<std::size_t>(m)][static_cast<std::size_t>(j)]);
    return d;
}

// Smallest alpha with mass(ball(p, alpha/3)) >= 3 guess / alpha, found by a
// dense grid refinement instead of the segment scan.
inline double upper_bound_grid_search(const Instance& inst, double guess, int p) {
    const int n = inst.space.num_points();
    auto feasible = [&](double alpha) {
        std::vector<double> ind(static_cast<std::size_t>(n), 0.0);
        for (int q = 0; q < n; ++q)
            if (inst.space.point_distance(p, q) <= alpha / 3.0 * (1.0 + 1e-12))
                ind[static_cast<std::size_t>(q)] = 1.0;
        return inst.norm.evaluate(ind) >= 3.0 * guess / alpha;
    };
    double hi = 1e-9;
    while (!feasible(hi)) {
        hi *= 2.0;
        if (hi > 1e18)
            return std::numeric_limits<double>::infinity();
    }
    double lo = hi / 2.0;
    for (int it = 0; it < 200; ++it) {
        const double mid = (lo + hi) / 2.0;
        if (feasible(mid))
            hi = mid;
        else
            lo = mid;
    }
    return hi;
}

// Scalar weighted 1-center: minimize max_i |x - p_i| / r_i by ternary search
// on the convex piecewise-linear objective.
inline double scalar_one_center_optimum(const std::vector<double>& pts,
                                        const std::vector<double>& radii) {
    auto ratio = [&](double x) {
        double m = 0.0;
        for (std::size_t i = 0; i < pts.size(); ++i)
            m = std::max(m, std::abs(x - pts[i]) / radii[i]);
        return m;
    };
    double lo = *std::min_element(pts.begin(), pts.end());
    double hi = *std::max_element(pts.begin(), pts.end());
    for (int it = 0; it < 300; ++it) {
        const double m1 = lo + (hi - lo) / 3.0;
        const double m2 = hi - (hi - lo) / 3.0;
        if (ratio(m1) < ratio(m2))
            hi = m2;
        else
            lo = m1;
    }
    return ratio((lo + hi) / 2.0);
}

// Longest possible unit-radius scattering on a tiny space, searching over
// every center and point choice (both players adversarially prolonging).
inline int exhaustive_max_scattering(const MetricSpace& space, double eps) {
    const int n = space.num_points();
    const int m = space.num_centers();
    int best = 0;
    std::vector<int> played;
    auto rec = [&](auto&& self) -> void {
        best = std::max(best, static_cast<int>(played.size()));
        for (int c = 0; c < m; ++c) {
            bool covers = true;
            for (int p : played)
                if (space.point_center_distance(p, Center{c}) > 1.0) {
                    covers = false;
                    break;
                }
            if (!covers)
                continue;
            for (int p = 0; p < n; ++p) {
                if (space.point_center_distance(p, Center{c}) > (1.0 + eps)) {
                    played.push_back(p);
                    self(self);
                    played.pop_back();
                }
            }
        }
    };
    rec(rec);
    return best;
}

// --- generators -------------------------------------------------------------

inline std::vector<double> random_nonneg_vector(SplitRng& rng, int n, double hi = 10.0) {
    std::vector<double> x(static_cast<std::size_t>(n));
    for (double& v : x)
        v = rng.next_double(0.0, hi);
    return x;
}

// One of each built-in objective family, sized for dimension n.
inline std::vector<NormObjective> norm_suite(int n, SplitRng& rng) {
    std::vector<NormObjective> out;
    out.push_back(NormObjective::lz(1.0, n));
    out.push_back(NormObjective::lz(1.5, n));
    out.push_back(NormObjective::lz(2.0, n));
    out.push_back(NormObjective::lz(3.5, n));
    out.push_back(NormObjective::lz(normkc::kInfExponent, n));
    {
        std::vector<double> w(static_cast<std::size_t>(n));
        for (double& v : w)
            v = rng.next_double(0.1, 3.0);
        out.push_back(NormObjective::weighted_max(std::move(w)));
    }
    out.push_back(NormObjective::top_l(1 + static_cast<int>(rng.next_index(static_cast<std::size_t>(n))), n));
    {
        std::vector<double> v(static_cast<std::size_t>(n));
        for (double& x : v)
            x = rng.next_double(0.0, 2.0);
        std::sort(v.begin(), v.end(), std::greater<>());
        v.front() += 0.1;
        out.push_back(NormObjective::ordered(v));
        std::vector<double> w(static_cast<std::size_t>(n));
        for (double& x : w)
            x = rng.next_double(0.1, 3.0);
        out.push_back(NormObjective::priority_ordered(std::move(v), std::move(w)));
    }
    {
        const double qs[] = {1.0, 2.0, normkc::kInfExponent};
        const double q = qs[rng.next_index(3)];
        const double z = qs[rng.next_index(3)];
        const int m = 2 + static_cast<int>(rng.next_index(2));
        std::vector<std::vector<double>> groups(static_cast<std::size_t>(m));
        for (auto& g : groups)
            g.assign(static_cast<std::size_t>(n), 0.0);
        for (int p = 0; p < n; ++p) {
            // every point gets positive weight in at least one group
            groups[rng.next_index(static_cast<std::size_t>(m))][static_cast<std::size_t>(p)] +=
                rng.next_double(0.2, 1.5);
            for (auto& g : groups)
                if (rng.next_double() < 0.3)
                    g[static_cast<std::size_t>(p)] += rng.next_double(0.0, 1.0);
        }
        out.push_back(NormObjective::fair_group(q, z, std::move(groups)));
    }
    {
        // sources -> two middle aggregations -> sink
        normkc::CascadeDag dag;
        for (int p = 0; p < n; ++p)
            dag.sources.push_back(p);
        const double qs[] = {1.0, 2.0, 3.0, normkc::kInfExponent};
        dag.nodes.push_back({n, qs[rng.next_index(4)]});
        dag.nodes.push_back({n + 1, qs[rng.next_index(4)]});
        dag.nodes.push_back({n + 2, qs[rng.next_index(4)]});
        dag.edges.push_back({0, n, rng.next_double(0.1, 2.0)});
        dag.edges.push_back({0, n + 1, rng.next_double(0.1, 2.0)});
        for (int p = 1; p < n; ++p) {
            const int mid = n + static_cast<int>(rng.next_index(2));
            dag.edges.push_back({p, mid, rng.next_double(0.1, 2.0)});
            if (rng.next_double() < 0.4)
                dag.edges.push_back({p, mid == n ? n + 1 : n, rng.next_double(0.0, 1.0)});
        }
        dag.edges.push_back({n, n + 2, rng.next_double(0.5, 1.5)});
        dag.edges.push_back({n + 1, n + 2, rng.next_double(0.5, 1.5)});
        out.push_back(NormObjective::cascade(dag));
    }
    return out;
}

// Random finite metric via shortest-path closure of random symmetric weights.
inline MetricSpace random_explicit_metric(SplitRng& rng, int n_points, int n_centers) {
    const int nv = n_points + n_centers;
    std::vector<std::tuple<int, int, double>> edges;
    for (int i = 0; i < nv; ++i)
        for (int j = i + 1; j < nv; ++j)
            edges.emplace_back(i, j, rng.next_double(0.5, 10.0));
    const std::vector<std::vector<double>> d = floyd_warshall(nv, edges);
    std::vector<std::string> ids, pids, cids;
    for (int i = 0; i < nv; ++i)
        ids.push_back("v" + std::to_string(i));
    for (int i = 0; i < n_points; ++i)
        pids.push_back(ids[static_cast<std::size_t>(i)]);
    for (int i = 0; i < n_centers; ++i)
        cids.push_back(ids[static_cast<std::size_t>(nv - n_centers + i)]);
    return MetricSpace::explicit_matrix(ids, pids, cids, d);
}

inline MetricSpace random_euclidean_discrete(SplitRng& rng, int n_points, int n_centers, int dim) {
    std::vector<Coords> pts, ctrs;
    for (int i = 0; i < n_points; ++i) {
        Coords c(static_cast<std::size_t>(dim));
        for (double& v : c)
            v = rng.next_double(0.0, 10.0);
        pts.push_back(std::move(c));
    }
    for (int i = 0; i < n_centers; ++i) {
        Coords c(static_cast<std::size_t>(dim));
        for (double& v : c)
            v = rng.next_double(0.0, 10.0);
        ctrs.push_back(std::move(c));
    }
    return MetricSpace::euclidean_discrete(std::move(pts), std::move(ctrs));
}

// Connected random graph: a random spanning tree plus a few chords. Points
// and centers are sampled from the vertices.
inline MetricSpace random_graph_metric(SplitRng& rng, int nv, int n_points, int n_centers) {
    std::vector<MetricSpace::GraphEdge> edges;
    auto name = [](int v) { return "g" + std::to_string(v); };
    for (int v = 1; v < nv; ++v)
        edges.push_back({name(static_cast<int>(rng.next_index(static_cast<std::size_t>(v)))), name(v),
                         rng.next_double(0.5, 4.0)});
    const int extra = static_cast<int>(rng.next_index(static_cast<std::size_t>(nv)));
    for (int e = 0; e < extra; ++e) {
        const int a = static_cast<int>(rng.next_index(static_cast<std::size_t>(nv)));
        const int b = static_cast<int>(rng.next_index(static_cast<std::size_t>(nv)));
        if (a != b)
            edges.push_back({name(a), name(b), rng.next_double(0.5, 6.0)});
    }
    std::vector<std::string> pids, cids;
    for (int i = 0; i < n_points; ++i)
        pids.push_back(name(static_cast<int>(rng.next_index(static_cast<std::size_t>(nv)))));
    for (int i = 0; i < n_centers; ++i)
        cids.push_back(name(static_cast<int>(rng.next_index(static_cast<std::size_t>(nv)))));
    return MetricSpace::graph(edges, std::move(pids), std::move(cids));
}

// Star graph with unit edges; the hub is the first point (so unit-radius play
// is already at the natural scale) and the last center.
inline MetricSpace star_metric(int leaves) {
    std::vector<MetricSpace::GraphEdge> edges;
    std::vector<std::string> pids{"hub"}, cids;
    for (int i = 0; i < leaves; ++i) {
        edges.push_back({"hub", "leaf" + std::to_string(i), 1.0});
        pids.push_back("leaf" + std::to_string(i));
        cids.push_back("leaf" + std::to_string(i));
    }
    cids.push_back("hub");
    return MetricSpace::graph(edges, std::move(pids), std::move(cids));
}

// The norm rotation used by the end-to-end comparisons.
inline NormObjective acceptance_norm(int which, int n, SplitRng& rng) {
    switch (which % 7) {
    case 0:
        return NormObjective::lz(1.0, n);
    case 1:
        return NormObjective::lz(2.0, n);
    case 2:
        return NormObjective::lz(normkc::kInfExponent, n);
    case 3:
        return NormObjective::top_l(std::min(2, n), n);
    case 4: {
        std::vector<double> w(static_cast<std::size_t>(n));
        for (double& v : w)
            v = rng.next_double(0.2, 2.0);
        return NormObjective::weighted_max(std::move(w));
    }
    case 5: {
        std::vector<std::vector<double>> groups(2);
        groups[0].assign(static_cast<std::size_t>(n), 0.0);
        groups[1].assign(static_cast<std::size_t>(n), 0.0);
        for (int p = 0; p < n; ++p)
            groups[rng.next_index(2)][static_cast<std::size_t>(p)] = 1.0;
        bool g0 = false, g1 = false;
        for (int p = 0; p < n; ++p) {
            g0 = g0 || groups[0][static_cast<std::size_t>(p)] > 0.0;
            g1 = g1 || groups[1][static_cast<std::size_t>(p)] > 0.0;
        }
        if (!g0)
            groups[0][0] = 1.0;
        if (!g1)
            groups[1][static_cast<std::size_t>(n - 1)] = 1.0;
        return NormObjective::fair_group(normkc::kInfExponent, 1.0, std::move(groups));
    }
    default: {
        std::vector<double> v(static_cast<std::size_t>(n));
        for (double& x : v)
            x = rng.next_double(0.0, 2.0);
        std::sort(v.begin(), v.end(), std::greater<>());
        v.front() += 0.2;
        return NormObjective::ordered(std::move(v));
    }
    }
}

// Random small instance cycling metric families and norms, as used by the
// oracle-equivalence comparisons.
inline Instance random_small_instance(SplitRng& rng, int index) {
    const int n = 4 + static_cast<int>(rng.next_index(7));   // <= 10
    const int m = 3 + static_cast<int>(rng.next_index(6));   // <= 8
    const int k = 1 + static_cast<int>(rng.next_index(3));
    MetricSpace space = [&] {
        switch (index % 3) {
        case 0:
            return random_explicit_metric(rng, n, m);
        case 1:
            return random_euclidean_discrete(rng, n, m, 2);
        default:
            return random_graph_metric(rng, std::max(n + 2, 8), n, m);
        }
    }();
    NormObjective norm = acceptance_norm(index, space.num_points(), rng);
    return Instance{std::move(space), std::move(norm), std::min(k, m)};
}

// Larger instances for exercising long runs of the main loop.
inline Instance random_medium_instance(SplitRng& rng, int index) {
    const int n = 16 + static_cast<int>(rng.next_index(12));
    const int m = 10 + static_cast<int>(rng.next_index(7));
    const int k = 2 + static_cast<int>(rng.next_index(3));
    MetricSpace space = index % 2 == 0 ? random_euclidean_discrete(rng, n, m, 2)
                                       : random_explicit_metric(rng, n, m);
    NormObjective norm = acceptance_norm(index, space.num_points(), rng);
    return Instance{std::move(space), std::move(norm), k};
}

}  // namespace testsupport
