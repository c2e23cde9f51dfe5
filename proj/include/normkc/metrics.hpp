#pragma once

// Metric clustering spaces (P, F, delta): explicit distance matrices, graph
// shortest-path metrics, and discrete/continuous Euclidean point sets, with
// distance, nearest-center and ball queries.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <memory>
#include <mutex>
#include <queue>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "normkc/errors.hpp"
#include "normkc/rng.hpp"

namespace normkc {

using Coords = std::vector<double>;

// A center is an index into F for finite spaces, or explicit coordinates for
// continuous Euclidean spaces.
using Center = std::variant<int, Coords>;

inline bool is_index_center(const Center& c) { return std::holds_alternative<int>(c); }
inline int center_index(const Center& c) { return std::get<int>(c); }
inline const Coords& center_coords(const Center& c) { return std::get<Coords>(c); }

inline double euclidean_distance(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = a[i] - b[i];
        s += d * d;
    }
    return std::sqrt(s);
}

struct MetricOptions {
    bool validate_triangle = true;  // full check up to 200 ids, sampled above
};

class MetricSpace {
public:
    enum class Kind { explicit_matrix, graph, euclidean_discrete, euclidean_continuous };

    static MetricSpace explicit_matrix(std::vector<std::string> ids,
                                       std::vector<std::string> point_ids,
                                       std::vector<std::string> center_ids,
                                       std::vector<std::vector<double>> matrix,
                                       const MetricOptions& opts = {});

    struct GraphEdge {
        std::string u, v;
        double w;
    };
    static MetricSpace graph(const std::vector<GraphEdge>& edges,
                             std::vector<std::string> point_ids,
                             std::vector<std::string> center_ids);

    static MetricSpace euclidean_discrete(std::vector<Coords> points, std::vector<Coords> centers);
    static MetricSpace euclidean_continuous(std::vector<Coords> points);

    Kind kind() const { return kind_; }
    bool finite_centers() const { return kind_ != Kind::euclidean_continuous; }
    int num_points() const { return n_; }

    int num_centers() const {
        if (!finite_centers())
            throw unsupported_error("center set of a continuous space is not enumerable");
        return m_;
    }

    // Euclidean variants only.
    int dim() const {
        if (kind_ != Kind::euclidean_discrete && kind_ != Kind::euclidean_continuous)
            throw unsupported_error("dim() requires a Euclidean space");
        return dim_;
    }
    const Coords& point_coords(int p) const { return coords_p_.at(static_cast<std::size_t>(p)); }

    double point_distance(int p, int q) const {
        check_point(p);
        check_point(q);
        switch (kind_) {
        case Kind::explicit_matrix:
            return scale_ * mat(point_row_[p], point_row_[q]);
        case Kind::graph:
            return scale_ * graph_distance(point_vertex_[p], point_vertex_[q]);
        default:
            return scale_ * euclidean_distance(coords_p_[p], coords_p_[q]);
        }
    }

    double point_center_distance(int p, const Center& c) const {
        check_point(p);
        switch (kind_) {
        case Kind::explicit_matrix:
            return scale_ * mat(point_row_[p], center_row_[check_center(c)]);
        case Kind::graph:
            return scale_ * graph_distance(point_vertex_[p], center_vertex_[check_center(c)]);
        case Kind::euclidean_discrete:
            return scale_ * euclidean_distance(coords_p_[p], coords_f_[check_center(c)]);
        default: {
            const Coords& x = center_coords(c);
            if (static_cast<int>(x.size()) != dim_)
                throw input_error("center coordinate dimension mismatch");
            return scale_ * euclidean_distance(coords_p_[p], x);
        }
        }
    }

    double center_distance(const Center& a, const Center& b) const {
        switch (kind_) {
        case Kind::explicit_matrix:
            return scale_ * mat(center_row_[check_center(a)], center_row_[check_center(b)]);
        case Kind::graph:
            return scale_ * graph_distance(center_vertex_[check_center(a)], center_vertex_[check_center(b)]);
        case Kind::euclidean_discrete:
            return scale_ * euclidean_distance(coords_f_[check_center(a)], coords_f_[check_center(b)]);
        default:
            return scale_ * euclidean_distance(center_coords(a), center_coords(b));
        }
    }

    // delta(p, X) for every p, componentwise minimum over the center list.
    std::vector<double> distance_vector(std::span<const Center> centers) const {
        if (centers.empty())
            throw input_error("distance_vector: empty center set");
        std::vector<double> d(static_cast<std::size_t>(n_), std::numeric_limits<double>::infinity());
        for (const Center& c : centers)
            for (int p = 0; p < n_; ++p)
                d[static_cast<std::size_t>(p)] =
                    std::min(d[static_cast<std::size_t>(p)], point_center_distance(p, c));
        return d;
    }

    // Closed ball around point p, membership guard delta <= r * (1 + 1e-12).
    std::vector<int> ball_points(int p, double r) const {
        if (r < 0)
            throw input_error("ball: negative radius");
        std::vector<int> out;
        const double bound = r * (1.0 + 1e-12);
        for (int q = 0; q < n_; ++q)
            if (point_distance(p, q) <= bound)
                out.push_back(q);
        return out;
    }

    std::vector<int> ball_centers(int p, double r) const {
        if (r < 0)
            throw input_error("ball: negative radius");
        const int m = num_centers();
        std::vector<int> out;
        const double bound = r * (1.0 + 1e-12);
        for (int c = 0; c < m; ++c)
            if (point_center_distance(p, Center{c}) <= bound)
                out.push_back(c);
        return out;
    }

    double max_point_distance_from(int p) const {
        double r = 0.0;
        for (int q = 0; q < n_; ++q)
            r = std::max(r, point_distance(p, q));
        return r;
    }

    double point_diameter() const {
        double r = 0.0;
        for (int p = 0; p < n_; ++p)
            r = std::max(r, max_point_distance_from(p));
        return r;
    }

    // Copy with every distance multiplied by c, exactly (the scale factor is
    // applied at query time, never baked into coordinates).
    MetricSpace scaled(double c) const {
        if (!(c > 0))
            throw input_error("scaled: factor must be positive");
        MetricSpace out = *this;
        out.scale_ *= c;
        out.dijkstra_cache_ = std::make_shared<DijkstraCache>();
        return out;
    }

    // Multiplier applied to every raw distance (see scaled()).
    double distance_scale() const { return scale_; }

    const std::vector<std::string>& point_names() const { return point_names_; }
    const std::vector<std::string>& center_names() const { return center_names_; }

    // Index of a point by its id string, -1 if unknown (matrix/graph spaces).
    int find_point(const std::string& id) const {
        for (std::size_t i = 0; i < point_names_.size(); ++i)
            if (point_names_[i] == id)
                return static_cast<int>(i);
        return -1;
    }

private:
    MetricSpace() = default;

    void check_point(int p) const {
        if (p < 0 || p >= n_)
            throw input_error("point index out of range: " + std::to_string(p));
    }
    int check_center(const Center& c) const {
        if (!is_index_center(c))
            throw input_error("coordinate center given for a finite space");
        const int i = center_index(c);
        if (i < 0 || i >= m_)
            throw input_error("center index out of range: " + std::to_string(i));
        return i;
    }

    double mat(int i, int j) const { return matrix_[static_cast<std::size_t>(i) * mat_n_ + j]; }

    // --- graph internals -------------------------------------------------
    struct DijkstraCache {
        std::mutex mu;
        std::map<int, std::vector<double>> from;  // source vertex -> distances
    };

    const std::vector<double>& distances_from_vertex(int src) const {
        {
            std::lock_guard<std::mutex> lock(dijkstra_cache_->mu);
            auto it = dijkstra_cache_->from.find(src);
            if (it != dijkstra_cache_->from.end())
                return it->second;
        }
        std::vector<double> dist = run_dijkstra(src);
        std::lock_guard<std::mutex> lock(dijkstra_cache_->mu);
        return dijkstra_cache_->from.emplace(src, std::move(dist)).first->second;
    }

    std::vector<double> run_dijkstra(int src) const {
        const std::size_t nv = adjacency_.size();
        std::vector<double> dist(nv, std::numeric_limits<double>::infinity());
        dist[static_cast<std::size_t>(src)] = 0.0;
        using Item = std::pair<double, int>;
        std::priority_queue<Item, std::vector<Item>, std::greater<>> heap;
        heap.emplace(0.0, src);
        while (!heap.empty()) {
            auto [d, v] = heap.top();
            heap.pop();
            if (d > dist[static_cast<std::size_t>(v)])
                continue;
            for (const auto& [to, w] : adjacency_[static_cast<std::size_t>(v)]) {
                const double nd = d + w;
                if (nd < dist[static_cast<std::size_t>(to)]) {
                    dist[static_cast<std::size_t>(to)] = nd;
                    heap.emplace(nd, to);
                }
            }
        }
        return dist;
    }

    double graph_distance(int u, int v) const {
        const double d = distances_from_vertex(u)[static_cast<std::size_t>(v)];
        if (!std::isfinite(d))
            throw input_error("graph metric: vertices are disconnected");
        return d;
    }

    Kind kind_ = Kind::euclidean_discrete;
    int n_ = 0;    // |P|
    int m_ = 0;    // |F| for finite variants
    int dim_ = 0;  // Euclidean variants
    double scale_ = 1.0;

    // explicit matrix
    std::size_t mat_n_ = 0;
    std::vector<double> matrix_;
    std::vector<int> point_row_, center_row_;

    // graph
    std::vector<std::vector<std::pair<int, double>>> adjacency_;
    std::vector<int> point_vertex_, center_vertex_;
    std::shared_ptr<DijkstraCache> dijkstra_cache_;

    // euclidean
    std::vector<Coords> coords_p_, coords_f_;

    std::vector<std::string> point_names_, center_names_;
};

// A k-clustering solution: centers, induced distance vector, objective cost.
struct Solution {
    std::vector<Center> centers;
    std::vector<double> dist_vector;
    double cost = 0.0;
};

inline MetricSpace MetricSpace::explicit_matrix(std::vector<std::string> ids,
                                                std::vector<std::string> point_ids,
                                                std::vector<std::string> center_ids,
                                                std::vector<std::vector<double>> matrix,
                                                const MetricOptions& opts) {
    const std::size_t N = ids.size();
    if (N == 0)
        throw input_error("explicit metric: empty id list");
    if (matrix.size() != N)
        throw input_error("explicit metric: matrix must have one row per id");
    MetricSpace s;
    s.kind_ = Kind::explicit_matrix;
    s.mat_n_ = N;
    s.matrix_.assign(N * N, 0.0);
    for (std::size_t i = 0; i < N; ++i) {
        if (matrix[i].size() != N)
            throw input_error("explicit metric: matrix row " + std::to_string(i) + " has wrong length");
        for (std::size_t j = 0; j < N; ++j)
            s.matrix_[i * N + j] = matrix[i][j];
    }
    for (std::size_t i = 0; i < N; ++i) {
        if (s.matrix_[i * N + i] != 0.0)
            throw input_error("explicit metric: nonzero diagonal entry for id '" + ids[i] + "'");
        for (std::size_t j = 0; j < N; ++j) {
            const double a = s.matrix_[i * N + j];
            if (!(a >= 0.0) || !std::isfinite(a))
                throw input_error("explicit metric: distances must be finite and nonnegative");
            const double b = s.matrix_[j * N + i];
            if (std::abs(a - b) > 1e-9 * std::max({1.0, a, b}))
                throw input_error("explicit metric: matrix is not symmetric");
        }
    }
    // canonicalize the upper triangle onto the lower one
    for (std::size_t i = 0; i < N; ++i)
        for (std::size_t j = i + 1; j < N; ++j)
            s.matrix_[j * N + i] = s.matrix_[i * N + j];

    if (opts.validate_triangle) {
        auto check = [&](std::size_t i, std::size_t j, std::size_t k) {
            const double lhs = s.matrix_[i * N + k];
            const double rhs = s.matrix_[i * N + j] + s.matrix_[j * N + k];
            if (lhs > rhs + 1e-9 * std::max(1.0, rhs))
                throw input_error("explicit metric: triangle inequality violated at ids '" + ids[i] +
                                  "','" + ids[j] + "','" + ids[k] + "'");
        };
        if (N <= 200) {
            for (std::size_t i = 0; i < N; ++i)
                for (std::size_t j = 0; j < N; ++j)
                    for (std::size_t k = 0; k < N; ++k)
                        check(i, j, k);
        } else {
            SplitRng rng(0xfeedULL);
            for (int t = 0; t < 2'000'000; ++t)
                check(rng.next_index(N), rng.next_index(N), rng.next_index(N));
        }
    }

    auto resolve = [&](const std::vector<std::string>& wanted, std::vector<int>& rows) {
        for (const std::string& id : wanted) {
            auto it = std::find(ids.begin(), ids.end(), id);
            if (it == ids.end())
                throw input_error("explicit metric: unknown id '" + id + "'");
            rows.push_back(static_cast<int>(it - ids.begin()));
        }
    };
    if (point_ids.empty())
        point_ids = ids;
    if (center_ids.empty())
        center_ids = ids;
    resolve(point_ids, s.point_row_);
    resolve(center_ids, s.center_row_);
    s.n_ = static_cast<int>(point_ids.size());
    s.m_ = static_cast<int>(center_ids.size());
    s.point_names_ = std::move(point_ids);
    s.center_names_ = std::move(center_ids);
    return s;
}

inline MetricSpace MetricSpace::graph(const std::vector<GraphEdge>& edges,
                                      std::vector<std::string> point_ids,
                                      std::vector<std::string> center_ids) {
    MetricSpace s;
    s.kind_ = Kind::graph;
    std::vector<std::string> vertex_ids;
    auto vertex = [&](const std::string& id) {
        auto it = std::find(vertex_ids.begin(), vertex_ids.end(), id);
        if (it != vertex_ids.end())
            return static_cast<int>(it - vertex_ids.begin());
        vertex_ids.push_back(id);
        s.adjacency_.emplace_back();
        return static_cast<int>(vertex_ids.size() - 1);
    };
    for (const GraphEdge& e : edges) {
        if (!(e.w > 0.0) || !std::isfinite(e.w))
            throw input_error("graph metric: edge weight must be positive ('" + e.u + " " + e.v + "')");
        const int u = vertex(e.u), v = vertex(e.v);
        if (u == v)
            continue;
        s.adjacency_[static_cast<std::size_t>(u)].emplace_back(v, e.w);
        s.adjacency_[static_cast<std::size_t>(v)].emplace_back(u, e.w);
    }
    if (vertex_ids.empty())
        throw input_error("graph metric: no edges");

    if (point_ids.empty())
        point_ids = vertex_ids;
    if (center_ids.empty())
        center_ids = vertex_ids;
    auto resolve = [&](const std::vector<std::string>& wanted, std::vector<int>& out) {
        for (const std::string& id : wanted) {
            auto it = std::find(vertex_ids.begin(), vertex_ids.end(), id);
            if (it == vertex_ids.end())
                throw input_error("graph metric: unknown vertex id '" + id + "'");
            out.push_back(static_cast<int>(it - vertex_ids.begin()));
        }
    };
    resolve(point_ids, s.point_vertex_);
    resolve(center_ids, s.center_vertex_);
    s.n_ = static_cast<int>(point_ids.size());
    s.m_ = static_cast<int>(center_ids.size());
    s.point_names_ = std::move(point_ids);
    s.center_names_ = std::move(center_ids);
    s.dijkstra_cache_ = std::make_shared<DijkstraCache>();

    // P and F must sit in one component; distances of infinity are rejected
    // at load rather than surfacing later.
    const std::vector<double> from_first = s.run_dijkstra(s.point_vertex_.empty()
                                                              ? s.center_vertex_.front()
                                                              : s.point_vertex_.front());
    for (int v : s.point_vertex_)
        if (!std::isfinite(from_first[static_cast<std::size_t>(v)]))
            throw input_error("graph metric: disconnected over P and F");
    for (int v : s.center_vertex_)
        if (!std::isfinite(from_first[static_cast<std::size_t>(v)]))
            throw input_error("graph metric: disconnected over P and F");
    return s;
}

inline MetricSpace MetricSpace::euclidean_discrete(std::vector<Coords> points,
                                                   std::vector<Coords> centers) {
    if (points.empty())
        throw input_error("euclidean metric: empty point set");
    if (centers.empty())
        centers = points;
    MetricSpace s;
    s.kind_ = Kind::euclidean_discrete;
    s.dim_ = static_cast<int>(points.front().size());
    if (s.dim_ == 0)
        throw input_error("euclidean metric: zero-dimensional points");
    auto check_row = [&](const Coords& c, const char* what) {
        if (static_cast<int>(c.size()) != s.dim_)
            throw input_error(std::string("euclidean metric: inconsistent ") + what + " dimensions");
        for (double v : c)
            if (!std::isfinite(v))
                throw input_error(std::string("euclidean metric: non-finite ") + what + " coordinate");
    };
    for (const Coords& c : points)
        check_row(c, "point");
    for (const Coords& c : centers)
        check_row(c, "center");
    s.n_ = static_cast<int>(points.size());
    s.m_ = static_cast<int>(centers.size());
    s.coords_p_ = std::move(points);
    s.coords_f_ = std::move(centers);
    return s;
}

inline MetricSpace MetricSpace::euclidean_continuous(std::vector<Coords> points) {
    MetricSpace s = euclidean_discrete(std::move(points), {});
    s.kind_ = Kind::euclidean_continuous;
    s.m_ = 0;
    s.coords_f_.clear();
    return s;
}

}  // namespace normkc
