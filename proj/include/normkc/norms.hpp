#pragma once

// Monotone norm objectives over point-indexed cost vectors: the l_z family,
// weighted max, top-l, ordered and priority-ordered weighted norms, two-level
// fair group norms, and cascaded DAG compositions of l_q aggregations. Every
// variant has an exact evaluation and an exact (hence epsilon-approximate for
// any epsilon) subgradient in closed form.

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "normkc/errors.hpp"

namespace normkc {

inline constexpr double kInfExponent = std::numeric_limits<double>::infinity();

// Nonnegative vector g with g.x >= f(x)/(1+epsilon_sg) at its anchor x and
// g.y <= f(y) for every y >= 0.
struct SubgradientVector {
    std::vector<double> g;
    double epsilon_sg = 0.0;

    double dot(std::span<const double> x) const {
        double s = 0.0;
        for (std::size_t i = 0; i < g.size(); ++i)
            s += g[i] * x[i];
        return s;
    }
};

// Aggregation DAG: one source per point, internal nodes labelled with an l_q
// exponent, nonnegative edge weights, a single sink.
struct CascadeDag {
    struct InternalNode {
        int id;
        double q;  // >= 1 or infinity
    };
    std::vector<InternalNode> nodes;
    std::vector<int> sources;  // node id of point i at position i
    struct Edge {
        int from, to;
        double weight;
    };
    std::vector<Edge> edges;
};

namespace detail {

// Validated, topologically ordered form of a CascadeDag.
struct CompiledDag {
    int node_count = 0;
    std::vector<double> q;            // per node; NaN for sources
    std::vector<int> source_of;       // point index -> node
    std::vector<std::vector<std::pair<int, double>>> in_edges;   // per node
    std::vector<int> topo_order;      // sources first is not guaranteed, just valid
    int sink = -1;

    static CompiledDag compile(const CascadeDag& dag) {
        CompiledDag c;
        std::vector<int> ids;
        auto intern = [&](int id) {
            auto it = std::find(ids.begin(), ids.end(), id);
            if (it != ids.end())
                return static_cast<int>(it - ids.begin());
            ids.push_back(id);
            return static_cast<int>(ids.size() - 1);
        };
        if (dag.sources.empty())
            throw input_error("cascade: no source nodes");
        const double nan = std::numeric_limits<double>::quiet_NaN();
        for (int id : dag.sources) {
            const int v = intern(id);
            if (v != static_cast<int>(c.source_of.size()))
                throw input_error("cascade: duplicate source id " + std::to_string(id));
            c.source_of.push_back(v);
            c.q.push_back(nan);
        }
        for (const CascadeDag::InternalNode& n : dag.nodes) {
            if (!(n.q >= 1.0))
                throw input_error("cascade: node exponent must be >= 1");
            const int v = intern(n.id);
            if (v != static_cast<int>(c.q.size()))
                throw input_error("cascade: duplicate node id " + std::to_string(n.id));
            c.q.push_back(n.q);
        }
        c.node_count = static_cast<int>(ids.size());
        c.in_edges.resize(static_cast<std::size_t>(c.node_count));
        std::vector<int> out_degree(static_cast<std::size_t>(c.node_count), 0);
        std::vector<int> in_degree(static_cast<std::size_t>(c.node_count), 0);
        for (const CascadeDag::Edge& e : dag.edges) {
            if (!(e.weight >= 0.0) || !std::isfinite(e.weight))
                throw input_error("cascade: edge weight must be finite and nonnegative");
            auto find_id = [&](int id) {
                auto it = std::find(ids.begin(), ids.end(), id);
                if (it == ids.end())
                    throw input_error("cascade: edge references unknown node id " + std::to_string(id));
                return static_cast<int>(it - ids.begin());
            };
            const int u = find_id(e.from), v = find_id(e.to);
            if (v < static_cast<int>(c.source_of.size()) && std::isnan(c.q[static_cast<std::size_t>(v)]))
                throw input_error("cascade: source node has an incoming edge");
            c.in_edges[static_cast<std::size_t>(v)].emplace_back(u, e.weight);
            ++out_degree[static_cast<std::size_t>(u)];
            ++in_degree[static_cast<std::size_t>(v)];
        }
        for (int v = static_cast<int>(dag.sources.size()); v < c.node_count; ++v)
            if (in_degree[static_cast<std::size_t>(v)] == 0)
                throw input_error("cascade: internal node without inputs");
        int sink_count = 0;
        for (int v = 0; v < c.node_count; ++v)
            if (out_degree[static_cast<std::size_t>(v)] == 0) {
                ++sink_count;
                c.sink = v;
            }
        if (sink_count != 1)
            throw input_error("cascade: DAG must have exactly one sink, found " +
                              std::to_string(sink_count));
        // Kahn topological order; leftover nodes mean a cycle.
        std::vector<int> indeg = in_degree;
        std::vector<int> stack;
        for (int v = 0; v < c.node_count; ++v)
            if (indeg[static_cast<std::size_t>(v)] == 0)
                stack.push_back(v);
        std::vector<std::vector<int>> out_edges(static_cast<std::size_t>(c.node_count));
        for (int v = 0; v < c.node_count; ++v)
            for (const auto& [u, w] : c.in_edges[static_cast<std::size_t>(v)])
                out_edges[static_cast<std::size_t>(u)].push_back(v);
        while (!stack.empty()) {
            const int v = stack.back();
            stack.pop_back();
            c.topo_order.push_back(v);
            for (int to : out_edges[static_cast<std::size_t>(v)])
                if (--indeg[static_cast<std::size_t>(to)] == 0)
                    stack.push_back(to);
        }
        if (static_cast<int>(c.topo_order.size()) != c.node_count)
            throw input_error("cascade: DAG contains a cycle");
        return c;
    }
};

// (sum_u w_u t_u^q)^(1/q), scaled for overflow safety; q = inf is the max
// over inputs with positive weight.
inline double lq_combine(std::span<const std::pair<int, double>> in,
                         std::span<const double> value, double q) {
    if (q == kInfExponent) {
        double m = 0.0;
        for (const auto& [u, w] : in)
            if (w > 0.0)
                m = std::max(m, value[static_cast<std::size_t>(u)]);
        return m;
    }
    double peak = 0.0;
    for (const auto& [u, w] : in)
        if (w > 0.0)
            peak = std::max(peak, value[static_cast<std::size_t>(u)]);
    if (peak == 0.0)
        return 0.0;
    double s = 0.0;
    for (const auto& [u, w] : in)
        if (w > 0.0)
            s += w * std::pow(value[static_cast<std::size_t>(u)] / peak, q);
    return peak * std::pow(s, 1.0 / q);
}

}  // namespace detail

class NormObjective {
public:
    enum class Variant { lz, weighted_max, top_l, ordered, priority_ordered, fair_group, cascade };

    static NormObjective lz(double z, int n) {
        require(n >= 1, "norm: dimension must be positive");
        require(z >= 1.0, "lz norm: z must be >= 1 (or infinity)");
        NormObjective f(Variant::lz, n);
        f.z_ = z;
        return f;
    }

    static NormObjective weighted_max(std::vector<double> w) {
        require(!w.empty(), "weighted_max: empty weight vector");
        require_nonneg(w, "weighted_max: weights");
        NormObjective f(Variant::weighted_max, static_cast<int>(w.size()));
        f.w_ = std::move(w);
        return f;
    }

    static NormObjective top_l(int l, int n) {
        require(n >= 1, "norm: dimension must be positive");
        require(l >= 1, "top_l: l must be a positive integer");
        require(l <= n, "top_l: l exceeds the number of points");
        NormObjective f(Variant::top_l, n);
        f.l_ = l;
        return f;
    }

    static NormObjective ordered(std::vector<double> v) {
        require(!v.empty(), "ordered: empty cost vector");
        require_nonneg(v, "ordered: cost vector");
        require_nonincreasing(v, "ordered: cost vector");
        NormObjective f(Variant::ordered, static_cast<int>(v.size()));
        f.v_ = std::move(v);
        return f;
    }

    static NormObjective priority_ordered(std::vector<double> v, std::vector<double> w) {
        require(!v.empty(), "priority_ordered: empty cost vector");
        require(v.size() == w.size(), "priority_ordered: v and w must have equal length");
        require_nonneg(v, "priority_ordered: cost vector");
        require_nonneg(w, "priority_ordered: priority vector");
        require_nonincreasing(v, "priority_ordered: cost vector");
        NormObjective f(Variant::priority_ordered, static_cast<int>(v.size()));
        f.v_ = std::move(v);
        f.w_ = std::move(w);
        return f;
    }

    // f(x) = || (h_1(x),...,h_m(x)) ||_q with h_i a weighted l_z norm. Built
    // as the equivalent three-layer cascade.
    static NormObjective fair_group(double q, double z, std::vector<std::vector<double>> groups) {
        require(q >= 1.0, "fair_group: q must be >= 1 (or infinity)");
        require(z >= 1.0, "fair_group: z must be >= 1 (or infinity)");
        require(!groups.empty(), "fair_group: at least one group required");
        const int n = static_cast<int>(groups.front().size());
        require(n >= 1, "fair_group: empty group weight vectors");
        CascadeDag dag;
        for (int p = 0; p < n; ++p)
            dag.sources.push_back(p);
        const int m = static_cast<int>(groups.size());
        for (int i = 0; i < m; ++i) {
            require(static_cast<int>(groups[static_cast<std::size_t>(i)].size()) == n,
                    "fair_group: group weight vectors must all have length |P|");
            require_nonneg(groups[static_cast<std::size_t>(i)], "fair_group: group weights");
            dag.nodes.push_back({n + i, z});
            for (int p = 0; p < n; ++p)
                dag.edges.push_back({p, n + i, groups[static_cast<std::size_t>(i)][static_cast<std::size_t>(p)]});
        }
        dag.nodes.push_back({n + m, q});
        for (int i = 0; i < m; ++i)
            dag.edges.push_back({n + i, n + m, 1.0});
        NormObjective f(Variant::fair_group, n);
        f.dag_ = detail::CompiledDag::compile(dag);
        return f;
    }

    static NormObjective cascade(const CascadeDag& dag) {
        NormObjective f(Variant::cascade, static_cast<int>(dag.sources.size()));
        f.dag_ = detail::CompiledDag::compile(dag);
        return f;
    }

    Variant variant() const { return variant_; }
    int dimension() const { return n_; }

    double evaluate(std::span<const double> x) const {
        check_input(x);
        switch (variant_) {
        case Variant::lz: {
            if (z_ == kInfExponent)
                return *std::max_element(x.begin(), x.end());
            if (z_ == 1.0)
                return std::accumulate(x.begin(), x.end(), 0.0);
            const double peak = *std::max_element(x.begin(), x.end());
            if (peak == 0.0)
                return 0.0;
            double s = 0.0;
            for (double xi : x)
                s += std::pow(xi / peak, z_);
            return peak * std::pow(s, 1.0 / z_);
        }
        case Variant::weighted_max: {
            double m = 0.0;
            for (int p = 0; p < n_; ++p)
                m = std::max(m, w_[static_cast<std::size_t>(p)] * x[static_cast<std::size_t>(p)]);
            return m;
        }
        case Variant::top_l: {
            std::vector<double> s(x.begin(), x.end());
            std::nth_element(s.begin(), s.begin() + (l_ - 1), s.end(), std::greater<>());
            return std::accumulate(s.begin(), s.begin() + l_, 0.0);
        }
        case Variant::ordered: {
            std::vector<double> s(x.begin(), x.end());
            std::sort(s.begin(), s.end(), std::greater<>());
            double acc = 0.0;
            for (int j = 0; j < n_; ++j)
                acc += v_[static_cast<std::size_t>(j)] * s[static_cast<std::size_t>(j)];
            return acc;
        }
        case Variant::priority_ordered: {
            std::vector<double> s(static_cast<std::size_t>(n_));
            for (int p = 0; p < n_; ++p)
                s[static_cast<std::size_t>(p)] = w_[static_cast<std::size_t>(p)] * x[static_cast<std::size_t>(p)];
            std::sort(s.begin(), s.end(), std::greater<>());
            double acc = 0.0;
            for (int j = 0; j < n_; ++j)
                acc += v_[static_cast<std::size_t>(j)] * s[static_cast<std::size_t>(j)];
            return acc;
        }
        case Variant::fair_group:
        case Variant::cascade:
            return dag_values(x)[static_cast<std::size_t>(dag_.sink)];
        }
        throw input_error("norm: unknown variant");
    }

    // f(1_B) for a point subset B: the maximum weight any subgradient can
    // place on B.
    double ball_mass(std::span<const int> member_set) const {
        std::vector<double> ind(static_cast<std::size_t>(n_), 0.0);
        for (int p : member_set) {
            if (p < 0 || p >= n_)
                throw input_error("ball_mass: point index out of range");
            ind[static_cast<std::size_t>(p)] = 1.0;
        }
        return evaluate(ind);
    }

    SubgradientVector subgradient(std::span<const double> x, double epsilon_sg) const {
        check_input(x);
        if (!(epsilon_sg > 0.0 && epsilon_sg < 1.0))
            throw input_error("subgradient: epsilon must lie in (0,1)");
        SubgradientVector out;
        out.epsilon_sg = epsilon_sg;
        out.g.assign(static_cast<std::size_t>(n_), 0.0);
        switch (variant_) {
        case Variant::lz: {
            if (z_ == 1.0) {
                std::fill(out.g.begin(), out.g.end(), 1.0);
                break;
            }
            if (z_ == kInfExponent) {
                out.g[static_cast<std::size_t>(argmax_ties_low(x))] = 1.0;
                break;
            }
            const double peak = *std::max_element(x.begin(), x.end());
            if (peak == 0.0) {
                // subdifferential at 0 is the whole dual ball; fix the
                // gradient taken at the all-ones vector
                const double gp = std::pow(static_cast<double>(n_), -(z_ - 1.0) / z_);
                std::fill(out.g.begin(), out.g.end(), gp);
                break;
            }
            double s = 0.0;
            for (double xi : x)
                s += std::pow(xi / peak, z_);
            const double denom = std::pow(s, (z_ - 1.0) / z_);
            for (int p = 0; p < n_; ++p)
                out.g[static_cast<std::size_t>(p)] =
                    std::pow(x[static_cast<std::size_t>(p)] / peak, z_ - 1.0) / denom;
            break;
        }
        case Variant::weighted_max: {
            int best = 0;
            double bv = -1.0;
            for (int p = 0; p < n_; ++p) {
                const double v = w_[static_cast<std::size_t>(p)] * x[static_cast<std::size_t>(p)];
                if (v > bv) {
                    bv = v;
                    best = p;
                }
            }
            out.g[static_cast<std::size_t>(best)] = w_[static_cast<std::size_t>(best)];
            break;
        }
        case Variant::top_l: {
            const std::vector<int> order = descending_order(x);
            for (int j = 0; j < l_; ++j)
                out.g[static_cast<std::size_t>(order[static_cast<std::size_t>(j)])] = 1.0;
            break;
        }
        case Variant::ordered: {
            const std::vector<int> order = descending_order(x);
            for (int j = 0; j < n_; ++j)
                out.g[static_cast<std::size_t>(order[static_cast<std::size_t>(j)])] =
                    v_[static_cast<std::size_t>(j)];
            break;
        }
        case Variant::priority_ordered: {
            std::vector<double> xw(static_cast<std::size_t>(n_));
            for (int p = 0; p < n_; ++p)
                xw[static_cast<std::size_t>(p)] = w_[static_cast<std::size_t>(p)] * x[static_cast<std::size_t>(p)];
            const std::vector<int> order = descending_order(xw);
            for (int j = 0; j < n_; ++j) {
                const int p = order[static_cast<std::size_t>(j)];
                out.g[static_cast<std::size_t>(p)] =
                    v_[static_cast<std::size_t>(j)] * w_[static_cast<std::size_t>(p)];
            }
            break;
        }
        case Variant::fair_group:
        case Variant::cascade: {
            out.g = dag_subgradient(x);
            break;
        }
        }
        return out;
    }

    std::string describe() const {
        switch (variant_) {
        case Variant::lz:
            return z_ == kInfExponent ? "lz(inf)" : "lz(" + std::to_string(z_) + ")";
        case Variant::weighted_max:
            return "weighted_max";
        case Variant::top_l:
            return "top_l(" + std::to_string(l_) + ")";
        case Variant::ordered:
            return "ordered";
        case Variant::priority_ordered:
            return "priority_ordered";
        case Variant::fair_group:
            return "fair_group";
        case Variant::cascade:
            return "cascade";
        }
        return "?";
    }

private:
    NormObjective(Variant v, int n) : variant_(v), n_(n) {}

    static void require(bool ok, const char* msg) {
        if (!ok)
            throw input_error(msg);
    }
    static void require_nonneg(const std::vector<double>& v, const std::string& what) {
        for (double x : v)
            if (!(x >= 0.0) || !std::isfinite(x))
                throw input_error(what + " must be finite and nonnegative");
    }
    static void require_nonincreasing(const std::vector<double>& v, const std::string& what) {
        for (std::size_t i = 1; i < v.size(); ++i)
            if (v[i] > v[i - 1])
                throw input_error(what + " must be non-increasing");
    }

    void check_input(std::span<const double> x) const {
        if (static_cast<int>(x.size()) != n_)
            throw input_error("norm: vector has dimension " + std::to_string(x.size()) +
                              ", expected " + std::to_string(n_));
        for (double xi : x)
            if (!(xi >= 0.0) || !std::isfinite(xi))
                throw input_error("norm: vector components must be finite and nonnegative");
    }

    static int argmax_ties_low(std::span<const double> x) {
        int best = 0;
        for (int p = 1; p < static_cast<int>(x.size()); ++p)
            if (x[static_cast<std::size_t>(p)] > x[static_cast<std::size_t>(best)])
                best = p;
        return best;
    }

    // Indices sorted by value descending, ties by lowest index.
    static std::vector<int> descending_order(std::span<const double> x) {
        std::vector<int> order(x.size());
        std::iota(order.begin(), order.end(), 0);
        std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
            return x[static_cast<std::size_t>(a)] > x[static_cast<std::size_t>(b)];
        });
        return order;
    }

    std::vector<double> dag_values(std::span<const double> x) const {
        std::vector<double> value(static_cast<std::size_t>(dag_.node_count), 0.0);
        for (int p = 0; p < n_; ++p)
            value[static_cast<std::size_t>(dag_.source_of[static_cast<std::size_t>(p)])] =
                x[static_cast<std::size_t>(p)];
        for (int v : dag_.topo_order) {
            const auto& in = dag_.in_edges[static_cast<std::size_t>(v)];
            if (in.empty())
                continue;  // source
            value[static_cast<std::size_t>(v)] =
                detail::lq_combine(in, value, dag_.q[static_cast<std::size_t>(v)]);
        }
        return value;
    }

    // Chain rule down the DAG. Each node's local subgradient of
    // t -> (sum w_u t_u^q)^(1/q) is taken at the current input values, or at
    // the all-ones anchor when the node evaluates to zero; both choices are
    // globally valid underestimators, so the composed g is a subgradient.
    std::vector<double> dag_subgradient(std::span<const double> x) const {
        const std::vector<double> value = dag_values(x);
        std::vector<double> coeff(static_cast<std::size_t>(dag_.node_count), 0.0);
        coeff[static_cast<std::size_t>(dag_.sink)] = 1.0;
        for (auto it = dag_.topo_order.rbegin(); it != dag_.topo_order.rend(); ++it) {
            const int v = *it;
            const double cv = coeff[static_cast<std::size_t>(v)];
            const auto& in = dag_.in_edges[static_cast<std::size_t>(v)];
            if (in.empty() || cv == 0.0)
                continue;
            const double q = dag_.q[static_cast<std::size_t>(v)];
            if (q == kInfExponent) {
                int best = -1;
                double bv = -1.0;
                for (const auto& [u, w] : in)
                    if (w > 0.0 && value[static_cast<std::size_t>(u)] > bv) {
                        bv = value[static_cast<std::size_t>(u)];
                        best = u;
                    }
                if (best >= 0)
                    coeff[static_cast<std::size_t>(best)] += cv;
                continue;
            }
            if (value[static_cast<std::size_t>(v)] == 0.0) {
                double wsum = 0.0;
                for (const auto& [u, w] : in)
                    wsum += w;
                if (wsum <= 0.0)
                    continue;
                const double denom = std::pow(wsum, (q - 1.0) / q);
                for (const auto& [u, w] : in)
                    coeff[static_cast<std::size_t>(u)] += cv * w / denom;
                continue;
            }
            const double hv = value[static_cast<std::size_t>(v)];
            for (const auto& [u, w] : in) {
                if (w <= 0.0)
                    continue;
                const double t = value[static_cast<std::size_t>(u)] / hv;
                coeff[static_cast<std::size_t>(u)] += cv * w * std::pow(t, q - 1.0);
            }
        }
        std::vector<double> g(static_cast<std::size_t>(n_));
        for (int p = 0; p < n_; ++p)
            g[static_cast<std::size_t>(p)] =
                coeff[static_cast<std::size_t>(dag_.source_of[static_cast<std::size_t>(p)])];
        return g;
    }

    Variant variant_;
    int n_;
    double z_ = 2.0;
    int l_ = 1;
    std::vector<double> v_, w_;
    detail::CompiledDag dag_;
};

}  // namespace normkc
