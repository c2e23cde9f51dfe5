// Command-line front end: dataset ingestion, norm-spec parsing, run
// configuration, result and trace emission.

#include <cstdio>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "normkc/normkc.hpp"

using namespace normkc;

namespace {

struct MetricFlags {
    std::string points, graph, matrix;
    std::string centers;                      // companion CSV for --points
    std::string graph_points, graph_centers;  // companion id lists for --graph
    bool continuous = false;
    bool no_triangle_check = false;
};

void add_metric_flags(CLI::App* cmd, MetricFlags& f) {
    cmd->add_option("--points", f.points, "points CSV (one row of float coordinates per point)");
    cmd->add_option("--graph", f.graph, "edge list file with lines 'u v w'");
    cmd->add_option("--matrix", f.matrix, "explicit metric JSON with a full distance matrix");
    cmd->add_option("--centers", f.centers, "candidate-center CSV for --points (default: the points)");
    cmd->add_option("--graph-points", f.graph_points, "file listing the point ids, one per line");
    cmd->add_option("--graph-centers", f.graph_centers, "file listing the center ids, one per line");
    cmd->add_flag("--continuous", f.continuous, "with --points: centers range over all of R^d");
    cmd->add_flag("--no-triangle-check", f.no_triangle_check,
                  "skip triangle-inequality validation of explicit matrices");
}

MetricSpace load_space(const MetricFlags& f) {
    const int sources = (!f.points.empty() ? 1 : 0) + (!f.graph.empty() ? 1 : 0) +
                        (!f.matrix.empty() ? 1 : 0);
    if (sources != 1)
        throw input_error("exactly one of --points, --graph, --matrix is required");
    if (!f.points.empty()) {
        if (f.continuous) {
            if (!f.centers.empty())
                throw input_error("--continuous and --centers are mutually exclusive");
            return MetricSpace::euclidean_continuous(load_points_csv(f.points));
        }
        std::vector<Coords> centers;
        if (!f.centers.empty())
            centers = load_points_csv(f.centers);
        return MetricSpace::euclidean_discrete(load_points_csv(f.points), std::move(centers));
    }
    if (!f.graph.empty())
        return load_graph_metric(f.graph, f.graph_points, f.graph_centers);
    MetricOptions opts;
    opts.validate_triangle = !f.no_triangle_check;
    return load_explicit_metric_json(f.matrix, opts);
}

std::vector<int> nearest_assignment(const MetricSpace& space, const std::vector<Center>& centers) {
    std::vector<int> out(static_cast<std::size_t>(space.num_points()), 0);
    for (int p = 0; p < space.num_points(); ++p) {
        double best = space.point_center_distance(p, centers.front());
        for (std::size_t c = 1; c < centers.size(); ++c) {
            const double d = space.point_center_distance(p, centers[c]);
            if (d < best) {
                best = d;
                out[static_cast<std::size_t>(p)] = static_cast<int>(c);
            }
        }
    }
    return out;
}

void check_eps(double eps) {
    if (!(eps > 0.0 && eps < 1.0))
        throw input_error("--eps must lie strictly inside (0,1)");
}

std::string solution_json(double opt_guess, const Solution& sol, const MetricSpace& space,
                          int iterations, long long restarts_used, std::uint64_t seed, double eps) {
    JsonWriter w;
    w.begin_object();
    w.key("opt_guess").value(opt_guess);
    w.key("cost").value(sol.cost);
    w.key("centers").begin_array();
    for (const Center& c : sol.centers)
        append_center_json(w, c);
    w.end_array();
    w.key("assignment").begin_array();
    for (int a : nearest_assignment(space, sol.centers))
        w.value(a);
    w.end_array();
    w.key("iterations").value(iterations);
    w.key("restarts_used").value(restarts_used);
    w.key("seed").value(seed);
    w.key("eps").value(eps);
    w.end_object();
    return w.str() + "\n";
}

std::string trace_ldjson(const std::vector<IterationTrace>& trace) {
    std::string out;
    for (const IterationTrace& t : trace) {
        JsonWriter w;
        w.begin_object();
        w.key("iteration").value(t.iteration);
        w.key("point").value(t.point);
        w.key("cluster").value(t.cluster);
        w.key("radius").value(t.radius);
        w.key("solver_margin").value(t.solver_margin);
        w.key("cost").value(t.cost);
        w.key("head_bound_ok").value(t.head_bound_ok);
        w.key("head_bound_worst").value(t.head_bound_worst);
        w.key("admissible_ok").value(t.admissible_ok);
        w.end_object();
        out += w.str() + "\n";
    }
    return out;
}

void emit(const std::string& path, const std::string& content) {
    if (path.empty() || path == "-")
        std::fputs(content.c_str(), stdout);
    else
        write_file(path, content);
}

int run_solve(const MetricFlags& mf, const std::string& norm_path, int k, double eps,
              std::uint64_t seed, int restarts, double opt, double opt_grid_factor,
              int iteration_cap, int lambda, int jobs, const std::string& trace_path,
              const std::string& out_path) {
    check_eps(eps);
    if (opt_grid_factor != 0.0 && !(opt_grid_factor > 1.0))
        throw input_error("--opt-grid-factor must exceed 1");
    MetricSpace space = load_space(mf);
    NormObjective norm = load_norm_json(norm_path, space.num_points());
    Instance inst{std::move(space), std::move(norm), k};
    validate_instance(inst);
    EngineConfig cfg;
    cfg.lambda = lambda;
    cfg.iteration_cap = iteration_cap;
    cfg.opt_grid_factor = opt_grid_factor;
    cfg.jobs = jobs;

    double opt_guess = 0.0;
    Solution sol;
    int iterations = 0;
    long long restarts_used = 0;
    bool traced_run = false;
    std::uint64_t trace_seed = 0;
    double trace_eps = eps;

    if (opt > 0.0) {
        const RestartReport rep = solve_with_restarts(inst, eps, opt, restarts, seed, cfg);
        if (!rep.solution) {
            std::fprintf(stderr, "FAIL: restart budget exhausted (last failure: %s)\n",
                         to_string(rep.last_fail));
            return 2;
        }
        sol = *rep.solution;
        opt_guess = opt;
        iterations = rep.winner_iterations;
        restarts_used = rep.restarts_used;
        traced_run = true;
        trace_seed = rep.winning_seed;
    } else {
        // the guess enumeration composes two (1+.) factors, so a third of the
        // requested accuracy keeps the end-to-end guarantee at (1+eps)
        const double inner_eps = eps / 3.0;
        const SearchReport rep = search_opt(inst, inner_eps, restarts, seed, cfg);
        sol = rep.solution;
        opt_guess = rep.opt_guess;
        iterations = rep.winner_iterations;
        restarts_used = rep.restarts_used_total;
        traced_run = rep.from_run;
        trace_seed = rep.winning_seed;
        trace_eps = inner_eps;
    }

    emit(out_path, solution_json(opt_guess, sol, inst.space, iterations, restarts_used, seed, eps));
    if (!trace_path.empty()) {
        std::vector<IterationTrace> trace;
        if (traced_run) {
            EngineConfig tcfg = cfg;
            tcfg.trace = true;
            const int cap = cfg.iteration_cap > 0
                                ? cfg.iteration_cap
                                : default_iteration_cap(inst.k, trace_eps, cfg.lambda);
            trace = run_once(inst, trace_eps, opt_guess, trace_seed, cap, tcfg).trace;
        }
        write_file(trace_path, trace_ldjson(trace));
    }
    return 0;
}

int run_oracle(const MetricFlags& mf, const std::string& norm_path, int k,
               const std::string& out_path) {
    MetricSpace space = load_space(mf);
    NormObjective norm = load_norm_json(norm_path, space.num_points());
    Instance inst{std::move(space), std::move(norm), k};
    const BruteForceResult res = brute_force_opt(inst);
    JsonWriter w;
    w.begin_object();
    w.key("cost").value(res.cost);
    w.key("centers").begin_array();
    for (const Center& c : res.solution.centers)
        append_center_json(w, c);
    w.end_array();
    w.key("assignment").begin_array();
    for (int a : nearest_assignment(inst.space, res.solution.centers))
        w.value(a);
    w.end_array();
    w.end_object();
    emit(out_path, w.str() + "\n");
    return 0;
}

int run_scatter(const std::string& metric_path, bool continuous, double eps, int seeds,
                std::uint64_t base_seed, int max_len, const std::string& strategy,
                bool no_normalize, const std::string& out_path) {
    check_eps(eps);
    if (seeds < 1)
        throw input_error("--seeds must be at least 1");
    MetricSpace space = [&] {
        if (metric_path.size() > 5 && metric_path.substr(metric_path.size() - 5) == ".json")
            return load_explicit_metric_json(metric_path);
        if (continuous)
            return MetricSpace::euclidean_continuous(load_points_csv(metric_path));
        return MetricSpace::euclidean_discrete(load_points_csv(metric_path), {});
    }();
    if (!no_normalize)
        space = normalized_for_game(space);
    PointStrategy point_strategy;
    if (strategy == "farthest")
        point_strategy = PointStrategy::farthest_violator;
    else if (strategy == "random")
        point_strategy = PointStrategy::random_violator;
    else
        throw input_error("--strategy must be 'farthest' or 'random'");
    const CenterStrategy center_strategy =
        space.finite_centers() ? CenterStrategy::exact_finite : CenterStrategy::ky_continuous;

    std::vector<int> lengths;
    ScatterRecord best;
    best.eps = eps;
    best.mode = center_strategy == CenterStrategy::exact_finite ? ScatterRecord::Mode::plain
                                                                : ScatterRecord::Mode::algorithmic;
    for (int s = 0; s < seeds; ++s) {
        const ScatterRecord rec = play_scatter_game(space, eps, center_strategy, point_strategy,
                                                    max_len, base_seed + static_cast<std::uint64_t>(s));
        const ScatterCheck check = verify_scattering(space, rec, eps);
        if (!check.valid)
            throw input_error("internal: emitted record failed verification: " + check.what);
        lengths.push_back(static_cast<int>(rec.triples.size()));
        if (rec.triples.size() > best.triples.size())
            best = rec;
    }
    JsonWriter w;
    w.begin_object();
    w.key("eps").value(eps);
    w.key("strategy").value(strategy);
    w.key("seeds").value(seeds);
    w.key("lengths").begin_array();
    int max_observed = 0;
    for (int l : lengths) {
        w.value(l);
        max_observed = std::max(max_observed, l);
    }
    w.end_array();
    w.key("max_length").value(max_observed);
    w.key("best_record").begin_object();
    w.key("mode").value(best.mode == ScatterRecord::Mode::plain ? std::string("plain")
                                                                : std::string("algorithmic"));
    w.key("triples").begin_array();
    for (const ScatterTriple& t : best.triples) {
        w.begin_object();
        w.key("center");
        append_center_json(w, t.center);
        w.key("point").value(t.point);
        w.key("radius").value(t.radius);
        w.end_object();
    }
    w.end_array();
    w.end_object();
    w.end_object();
    emit(out_path, w.str() + "\n");
    return 0;
}

int run_ballint(const MetricFlags& mf, const std::string& requests_path, double eta,
                const std::string& out_path) {
    if (!(eta > 0.0 && eta < 1.0))
        throw input_error("--eta must lie strictly inside (0,1)");
    MetricSpace space = load_space(mf);
    const std::vector<Request> requests = load_requests_csv(requests_path, space);
    const BallIntersectionOutcome out = solve_ball_intersection(space, requests, eta);
    JsonWriter w;
    w.begin_object();
    w.key("result").value(out.ok() ? std::string("ok") : std::string("fail"));
    w.key("eta").value(eta);
    if (out.ok()) {
        w.key("margin").value(out.satisfied_margin);
        w.key("center");
        append_center_json(w, *out.center);
        w.key("iterations").value(static_cast<long long>(out.iterations));
    }
    w.end_object();
    emit(out_path, w.str() + "\n");
    return out.ok() ? 0 : 2;
}

int run_validate(const MetricFlags& mf, const std::string& norm_path, int k) {
    const bool has_metric = !mf.points.empty() || !mf.graph.empty() || !mf.matrix.empty();
    if (!has_metric && norm_path.empty())
        throw input_error("validate: give a metric, a --norm file, or both");
    int n = 0;
    if (has_metric) {
        const MetricSpace space = load_space(mf);
        n = space.num_points();
        std::printf("metric: ok (%d points, %s centers)\n", n,
                    space.finite_centers() ? std::to_string(space.num_centers()).c_str()
                                           : "continuous");
        if (k > 0 && space.finite_centers() && k > space.num_centers())
            throw input_error("validate: k exceeds the number of candidate centers");
    }
    if (!norm_path.empty()) {
        if (n == 0) {
            // well-formedness only; the spec's own vectors pin the dimension
            nlohmann::json doc;
            try {
                doc = nlohmann::json::parse(read_file(norm_path));
            } catch (const nlohmann::json::exception& e) {
                throw input_error(norm_path + ": invalid JSON: " + std::string(e.what()));
            }
            const int natural = norm_spec_natural_dimension(doc);
            if (natural <= 0)
                throw input_error("validate: norm spec is missing its defining fields");
            try {
                norm_from_json(doc, natural);
            } catch (const nlohmann::json::exception& e) {
                throw input_error(norm_path + ": malformed norm spec: " + std::string(e.what()));
            }
            std::printf("norm: ok (dimension %d)\n", natural);
        } else {
            load_norm_json(norm_path, n);
            std::printf("norm: ok (dimension %d)\n", n);
        }
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"norm k-clustering toolkit: a parameterized (1+eps)-approximation scheme for "
                 "monotone-norm clustering objectives over pluggable metric spaces"};
    app.require_subcommand(1);

    auto* solve = app.add_subcommand("solve", "run the clustering scheme");
    MetricFlags solve_mf;
    add_metric_flags(solve, solve_mf);
    std::string solve_norm, solve_trace, solve_out;
    int solve_k = 1, solve_restarts = 100, solve_cap = 0, solve_lambda = 100, solve_jobs = 1;
    double solve_eps = 0.1, solve_opt = 0.0, solve_grid = 0.0;
    std::uint64_t solve_seed = 0;
    solve->add_option("--norm", solve_norm, "norm spec JSON")->required();
    solve->add_option("--k", solve_k, "number of centers")->required();
    solve->add_option("--eps", solve_eps, "approximation parameter in (0,1)")->required();
    solve->add_option("--seed", solve_seed, "base random seed")->required();
    solve->add_option("--restarts", solve_restarts, "restart budget per optimum guess")->required();
    solve->add_option("--opt", solve_opt, "known optimum value (skips the guess search)");
    solve->add_option("--opt-grid-factor", solve_grid, "geometric step of the guess grid");
    solve->add_option("--iteration-cap", solve_cap, "max loop iterations per run (0: formula)");
    solve->add_option("--lambda", solve_lambda,
                      "scatter-dimension stand-in scaling the default iteration cap");
    solve->add_option("--jobs", solve_jobs, "parallel restarts");
    solve->add_option("--trace", solve_trace, "write per-iteration records of the winning run");
    solve->add_option("--out", solve_out, "output JSON file ('-' for stdout)")->required();

    auto* oracle = app.add_subcommand("oracle", "exhaustive ground-truth solver");
    MetricFlags oracle_mf;
    add_metric_flags(oracle, oracle_mf);
    std::string oracle_norm, oracle_out;
    int oracle_k = 1;
    oracle->add_option("--norm", oracle_norm, "norm spec JSON")->required();
    oracle->add_option("--k", oracle_k, "number of centers")->required();
    oracle->add_option("--out", oracle_out, "output JSON file ('-' for stdout)");

    auto* scatter = app.add_subcommand("scatter", "play scattering games and verify the records");
    std::string scatter_metric, scatter_strategy = "farthest", scatter_out;
    double scatter_eps = 0.5;
    int scatter_seeds = 1, scatter_maxlen = 100;
    std::uint64_t scatter_seed = 0;
    bool scatter_continuous = false, scatter_no_normalize = false;
    scatter->add_option("--metric", scatter_metric,
                        "metric file (.json: explicit matrix, otherwise points CSV)")
        ->required();
    scatter->add_flag("--continuous", scatter_continuous, "treat CSV points as a continuous space");
    scatter->add_option("--eps", scatter_eps, "refutation parameter in (0,1)")->required();
    scatter->add_option("--seeds", scatter_seeds, "number of games to play")->required();
    scatter->add_option("--max-len", scatter_maxlen, "cap on the game length")->required();
    scatter->add_option("--strategy", scatter_strategy, "point player: 'farthest' or 'random'");
    scatter->add_option("--seed", scatter_seed, "base random seed");
    scatter->add_flag("--no-normalize", scatter_no_normalize,
                      "play on the space as given instead of scaling the circumradius to 1");
    scatter->add_option("--out", scatter_out, "output JSON file ('-' for stdout)");

    auto* ballint = app.add_subcommand("ballint", "solve one ball-intersection instance");
    MetricFlags ballint_mf;
    add_metric_flags(ballint, ballint_mf);
    std::string ballint_requests, ballint_out;
    double ballint_eta = 0.1;
    ballint->add_option("--requests", ballint_requests, "CSV of 'point_id,radius' rows")->required();
    ballint->add_option("--eta", ballint_eta, "slack parameter in (0,1)")->required();
    ballint->add_option("--out", ballint_out, "output JSON file ('-' for stdout)");

    auto* validate = app.add_subcommand("validate", "check metric axioms and norm-spec form");
    MetricFlags validate_mf;
    add_metric_flags(validate, validate_mf);
    std::string validate_norm;
    int validate_k = 0;
    validate->add_option("--norm", validate_norm, "norm spec JSON");
    validate->add_option("--k", validate_k, "number of centers to check against the space");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 1;
    }

    try {
        if (solve->parsed())
            return run_solve(solve_mf, solve_norm, solve_k, solve_eps, solve_seed, solve_restarts,
                             solve_opt, solve_grid, solve_cap, solve_lambda, solve_jobs,
                             solve_trace, solve_out);
        if (oracle->parsed())
            return run_oracle(oracle_mf, oracle_norm, oracle_k, oracle_out);
        if (scatter->parsed())
            return run_scatter(scatter_metric, scatter_continuous, scatter_eps, scatter_seeds,
                               scatter_seed, scatter_maxlen, scatter_strategy,
                               scatter_no_normalize, scatter_out);
        if (ballint->parsed())
            return run_ballint(ballint_mf, ballint_requests, ballint_eta, ballint_out);
        if (validate->parsed())
            return run_validate(validate_mf, validate_norm, validate_k);
    } catch (const input_error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    } catch (const unsupported_error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 0;
}
