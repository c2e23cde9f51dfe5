#include <catch2/catch.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "normkc/io.hpp"
#include "normkc/metrics.hpp"
#include "support.hpp"

using namespace normkc;

namespace {

MetricSpace line_metric(std::vector<double> positions, std::vector<double> center_positions = {}) {
    std::vector<Coords> pts, ctrs;
    for (double x : positions)
        pts.push_back({x});
    for (double x : center_positions)
        ctrs.push_back({x});
    return MetricSpace::euclidean_discrete(std::move(pts), std::move(ctrs));
}

struct TempFile {
    std::filesystem::path path;
    explicit TempFile(const std::string& name, const std::string& content) {
        path = std::filesystem::temp_directory_path() / name;
        std::ofstream out(path);
        out << content;
    }
    ~TempFile() { std::filesystem::remove(path); }
};

}  // namespace

TEST_CASE("distance basics per variant", "[metrics]") {
    SECTION("euclidean") {
        auto space = MetricSpace::euclidean_discrete({{0, 0}, {3, 4}}, {});
        CHECK(space.point_distance(0, 1) == Approx(5.0));
        CHECK(space.point_center_distance(0, Center{1}) == Approx(5.0));
    }
    SECTION("explicit lookup") {
        auto space = MetricSpace::explicit_matrix(
            {"p1", "f2"}, {"p1"}, {"f2"}, {{0, 7}, {7, 0}});
        CHECK(space.point_center_distance(0, Center{0}) == Approx(7.0));
    }
    SECTION("path graph shortest path") {
        auto space = MetricSpace::graph({{"1", "2", 1.0}, {"2", "3", 1.0}}, {}, {});
        CHECK(space.point_distance(0, 2) == Approx(2.0));
    }
}

TEST_CASE("graph distances agree with the matrix oracle", "[metrics]") {
    SplitRng rng(201);
    for (int trial = 0; trial < 20; ++trial) {
        const int nv = 5 + static_cast<int>(rng.next_index(46));  // <= 50
        std::vector<MetricSpace::GraphEdge> edges;
        std::vector<std::tuple<int, int, double>> raw;
        auto name = [](int v) { return "v" + std::to_string(v); };
        for (int v = 1; v < nv; ++v) {
            const int u = static_cast<int>(rng.next_index(static_cast<std::size_t>(v)));
            const double w = rng.next_double(0.1, 5.0);
            edges.push_back({name(u), name(v), w});
            raw.emplace_back(u, v, w);
        }
        for (int e = 0; e < nv / 2; ++e) {
            const int a = static_cast<int>(rng.next_index(static_cast<std::size_t>(nv)));
            const int b = static_cast<int>(rng.next_index(static_cast<std::size_t>(nv)));
            if (a == b)
                continue;
            const double w = rng.next_double(0.1, 5.0);
            edges.push_back({name(a), name(b), w});
            raw.emplace_back(a, b, w);
        }
        const auto space = MetricSpace::graph(edges, {}, {});
        const auto oracle = testsupport::floyd_warshall(nv, raw);
        for (int a = 0; a < nv; ++a)
            for (int b = 0; b < nv; ++b)
                REQUIRE(space.point_distance(a, b) ==
                        Approx(oracle[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)])
                            .epsilon(1e-12));
    }
}

TEST_CASE("distance vector is the componentwise minimum", "[metrics]") {
    auto space = line_metric({0, 2, 10}, {1, 10});
    SECTION("single center") {
        auto one = line_metric({0, 2, 10}, {1});
        const auto d = one.distance_vector(std::vector<Center>{Center{0}});
        CHECK(d[0] == Approx(1.0));
        CHECK(d[1] == Approx(1.0));
        CHECK(d[2] == Approx(9.0));
    }
    SECTION("two centers take the min") {
        const auto d = space.distance_vector(std::vector<Center>{Center{0}, Center{1}});
        CHECK(d[0] == Approx(1.0));
        CHECK(d[1] == Approx(1.0));
        CHECK(d[2] == Approx(0.0));
    }
    SECTION("every point its own center gives zeros") {
        auto self = line_metric({0, 2, 10});
        const auto d = self.distance_vector(std::vector<Center>{Center{0}, Center{1}, Center{2}});
        for (double v : d)
            CHECK(v == 0.0);
    }
    SECTION("empty center set rejected") {
        CHECK_THROWS_AS(space.distance_vector(std::vector<Center>{}), input_error);
    }
    SECTION("min oracle on random spaces") {
        SplitRng rng(202);
        auto rnd = testsupport::random_euclidean_discrete(rng, 12, 6, 3);
        std::vector<Center> X{Center{1}, Center{4}, Center{5}};
        const auto d = rnd.distance_vector(X);
        for (int p = 0; p < rnd.num_points(); ++p) {
            double expect = std::numeric_limits<double>::infinity();
            for (const Center& c : X)
                expect = std::min(expect, rnd.point_center_distance(p, c));
            REQUIRE(d[static_cast<std::size_t>(p)] == expect);
        }
    }
}

TEST_CASE("balls are closed and monotone", "[metrics]") {
    auto space = line_metric({0, 1, 10});
    CHECK(space.ball_points(0, 1.0) == std::vector<int>{0, 1});
    CHECK(space.ball_points(0, 0.0) == std::vector<int>{0});
    CHECK(space.ball_points(0, 10.0) == std::vector<int>{0, 1, 2});

    SECTION("zero radius keeps exact duplicates") {
        auto dup = line_metric({0, 0, 5});
        CHECK(dup.ball_points(0, 0.0) == std::vector<int>{0, 1});
    }
    SECTION("grid graph full-diameter ball covers everything") {
        std::vector<MetricSpace::GraphEdge> edges;
        auto name = [](int r, int c) { return std::to_string(r) + "_" + std::to_string(c); };
        for (int r = 0; r < 3; ++r)
            for (int c = 0; c < 3; ++c) {
                if (r + 1 < 3)
                    edges.push_back({name(r, c), name(r + 1, c), 1.0});
                if (c + 1 < 3)
                    edges.push_back({name(r, c), name(r, c + 1), 1.0});
            }
        auto g = MetricSpace::graph(edges, {}, {});
        const double diam = g.point_diameter();
        CHECK(static_cast<int>(g.ball_points(0, diam).size()) == g.num_points());
    }
    SECTION("center universe") {
        auto mixed = line_metric({0, 1, 10}, {0.5, 9.0});
        CHECK(mixed.ball_centers(0, 0.6) == std::vector<int>{0});
        CHECK(mixed.ball_centers(2, 1.0) == std::vector<int>{1});
        CHECK(mixed.ball_centers(0, 10.0) == std::vector<int>{0, 1});
    }
    SECTION("monotone in the radius") {
        SplitRng rng(203);
        auto rnd = testsupport::random_explicit_metric(rng, 8, 4);
        for (int trial = 0; trial < 50; ++trial) {
            const double r1 = rng.next_double(0.0, 10.0);
            const double r2 = r1 + rng.next_double(0.0, 10.0);
            const auto b1 = rnd.ball_points(0, r1);
            const auto b2 = rnd.ball_points(0, r2);
            REQUIRE(std::includes(b2.begin(), b2.end(), b1.begin(), b1.end()));
        }
    }
}

TEST_CASE("scaling multiplies every distance exactly", "[metrics]") {
    SplitRng rng(204);
    auto check_scaling = [&](const MetricSpace& space) {
        const double c = rng.next_double(0.1, 7.0);
        const MetricSpace scaled = space.scaled(c);
        std::vector<Center> X{Center{0}};
        const auto d0 = space.distance_vector(X);
        const auto d1 = scaled.distance_vector(X);
        for (std::size_t i = 0; i < d0.size(); ++i)
            REQUIRE(d1[i] == c * d0[i]);
    };
    check_scaling(testsupport::random_explicit_metric(rng, 6, 3));
    check_scaling(testsupport::random_euclidean_discrete(rng, 6, 3, 2));
    check_scaling(testsupport::random_graph_metric(rng, 8, 6, 3));
}

TEST_CASE("malformed spaces are rejected at load", "[metrics]") {
    SECTION("asymmetric matrix") {
        CHECK_THROWS_AS(MetricSpace::explicit_matrix({"a", "b"}, {}, {}, {{0, 1}, {2, 0}}),
                        input_error);
    }
    SECTION("triangle violation") {
        CHECK_THROWS_AS(MetricSpace::explicit_matrix({"a", "b", "c"}, {}, {},
                                                     {{0, 1, 9}, {1, 0, 1}, {9, 1, 0}}),
                        input_error);
        MetricOptions lax;
        lax.validate_triangle = false;
        CHECK_NOTHROW(MetricSpace::explicit_matrix({"a", "b", "c"}, {}, {},
                                                   {{0, 1, 9}, {1, 0, 1}, {9, 1, 0}}, lax));
    }
    SECTION("nonzero diagonal") {
        CHECK_THROWS_AS(MetricSpace::explicit_matrix({"a", "b"}, {}, {}, {{1, 1}, {1, 0}}),
                        input_error);
    }
    SECTION("unknown id") {
        CHECK_THROWS_AS(MetricSpace::explicit_matrix({"a", "b"}, {"zz"}, {}, {{0, 1}, {1, 0}}),
                        input_error);
    }
    SECTION("nonpositive edge weight") {
        CHECK_THROWS_AS(MetricSpace::graph({{"a", "b", 0.0}}, {}, {}), input_error);
        CHECK_THROWS_AS(MetricSpace::graph({{"a", "b", -1.0}}, {}, {}), input_error);
    }
    SECTION("disconnected graph") {
        CHECK_THROWS_AS(MetricSpace::graph({{"a", "b", 1.0}, {"c", "d", 1.0}}, {}, {}),
                        input_error);
    }
    SECTION("continuous center enumeration") {
        auto space = MetricSpace::euclidean_continuous({{0, 0}, {1, 1}});
        CHECK_THROWS_AS(space.num_centers(), unsupported_error);
        CHECK_THROWS_AS(space.ball_centers(0, 1.0), unsupported_error);
    }
}

TEST_CASE("file loaders parse the documented formats", "[metrics]") {
    SECTION("points csv") {
        TempFile f("normkc_pts.csv", "0.0,0.0\n3.0,4.0\n# comment\n1.5,2.5\n");
        const auto rows = load_points_csv(f.path.string());
        REQUIRE(rows.size() == 3);
        CHECK(rows[1][1] == Approx(4.0));
        TempFile bad("normkc_bad.csv", "1.0,oops\n");
        CHECK_THROWS_AS(load_points_csv(bad.path.string()), input_error);
    }
    SECTION("graph file with id companions") {
        TempFile g("normkc_g.txt", "a b 1.0\nb c 2.0\n");
        TempFile p("normkc_p.txt", "a\nc\n");
        TempFile c("normkc_c.txt", "b\n");
        const auto space = load_graph_metric(g.path.string(), p.path.string(), c.path.string());
        CHECK(space.num_points() == 2);
        CHECK(space.num_centers() == 1);
        CHECK(space.point_center_distance(1, Center{0}) == Approx(2.0));
        TempFile badg("normkc_badg.txt", "a b\n");
        CHECK_THROWS_AS(load_graph_metric(badg.path.string()), input_error);
    }
    SECTION("explicit metric json") {
        TempFile f("normkc_m.json",
                   R"({"ids":["a","b"],"points":["a","b"],"centers":["b"],"matrix":[[0,2],[2,0]]})");
        const auto space = load_explicit_metric_json(f.path.string());
        CHECK(space.num_points() == 2);
        CHECK(space.num_centers() == 1);
        CHECK(space.point_center_distance(0, Center{0}) == Approx(2.0));
        TempFile bad("normkc_m_bad.json", R"({"ids":["a"]})");
        CHECK_THROWS_AS(load_explicit_metric_json(bad.path.string()), input_error);
    }
}
