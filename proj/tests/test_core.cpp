#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>

#include "hupa/core.hpp"
#include "hupa/neighbor_grid.hpp"
#include "hupa/random.hpp"

using namespace hupa;

namespace {

std::filesystem::path temp_file(const std::string& name) {
    auto dir = std::filesystem::temp_directory_path() / "hupa_test_core";
    std::filesystem::create_directories(dir);
    return dir / name;
}

Vec random_vec(Rng& rng, double lo, double hi) { return {rng.uniform(lo, hi), rng.uniform(lo, hi), 0.0}; }

}  // namespace

TEST_CASE("box validation") {
    CHECK_THROWS_AS(BoxDomain({1.0}), InvalidArgument);
    CHECK_THROWS_AS(BoxDomain({1.0, 1.0, 1.0, 1.0}), InvalidArgument);
    CHECK_THROWS_AS(BoxDomain({1.0, 0.0}), InvalidArgument);
    CHECK_THROWS_AS(BoxDomain({1.0, -2.0}), InvalidArgument);
    CHECK_THROWS_AS(BoxDomain({1.0, INFINITY}), InvalidArgument);
    BoxDomain b{2.0, 3.0, 4.0};
    CHECK(b.dim() == 3);
    CHECK(b.volume() == 24.0);
    CHECK(b.min_length() == 2.0);
}

TEST_CASE("pattern invariants") {
    BoxDomain b{1.0, 1.0};
    CHECK_THROWS_AS(PointPattern(b, {{1.0, 0.5, 0.0}}), InvalidArgument);
    CHECK_THROWS_AS(PointPattern(b, {{-0.0001, 0.5, 0.0}}), InvalidArgument);
    CHECK_NOTHROW(PointPattern(b, {{0.0, 0.999, 0.0}}));
    PointPattern empty(b, {});
    CHECK(empty.size() == 0);
    CHECK(empty.intensity() == 0.0);
}

TEST_CASE("wrap_point examples") {
    BoxDomain b{1.0, 1.0};
    CHECK(wrap_point({0.5, 0.5, 0.0}, b) == Vec{0.5, 0.5, 0.0});
    CHECK(wrap_point({1.25, -0.25, 0.0}, b) == Vec{0.25, 0.75, 0.0});
    CHECK(wrap_point({3.0, 0.0, 0.0}, b) == Vec{0.0, 0.0, 0.0});
    // tiny negative values must not round up to L
    const Vec w = wrap_point({-1e-20, 0.0, 0.0}, b);
    CHECK(w[0] >= 0.0);
    CHECK(w[0] < 1.0);
}

TEST_CASE("periodic_distance examples") {
    BoxDomain b{1.0, 1.0};
    CHECK(periodic_distance({0.1, 0.5, 0.0}, {0.9, 0.5, 0.0}, b) == doctest::Approx(0.2).epsilon(1e-12));
    CHECK(periodic_distance({0.3, 0.7, 0.0}, {0.3, 0.7, 0.0}, b) == 0.0);
    CHECK(periodic_distance({0.0, 0.0, 0.0}, {0.5, 0.5, 0.0}, b) == doctest::Approx(std::sqrt(0.5)).epsilon(1e-12));
    BoxDomain b3{2.0, 2.0, 2.0};
    CHECK(periodic_distance({0.1, 0.1, 0.1}, {1.9, 1.9, 1.9}, b3) == doctest::Approx(std::sqrt(0.12)).epsilon(1e-12));
}

TEST_CASE("wrap idempotence and metric properties on samples") {
    Rng rng(Seed{11});
    BoxDomain b{3.0, 7.0};
    for (int k = 0; k < 20000; ++k) {
        const Vec p = random_vec(rng, -50.0, 50.0);
        const Vec w = wrap_point(p, b);
        CHECK_UNARY(wrap_point(w, b) == w);
        CHECK_UNARY((w[0] >= 0.0 && w[0] < 3.0 && w[1] >= 0.0 && w[1] < 7.0));
    }
    for (int k = 0; k < 20000; ++k) {
        const Vec p = wrap_point(random_vec(rng, 0.0, 7.0), b), q = wrap_point(random_vec(rng, 0.0, 7.0), b),
                  r = wrap_point(random_vec(rng, 0.0, 7.0), b);
        const double pq = periodic_distance(p, q, b), qp = periodic_distance(q, p, b);
        CHECK_UNARY(pq == qp);
        CHECK_UNARY(pq <= periodic_distance(p, r, b) + periodic_distance(r, q, b) + 1e-12);
        CHECK_UNARY(pq <= std::hypot(p[0] - q[0], p[1] - q[1]) + 1e-12);
    }
}

TEST_CASE("load_pattern examples") {
    const auto path = temp_file("three.pat");
    {
        std::ofstream out(path);
        out << "#hupa-pattern v1\ndim=2 lengths=10,10 hard_radius=none\nprovenance=hand written\n"
               "1 2\n3.5 4\n9.99 0\n";
    }
    const PointPattern p = load_pattern(path);
    CHECK(p.size() == 3);
    CHECK(p.box() == BoxDomain{10.0, 10.0});
    CHECK(p.provenance() == "hand written");
    CHECK_FALSE(p.hard_radius().has_value());

    const std::string bad = "#hupa-pattern v1\ndim=2 lengths=10,10 hard_radius=none\nprovenance=x\n1 2\n1 2 3\n";
    try {
        parse_pattern(bad);
        FAIL("expected a parse error");
    } catch (const ParseError& e) {
        CHECK(e.where() == ParseError::Where::line);
        CHECK(e.location() == 5);
        CHECK(std::string(e.what()).find("dimension mismatch") != std::string::npos);
        CHECK(std::string(e.what()).find("line 5") != std::string::npos);
    }
    CHECK_THROWS_AS(parse_pattern("not a pattern\n"), ParseError);
    CHECK_THROWS_AS(parse_pattern("#hupa-pattern v1\ndim=2 lengths=10 hard_radius=none\nprovenance=\n"), ParseError);
    CHECK_THROWS_AS(parse_pattern("#hupa-pattern v1\ndim=2 lengths=10,10 hard_radius=none\nprovenance=\n1 nan\n"),
                    ParseError);
    const auto wrapped = parse_pattern("#hupa-pattern v1\ndim=2 lengths=10,10 hard_radius=none\nprovenance=\n11 -1\n");
    CHECK(wrapped[0] == Vec{1.0, 9.0, 0.0});
    CHECK_THROWS_AS(load_pattern(temp_file("missing.pat")), IoError);
}

TEST_CASE("save_pattern examples") {
    BoxDomain b{5.0, 5.0};
    const auto path = temp_file("empty.pat");
    save_pattern(PointPattern(b, {}), path);
    const PointPattern e = load_pattern(path);
    CHECK(e.size() == 0);
    std::ifstream in(path);
    std::string line;
    int lines = 0;
    while (std::getline(in, line)) ++lines;
    CHECK(lines == 3);

    Rng rng(Seed{3});
    std::vector<Vec> pts;
    for (int i = 0; i < 100; ++i) pts.push_back({rng.uniform(0.0, 5.0), rng.uniform(0.0, 5.0), 0.0});
    const std::string text = format_pattern(PointPattern(b, pts));
    CHECK(std::count(text.begin(), text.end(), '\n') == 103);

    const PointPattern hr(b, {{1.0, 1.0, 0.0}}, 0.5);
    const PointPattern back = parse_pattern(format_pattern(hr));
    REQUIRE(back.hard_radius().has_value());
    CHECK(*back.hard_radius() == 0.5);
}

TEST_CASE("file round trip is the identity") {
    Rng rng(Seed{5});
    for (int dim : {2, 3}) {
        std::vector<double> L = {3.7, 11.0, 0.001};
        L.resize(dim);
        BoxDomain b(L);
        std::vector<Vec> pts;
        for (int i = 0; i < 500; ++i) {
            Vec p{};
            for (int a = 0; a < dim; ++a) p[a] = rng.uniform(0.0, L[a]);
            pts.push_back(p);
        }
        pts.push_back({0.0, 0.0, 0.0});
        const PointPattern p(b, pts, 0.01, "round trip\nwith newline");
        const auto path = temp_file("rt" + std::to_string(dim) + ".pat");
        save_pattern(p, path);
        const PointPattern q = load_pattern(path);
        CHECK(q.box() == p.box());
        CHECK(q.hard_radius() == p.hard_radius());
        CHECK(q.provenance() == p.provenance());
        REQUIRE(q.size() == p.size());
        double worst = 0.0;
        for (std::size_t i = 0; i < p.size(); ++i)
            for (int a = 0; a < 3; ++a) worst = std::max(worst, std::fabs(p[i][a] - q[i][a]));
        CHECK(worst <= 1e-12);
        CHECK(format_pattern(q) == format_pattern(p));
    }
}

TEST_CASE("csv export") {
    const PointPattern p(BoxDomain{2.0, 2.0}, {{0.5, 1.5, 0.0}});
    const std::string csv = format_pattern_csv(p);
    CHECK(csv.rfind("x,y\n0.5", 0) == 0);
    CHECK(csv.find(",1.5") != std::string::npos);
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 2);
    const PointPattern p3(BoxDomain{2.0, 2.0, 2.0}, {{0.5, 1.5, 0.25}});
    CHECK(format_pattern_csv(p3).rfind("x,y,z\n", 0) == 0);
}

TEST_CASE("hard core check and grid agree with brute force") {
    Rng rng(Seed{9});
    BoxDomain b{10.0, 6.0};
    std::vector<Vec> pts;
    for (int i = 0; i < 300; ++i) pts.push_back({rng.uniform(0.0, 10.0), rng.uniform(0.0, 6.0), 0.0});
    const PointPattern p(b, pts);
    std::size_t brute = 0;
    double nn_sum = 0.0;
    for (std::size_t i = 0; i < pts.size(); ++i) {
        double best = INFINITY;
        for (std::size_t j = 0; j < pts.size(); ++j) {
            if (i == j) continue;
            const double d = periodic_distance(pts[i], pts[j], b);
            best = std::min(best, d);
            if (j > i && d < 0.2 - 1e-9) ++brute;
        }
        nn_sum += best;
    }
    CHECK(hard_core_violations(p, 0.1) == brute);
    CHECK(mean_nearest_neighbor_distance(p) == doctest::Approx(nn_sum / 300.0).epsilon(1e-12));

    NeighborGrid grid(p, 0.7);
    const Vec c{9.9, 0.1, 0.0};
    std::size_t n = 0;
    grid.for_each_within(c, 0.7, [&](std::size_t, double) { ++n; });
    std::size_t m = 0;
    for (const Vec& q : pts) m += periodic_distance(c, q, b) <= 0.7;
    CHECK(n == m);
}

TEST_CASE("seed derivation") {
    CHECK(derive_seed(Seed{1}, 0) == derive_seed(Seed{1}, 0));
    CHECK_FALSE(derive_seed(Seed{1}, 0) == derive_seed(Seed{1}, 1));
    CHECK_FALSE(derive_seed(Seed{1}, 0) == derive_seed(Seed{2}, 0));
    Rng a(Seed{4}), b(Seed{4});
    for (int i = 0; i < 100; ++i) CHECK(a.uniform() == b.uniform());
}
