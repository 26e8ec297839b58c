#include <doctest.h>

#include <boost/math/distributions/chi_squared.hpp>
#include <boost/math/distributions/poisson.hpp>

#include <cmath>

#include "hupa/generators.hpp"
#include "hupa/random.hpp"

using namespace hupa;

namespace {

bool same_points(const PointPattern& a, const PointPattern& b) { return a.points() == b.points() && a.box() == b.box(); }

bool contained(const PointPattern& p) {
    for (const Vec& v : p.points())
        for (int a = 0; a < p.dim(); ++a)
            if (!(v[a] >= 0.0 && v[a] < p.box().length(a))) return false;
    return true;
}

}  // namespace

TEST_CASE("poisson: zero intensity and determinism") {
    CHECK(generate_poisson(BoxDomain{10.0, 10.0}, 0.0, Seed{1}).empty());
    CHECK(generate_poisson(BoxDomain{3.0, 3.0, 3.0}, 0.0, Seed{1}).empty());
    CHECK_THROWS_AS(generate_poisson(BoxDomain{10.0, 10.0}, -1.0, Seed{1}), InvalidArgument);
    const auto a = generate_poisson(BoxDomain{10.0, 10.0}, 1.0, Seed{42});
    const auto b = generate_poisson(BoxDomain{10.0, 10.0}, 1.0, Seed{42});
    CHECK(same_points(a, b));
    CHECK(contained(a));
    CHECK(contained(generate_poisson(BoxDomain{2.0, 3.0, 4.0}, 5.0, Seed{1})));
}

TEST_CASE("poisson: count law over 2000 realizations at mean 100") {
    const int n = 2000;
    std::vector<double> counts;
    for (int s = 0; s < n; ++s)
        counts.push_back(static_cast<double>(generate_poisson(BoxDomain{10.0, 10.0}, 1.0, Seed{1000u + s}).size()));
    double mean = 0.0;
    for (double c : counts) mean += c;
    mean /= n;
    double var = 0.0;
    for (double c : counts) var += (c - mean) * (c - mean);
    var /= n - 1;
    CHECK(mean == doctest::Approx(100.0).epsilon(0.007));
    CHECK(var == doctest::Approx(100.0).epsilon(0.1));

    // chi-square goodness of fit, tails pooled so every bin expects at least 5
    boost::math::poisson_distribution<> law(100.0);
    int lo = 0, hi = 0;
    while (n * boost::math::cdf(law, lo) < 5.0) ++lo;
    hi = lo;
    while (n * boost::math::cdf(boost::math::complement(law, hi)) >= 5.0) ++hi;
    std::vector<double> observed(hi - lo + 1, 0.0);
    for (double c : counts) {
        const int k = std::clamp(static_cast<int>(c), lo, hi);
        observed[k - lo] += 1.0;
    }
    double chi2 = 0.0;
    for (int k = lo; k <= hi; ++k) {
        double p = boost::math::pdf(law, k);
        if (k == lo) p = boost::math::cdf(law, lo);
        if (k == hi) p = boost::math::cdf(boost::math::complement(law, hi - 1));
        const double expected = n * p;
        chi2 += (observed[k - lo] - expected) * (observed[k - lo] - expected) / expected;
    }
    const double df = static_cast<double>(hi - lo);
    const double critical = boost::math::quantile(boost::math::complement(boost::math::chi_squared(df), 0.001));
    CHECK(chi2 < critical);
}

TEST_CASE("lattice examples") {
    const auto sq = generate_lattice(BoxDomain{10.0, 10.0}, LatticeKind::square, 1.0);
    CHECK(sq.size() == 100);
    double dmin = INFINITY;
    for (std::size_t i = 0; i < sq.size(); ++i)
        for (std::size_t j = i + 1; j < sq.size(); ++j) dmin = std::min(dmin, periodic_distance(sq[i], sq[j], sq.box()));
    CHECK(dmin == doctest::Approx(1.0).epsilon(1e-12));

    CHECK(generate_lattice(BoxDomain{4.0, 4.0, 4.0}, LatticeKind::cubic, 1.0).size() == 64);

    const auto tri = generate_lattice(BoxDomain{8.0, 8.0 * std::sqrt(3.0) / 2.0}, LatticeKind::triangular, 1.0);
    REQUIRE(tri.size() == 64);
    for (std::size_t i = 0; i < tri.size(); ++i) {
        int near = 0;
        for (std::size_t j = 0; j < tri.size(); ++j)
            if (i != j && std::fabs(periodic_distance(tri[i], tri[j], tri.box()) - 1.0) <= 1e-9) ++near;
        CHECK(near == 6);
    }
}

TEST_CASE("lattice commensurability errors") {
    try {
        generate_lattice(BoxDomain{10.0, 10.0}, LatticeKind::square, 3.0);
        FAIL("expected IncommensurateBox");
    } catch (const IncommensurateBox& e) {
        CHECK(e.nearest_length() == doctest::Approx(9.0));
        CHECK(e.nearest_spacing() == doctest::Approx(10.0 / 3.0));
        CHECK(std::string(e.what()).find("spacing") != std::string::npos);
    }
    // odd number of triangular rows cannot wrap
    CHECK_THROWS_AS(generate_lattice(BoxDomain{8.0, 7.0 * std::sqrt(3.0) / 2.0}, LatticeKind::triangular, 1.0),
                    IncommensurateBox);
    CHECK_THROWS_AS(generate_lattice(BoxDomain{4.0, 4.0}, LatticeKind::cubic, 1.0), InvalidArgument);
    CHECK_THROWS_AS(generate_lattice(BoxDomain{4.0, 4.0}, LatticeKind::square, 0.0), InvalidArgument);
}

TEST_CASE("perturbed lattice") {
    BoxDomain b{12.0, 12.0};
    const auto lat = generate_lattice(b, LatticeKind::square, 1.0);
    CHECK(same_points(generate_perturbed_lattice(b, 1.0, 0.0, Seed{3}), lat));
    for (int dim : {2, 3}) {
        const BoxDomain box = dim == 2 ? BoxDomain{12.0, 12.0} : BoxDomain{6.0, 6.0, 6.0};
        const auto sites = generate_lattice(box, dim == 2 ? LatticeKind::square : LatticeKind::cubic, 1.0);
        const auto p = generate_perturbed_lattice(box, 1.0, 0.3, Seed{8});
        REQUIRE(p.size() == sites.size());
        double worst = 0.0;
        for (std::size_t i = 0; i < p.size(); ++i) worst = std::max(worst, periodic_distance(p[i], sites[i], box));
        CHECK(worst <= 0.3 * std::sqrt(static_cast<double>(dim)) + 1e-12);
        CHECK(worst > 0.2);
        CHECK(contained(p));
        CHECK(same_points(p, generate_perturbed_lattice(box, 1.0, 0.3, Seed{8})));
    }
    CHECK_THROWS_AS(generate_perturbed_lattice(b, 1.0, 0.5, Seed{1}), InvalidArgument);
    CHECK_THROWS_AS(generate_perturbed_lattice(b, 1.0, -0.1, Seed{1}), InvalidArgument);
}

TEST_CASE("rsa packing") {
    SUBCASE("no room for a second disk") {
        try {
            generate_rsa_packing(BoxDomain{4.0, 4.0}, 1.5, RsaTarget{2, std::nullopt}, 500, Seed{1});
            FAIL("expected TargetUnreachable");
        } catch (const TargetUnreachable& e) {
            CHECK(e.achieved() == 1);
            CHECK(e.target() == 2);
            CHECK(e.partial().size() == 1);
        }
    }
    SUBCASE("single disk") {
        const auto p = generate_rsa_packing(BoxDomain{4.0, 4.0}, 1.5, RsaTarget{1, std::nullopt}, 10, Seed{5});
        CHECK(p.size() == 1);
        CHECK(p.hard_radius() == 1.5);
    }
    SUBCASE("2D at phi 0.3") {
        BoxDomain b{20.0, 20.0};
        CHECK(rsa_target_count(b, 0.5, RsaTarget{std::nullopt, 0.3}) == 153);
        const auto p = generate_rsa_packing(b, 0.5, RsaTarget{std::nullopt, 0.3}, 100000, Seed{2});
        CHECK(p.size() == 153);
        CHECK(hard_core_violations(p, 0.5) == 0);
        for (std::size_t i = 0; i < p.size(); ++i)
            for (std::size_t j = i + 1; j < p.size(); ++j) CHECK_UNARY(periodic_distance(p[i], p[j], b) >= 1.0 - 1e-9);
        CHECK(contained(p));
        CHECK(same_points(p, generate_rsa_packing(b, 0.5, RsaTarget{std::nullopt, 0.3}, 100000, Seed{2})));
    }
    SUBCASE("3D at phi 0.2") {
        const auto p = generate_rsa_packing(BoxDomain{8.0, 8.0, 8.0}, 0.5, RsaTarget{std::nullopt, 0.2}, 100000,
                                            Seed{4});
        CHECK(hard_core_violations(p, 0.5) == 0);
        CHECK(p.size() == rsa_target_count(p.box(), 0.5, RsaTarget{std::nullopt, 0.2}));
    }
    SUBCASE("argument checks") {
        BoxDomain b{10.0, 10.0};
        CHECK_THROWS_AS(generate_rsa_packing(b, 0.5, RsaTarget{}, 10, Seed{1}), InvalidArgument);
        CHECK_THROWS_AS(generate_rsa_packing(b, 0.5, RsaTarget{3, 0.1}, 10, Seed{1}), InvalidArgument);
        CHECK_THROWS_AS(generate_rsa_packing(b, 0.0, RsaTarget{3, std::nullopt}, 10, Seed{1}), InvalidArgument);
        CHECK_THROWS_AS(generate_rsa_packing(b, 0.5, RsaTarget{std::nullopt, 0.6}, 10, Seed{1}), InvalidArgument);
    }
}

TEST_CASE("ensembles") {
    const GeneratorSpec poisson{BoxDomain{10.0, 10.0}, PoissonParams{1.0}};
    const auto one = ensemble(poisson, 1, Seed{77});
    REQUIRE(one.size() == 1);
    CHECK(same_points(one[0], generate(poisson, derive_seed(Seed{77}, 0))));

    const auto two = ensemble(poisson, 2, Seed{77});
    CHECK_FALSE(same_points(two[0], two[1]));

    const GeneratorSpec lattice{BoxDomain{6.0, 6.0}, LatticeParams{LatticeKind::square, 1.0}};
    const auto many = ensemble(lattice, 100, Seed{1});
    REQUIRE(many.size() == 100);
    for (const auto& p : many) CHECK(same_points(p, many[0]));

    const GeneratorSpec rsa{BoxDomain{10.0, 10.0}, RsaParams{0.4, RsaTarget{std::nullopt, 0.25}, 100000}};
    const auto serial = ensemble(rsa, 12, Seed{5}, 1);
    const auto threaded = ensemble(rsa, 12, Seed{5}, 4);
    for (std::size_t i = 0; i < serial.size(); ++i) {
        CHECK(same_points(serial[i], threaded[i]));
        CHECK(serial[i].provenance() == threaded[i].provenance());
    }
    CHECK(poisson.kind_name() == "poisson");
}
