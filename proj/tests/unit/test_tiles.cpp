#include <algorithm>
#include <cmath>
#include <doctest.h>
#include <random>

#include "gasket_forge/catalog.hpp"
#include "gasket_forge/formats.hpp"
#include "gasket_forge/tiles.hpp"

using namespace gf;

namespace {

// Three unit circles centred on an equilateral triangle of side 2.
std::vector<GenCircle> triple() {
    return {GenCircle::circle({0, 0}, 1), GenCircle::circle({2, 0}, 1), GenCircle::circle({1, std::sqrt(3.0)}, 1)};
}

cplx reflect(cplx c, double rho, cplx z) { return c + rho * rho / std::conj(z - c); }

bool contains_point(const std::vector<SpherePoint>& set, const SpherePoint& p, double tol) {
    for (const auto& q : set)
        if (spherical_distance(p, q) <= tol) return true;
    return false;
}

}  // namespace

TEST_CASE("chains") {
    FaceChain ch = make_chain(triple());
    CHECK(ch.size() == 3);
    CHECK(ch.tangency_error < 1e-12);
    CHECK(spherical_distance(ch.corner(0), SpherePoint(1.0, 0.0)) < 1e-12);

    const auto& cat = builtin();
    Packing p = pack_complex(cat.g1);
    FaceChain in = boundary_chain(p, cat.g1, "in");
    CHECK(in.size() == 4);
    CHECK(in.vertices == std::vector<std::string>{"D", "C", "B", "A"});

    // Around a tetrahedron every pair touches, so a 4-cycle of its circles is not a chain.
    auto k4 = pack_complex(parse_complex("vertex 1\nvertex 2\nvertex 3\nvertex 4\n"
                                         "face a type=T walk=1,2,3\nface b type=T walk=1,3,4\n"
                                         "face c type=T walk=1,4,2\nface d type=T walk=2,4,3\n"));
    CHECK_THROWS_AS(make_chain(k4.circles), ChainError);
    CHECK_THROWS_AS(make_chain({triple()[0], triple()[1]}), ChainError);
}

TEST_CASE("admissible words and sample counts") {
    for (int r = 3; r <= 5; ++r)
        for (int l = 0; l <= 4; ++l) {
            auto words = admissible_words(r, l);
            CHECK(static_cast<long>(words.size()) == admissible_word_count(r, l));
            for (const auto& w : words)
                for (std::size_t i = 0; i + 1 < w.size(); ++i) CHECK(w[i] != w[i + 1]);
        }
    CHECK(admissible_word_count(4, 3) == 36);
    FaceChain ch = make_chain(triple());
    auto s0 = tile_boundary_samples(ch, 0);
    REQUIRE(s0.size() == 3);
    for (int i = 0; i < 3; ++i) CHECK(spherical_distance(s0[i], ch.corner(i)) == 0.0);
    for (int l = 0; l <= 5; ++l) CHECK(static_cast<long>(tile_boundary_samples(ch, l).size()) == tile_sample_count(3, l));
}

TEST_CASE("depth one samples match the reflection formula") {
    FaceChain ch = make_chain(triple());
    auto s = tile_boundary_samples(ch, 1);
    REQUIRE(s.size() == 6);
    const auto circles = triple();
    // Word i moves the corner opposite to circle i.
    for (int i = 0; i < 3; ++i) {
        cplx opposite = ch.corner((i + 1) % 3).z;
        cplx want = reflect(circles[i].center, 1.0, opposite);
        CHECK(contains_point(s, SpherePoint(want), 1e-12));
    }
    // Every sample lies in the closed union of the three disks.
    for (const auto& p : s) {
        double best = 1e9;
        for (const auto& c : circles) best = std::min(best, std::abs(p.z - c.center));
        CHECK(best <= 1.0 + 1e-12);
    }
}

TEST_CASE("three tangent circles have a round limit set") {
    FaceChain ch = make_chain(triple());
    const cplx centroid(1.0, 1.0 / std::sqrt(3.0));
    const double rho = 1.0 / std::sqrt(3.0);
    for (const auto& p : tile_boundary_samples(ch, 5)) CHECK(std::abs(std::abs(p.z - centroid) - rho) < 1e-10);
    double exact = spherical_distance(SpherePoint(centroid + rho), SpherePoint(centroid - rho));
    // The farthest pair on that circle lies on the diameter through the origin.
    double dir = std::arg(centroid);
    exact = spherical_distance(SpherePoint(centroid + std::polar(rho, dir)), SpherePoint(centroid - std::polar(rho, dir)));
    double prev_lower = 0.0, prev_upper = 10.0;
    for (int l = 0; l <= 6; ++l) {
        DiameterEstimate d = tile_diameter(ch, l);
        CHECK(d.lower <= d.upper);
        CHECK(d.lower <= exact + 1e-12);
        CHECK(d.upper >= exact - 1e-12);
        CHECK(d.lower >= prev_lower - 1e-15);
        CHECK(d.upper <= prev_upper + 1e-15);
        prev_lower = d.lower;
        prev_upper = d.upper;
    }
    CHECK(eccentricity(tile_boundary_samples(ch, 4)) == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("nested disks and reflection invariance") {
    const auto& cat = builtin();
    Packing p = pack_level(cat.g1, cat.rule, 2);
    PlanarComplex c = iterate_subdivision(cat.g1, cat.rule, 2);
    FaceChain ch = boundary_chain(p, c, "in.1");
    std::mt19937 rng(7);
    std::vector<Isometry> gens;
    for (const auto& g : ch.circles) gens.push_back(reflection_isometry(g));
    for (int trial = 0; trial < 200; ++trial) {
        Isometry g;
        int last = -1;
        GenCircle parent;
        for (int l = 0; l < 6; ++l) {
            int i;
            do i = static_cast<int>(rng() % ch.size());
            while (i == last);
            GenCircle child = map_circle(g, ch.circles[i]);
            if (l > 0) {
                Cap a = to_cap(parent), b = to_cap(child);
                CHECK(angle_between(a.center, b.center) + b.radius <= a.radius + 1e-9);
            }
            parent = child;
            g = compose(g, gens[i]);
            last = i;
        }
    }
    auto shallow = tile_boundary_samples(ch, 3);
    auto deep = tile_boundary_samples(ch, 4);
    for (const auto& gi : gens)
        for (const auto& s : shallow) CHECK(contains_point(deep, apply(gi, s), 1e-9));
}

TEST_CASE("tiles across levels") {
    const auto& cat = builtin();
    PlanarComplex c = iterate_subdivision(cat.g1, cat.rule, 5);
    Packing p = pack_complex(c);
    double prev = 10.0;
    for (int n = 0; n <= 5; ++n) {
        auto tiles = tiles_at_level(p, c, n, 4);
        CHECK(tiles.size() == static_cast<std::size_t>(2 << n));
        for (const auto& t : tiles) CHECK(t.diameter.lower <= t.diameter.upper);
        double m = max_upper_diameter(tiles);
        if (n >= 2) CHECK(m < prev);
        prev = m;
    }
}

TEST_CASE("intersection patterns follow the combinatorial cases") {
    const auto& cat = builtin();
    PlanarComplex c = iterate_subdivision(cat.g1, cat.rule, 3);
    Packing p = pack_complex(c);
    int seen[5] = {0, 0, 0, 0, 0};
    for (int n = 0; n <= 3; ++n) {
        auto ids = faces_at_level(c, n);
        auto tiles = tiles_at_level(p, c, n, 4);
        for (std::size_t i = 0; i < ids.size(); ++i)
            for (std::size_t j = i + 1; j < ids.size(); ++j) {
                SharedBoundary s = shared_boundary(c, ids[i], ids[j]);
                ++seen[static_cast<int>(s)];
                IntersectionVerdict v = intersection_pattern(tiles[i], tiles[j], s);
                INFO(ids[i], " ", ids[j], " ", to_string(s), " common=", v.common);
                CHECK(v.matches);
            }
    }
    CHECK(seen[static_cast<int>(SharedBoundary::edge)] > 0);
    CHECK(seen[static_cast<int>(SharedBoundary::vertex)] > 0);
    CHECK(seen[static_cast<int>(SharedBoundary::many)] > 0);
}

TEST_CASE("tangency points and density") {
    auto k4 = pack_complex(parse_complex("vertex 1\nvertex 2\nvertex 3\nvertex 4\n"
                                         "face a type=T walk=1,2,3\nface b type=T walk=1,3,4\n"
                                         "face c type=T walk=1,4,2\nface d type=T walk=2,4,3\n"));
    auto ts = tangency_points(k4);
    CHECK(ts.size() == 6);
    for (const auto& id : k4.ids) {
        int on = 0;
        for (const auto& [key, pt] : ts) {
            if (key.first != id && key.second != id) continue;
            ++on;
            CHECK(k4.circle(id).disk_contains(pt, 1e-9));
        }
        CHECK(on == 3);
    }
    const auto& cat = builtin();
    double prev = 10.0;
    for (int n = 1; n <= 5; ++n) {
        PlanarComplex c = iterate_subdivision(cat.g1, cat.rule, n);
        Packing p = pack_complex(c);
        auto t = tangency_points(p);
        CHECK(t.size() == c.edges().size());
        double gap = density_gap(p, t, "A");
        CHECK(gap < prev);
        prev = gap;
    }
}

TEST_CASE("eccentricity") {
    std::vector<SpherePoint> disk, ellipse;
    for (int k = 0; k < 200; ++k) {
        double t = 2.0 * M_PI * k / 200.0;
        disk.emplace_back(cplx(0.3, -0.2) + std::polar(0.5, t));
        ellipse.emplace_back(0.01 * cplx(2.0 * std::cos(t), std::sin(t)));
    }
    CHECK(eccentricity(disk) == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(eccentricity(ellipse) == doctest::Approx(2.0).epsilon(0.05));

    const auto& cat = builtin();
    PlanarComplex c = iterate_subdivision(cat.g1, cat.rule, 5);
    Packing p = pack_complex(c);
    for (int n = 1; n <= 5; ++n) {
        auto rep = quasiroundness_report(p, c, n, 3);
        CHECK(rep.per_face.size() == static_cast<std::size_t>(2 << n));
        CHECK(rep.max >= 1.0);
        CHECK(rep.max < 3.0);
    }
}

TEST_CASE("limit set clouds") {
    auto k4c = parse_complex("vertex 1\nvertex 2\nvertex 3\nvertex 4\n"
                             "face a type=T walk=1,2,3\nface b type=T walk=1,3,4\n"
                             "face c type=T walk=1,4,2\nface d type=T walk=2,4,3\n");
    Packing k4 = pack_complex(k4c, PackOptions{{}, "", false});
    PointCloud c0 = limit_set_cloud(k4, k4c, 0, 0, 16);
    CHECK(c0.points.size() == 64);
    PointCloud c2 = limit_set_cloud(k4, k4c, 0, 2, 16);
    CHECK(static_cast<long>(c2.points.size()) + c2.dropped_at_infinity == 64 + 4 * tile_sample_count(3, 2));

    std::string text = format_cloud(c2);
    PointCloud back = parse_cloud(text);
    CHECK(format_cloud(back) == text);
    CHECK(back.depth == 2);
    CHECK_THROWS(parse_cloud("pt 1 2\n"));
}
