#include <algorithm>
#include <cmath>
#include <doctest.h>

#include "gasket_forge/catalog.hpp"
#include "gasket_forge/formats.hpp"
#include "gasket_forge/packing.hpp"

using namespace gf;

namespace {

const char* kTetra =
    "vertex 1\nvertex 2\nvertex 3\nvertex 4\n"
    "face a type=T walk=1,2,3\nface b type=T walk=1,3,4\nface c type=T walk=1,4,2\nface d type=T walk=2,4,3\n";

const char* kOcta =
    "vertex N\nvertex S\nvertex a\nvertex b\nvertex c\nvertex d\n"
    "face f1 type=T walk=N,a,b\nface f2 type=T walk=N,b,c\nface f3 type=T walk=N,c,d\nface f4 type=T walk=N,d,a\n"
    "face f5 type=T walk=S,b,a\nface f6 type=T walk=S,c,b\nface f7 type=T walk=S,d,c\nface f8 type=T walk=S,a,d\n";

// Inversive product of two spherical caps: 1 when externally tangent.
double cap_product(double r1, double r2, double separation) {
    return (std::cos(r1) * std::cos(r2) - std::cos(separation)) / (std::sin(r1) * std::sin(r2));
}

bool adjacent(const Packing& p, int u, int v) {
    for (auto [a, b] : p.edges)
        if ((a == u && b == v) || (a == v && b == u)) return true;
    return false;
}

}  // namespace

TEST_CASE("star triangulation") {
    PlanarComplex sq = parse_complex("vertex A\nvertex B\nvertex C\nvertex D\n"
                                     "face f type=P walk=A,B,C,D\nface g type=P walk=D,C,B,A\n");
    Triangulation t = star_triangulate(sq);
    CHECK(t.helper_count() == 2);
    CHECK(t.triangles.size() == 8);
    CHECK(t.ids[4] == "*f");

    Triangulation g1 = star_triangulate(iterate_subdivision(builtin().g1, builtin().rule, 1));
    CHECK(g1.helper_count() == 4);
    CHECK(g1.triangles.size() == 16);

    Triangulation tet = star_triangulate(parse_complex(kTetra));
    CHECK(tet.helper_count() == 0);
    CHECK(tet.triangles.size() == 4);
}

TEST_CASE("degree two vertex is rejected") {
    PlanarComplex pillow = parse_complex("vertex A\nvertex B\nvertex C\n"
                                         "face f type=T walk=A,B,C\nface g type=T walk=C,B,A\n");
    try {
        pack_complex(pillow);
        FAIL("expected a solver error");
    } catch (const SolverError& e) {
        CHECK(std::string(e.what()).find("not a sphere triangulation") != std::string::npos);
    }
}

TEST_CASE("tetrahedron packing satisfies Descartes") {
    Packing p = pack_complex(parse_complex(kTetra), PackOptions{{}, "4", false});
    CHECK(p.converged);
    CHECK(p.tangency_residual < 1e-10);
    for (std::size_t u = 0; u < 4; ++u)
        for (std::size_t v = u + 1; v < 4; ++v) CHECK(inversive_product(p.circles[u], p.circles[v]) == doctest::Approx(1.0).epsilon(1e-10));

    // Send circles 1, 2, 3 to unit circles centred on an equilateral triangle of side 2.
    const cplx c1(0, 0), c2(2, 0), c3(1, std::sqrt(3.0));
    Packing q = normalize(p, {p.tangency(0, 1), p.tangency(0, 2), p.tangency(1, 2)},
                          {SpherePoint(0.5 * (c1 + c2)), SpherePoint(0.5 * (c1 + c3)), SpherePoint(0.5 * (c2 + c3))});
    for (int i = 0; i < 3; ++i) CHECK(q.circles[i].abs_radius() == doctest::Approx(1.0).epsilon(1e-9));
    double k4 = 1.0 / q.circles[3].abs_radius();
    bool inner = std::abs(k4 - (3.0 + 2.0 * std::sqrt(3.0))) < 1e-8;
    bool outer = std::abs(k4 - (2.0 * std::sqrt(3.0) - 3.0)) < 1e-8;
    CHECK((inner || outer));
}

TEST_CASE("octahedron packing matches the symmetric caps") {
    Packing p = pack_complex(parse_complex(kOcta));
    CHECK(p.converged);
    CHECK(p.tangency_residual < 1e-10);
    const double quarter = std::atan(1.0);
    double opposite = cap_product(quarter, quarter, 4 * quarter);
    CHECK(opposite == doctest::Approx(3.0));
    for (int u = 0; u < 6; ++u)
        for (int v = u + 1; v < 6; ++v) {
            double want = adjacent(p, u, v) ? 1.0 : opposite;
            CHECK(inversive_product(p.circles[u], p.circles[v]) == doctest::Approx(want).epsilon(1e-9));
        }
}

TEST_CASE("builtin packings converge tightly") {
    const auto& cat = builtin();
    for (const auto* g : {&cat.g1, &cat.g2}) {
        for (int n = 1; n <= 5; ++n) {
            Packing p = pack_level(*g, cat.rule, n);
            CHECK(p.converged);
            CHECK(p.angle_residual <= 1e-10);
            CHECK(p.tangency_residual <= 1e-10);
            CHECK(p.level == n);
        }
    }
}

TEST_CASE("default outer vertex and normalization") {
    const auto& cat = builtin();
    CHECK(default_outer_vertex(cat.g1) == "A");
    PlanarComplex l3 = iterate_subdivision(cat.g1, cat.rule, 3);
    CHECK(default_outer_vertex(l3) == "A");
    auto e = normalization_edges(l3);
    CHECK(e[0] < e[1]);
    CHECK(e[1] < e[2]);
    Packing p = pack_complex(l3);
    CHECK(spherical_distance(p.tangency(p.index(e[0].first), p.index(e[0].second)), SpherePoint(0.0)) < 1e-9);
    CHECK(spherical_distance(p.tangency(p.index(e[1].first), p.index(e[1].second)), SpherePoint(1.0)) < 1e-9);
    CHECK(p.tangency(p.index(e[2].first), p.index(e[2].second)).is_inf());
}

TEST_CASE("packing is rigid up to Mobius maps") {
    const auto& cat = builtin();
    PlanarComplex l2 = iterate_subdivision(cat.g1, cat.rule, 2);
    auto products = [&](const std::string& outer) {
        Packing p = pack_complex(l2, PackOptions{{}, outer, false});
        std::vector<double> out;
        for (std::size_t u = 0; u < p.circles.size(); ++u)
            for (std::size_t v = u + 1; v < p.circles.size(); ++v)
                out.push_back(inversive_product(p.circles[u], p.circles[v]));
        return out;
    };
    auto a = products("A");
    auto b = products("in@x");
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) CHECK(std::abs(a[i] - b[i]) <= 1e-8 * std::max(1.0, std::abs(a[i])));
}

TEST_CASE("tangency points settle under refinement") {
    const auto& cat = builtin();
    std::vector<Packing> levels;
    for (int n = 1; n <= 5; ++n) levels.push_back(pack_level(cat.g1, cat.rule, n));
    std::vector<double> d;
    for (int n = 0; n + 1 < static_cast<int>(levels.size()); ++n) d.push_back(measure_convergence(levels[n], levels[n + 1]));
    for (std::size_t i = 0; i + 1 < d.size(); ++i) CHECK(d[i + 1] < d[i]);
    CHECK(measure_convergence(levels[2], levels[2]) == 0.0);
}

TEST_CASE("packing text round trip") {
    const auto& cat = builtin();
    Packing p = pack_level(cat.g2, cat.rule, 2);
    std::string text = format_packing(p);
    Packing q = parse_packing(text);
    CHECK(format_packing(q) == text);
    REQUIRE(q.circles.size() == p.circles.size());
    for (std::size_t i = 0; i < p.circles.size(); ++i) {
        CHECK(q.circles[i].center == p.circles[i].center);
        CHECK(q.circles[i].radius == p.circles[i].radius);
    }
    CHECK(q.outer == p.outer);
    CHECK_THROWS(parse_packing("circle A 0 0 1\n"));
    CHECK_THROWS(parse_packing("packing chart=plane outer=A\ncircle A 0 zero 1\nresiduals tangency=0 angle=0\n"));
}
