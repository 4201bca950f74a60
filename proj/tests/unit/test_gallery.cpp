#include <doctest.h>

#include <atomic>
#include <cstdlib>

#include "gasket_forge/gallery.hpp"
#include "gasket_forge/parallel.hpp"

using namespace gf;

namespace {

struct Level {
    PlanarComplex c;
    Packing p;
};

Level packed(const PlanarComplex& g0, int n) {
    Level l{iterate_subdivision(g0, builtin().rule, n), {}};
    l.p = pack_complex(l.c);
    return l;
}

double mismatch_in_frame(const Packing& p, const PlanarComplex& c, const GenCircle& a, const GenCircle& b) {
    const Face* f = c.face_record("in");
    auto t = [&](int i, int j) {
        return p.tangency(p.index(c.vertex_ids[f->walk[i]]), p.index(c.vertex_ids[f->walk[j]]));
    };
    MobiusMap frame = mobius_from_triples(t(0, 1), t(1, 2), t(2, 3), SpherePoint(1.0), SpherePoint(cplx(0, 1)),
                                          SpherePoint(-1.0));
    return circle_mismatch(map_circle(frame, a), map_circle(frame, b));
}

}  // namespace

TEST_CASE("catalog dynamics") {
    CatalogDynamics d = catalog_dynamics(builtin());
    CHECK(d.ok);
    CHECK(d.homomorphism);
    CHECK(d.period == 2);
    CHECK(d.orbit_of_period_two[1] == "B");
    CHECK(d.preperiod == 2);
    CHECK(d.orbit_of_preperiodic == std::vector<std::string>{"C", "D", "A", "B", "A"});
}

TEST_CASE("reduced words") {
    CHECK(reduced_words(0) == std::vector<std::string>{""});
    auto w = reduced_words(3);
    CHECK(w.size() == 1 + 4 + 12 + 36);
    CHECK(w[1] == "a");
    CHECK(w[4] == "B");
    CHECK(w[5] == "aa");
    for (const auto& s : w) {
        CHECK(s.find("aA") == std::string::npos);
        CHECK(s.find("Bb") == std::string::npos);
    }
    CHECK_THROWS_AS(reduced_words(-1), GalleryError);
}

TEST_CASE("parallel_for does not depend on the thread count") {
    std::vector<double> a(1000), b(1000);
    parallel_for(a.size(), [&](std::size_t i) { a[i] = std::sin(double(i)); }, 1);
    parallel_for(b.size(), [&](std::size_t i) { b[i] = std::sin(double(i)); }, 7);
    CHECK(a == b);
    std::atomic<int> calls{0};
    CHECK_THROWS_AS(parallel_for(50, [&](std::size_t i) {
        ++calls;
        if (i == 17) throw GalleryError("boom");
    }, 4), GalleryError);
}

TEST_CASE("group symmetries on G2") {
    const auto& cat = builtin();
    Level l2 = packed(cat.g2, 2);
    CHECK_THROWS_AS(fit_group_symmetries(l2.p, l2.c, cat.rule), GalleryError);

    Level l4 = packed(cat.g2, 4);
    GroupSymmetries s = fit_group_symmetries(l4.p, l4.c, cat.rule);
    CHECK(s.m1.residual > 0.0);
    CHECK(s.residual() == std::max(s.m1.residual, s.m2.residual));
    // g1 carries D to A and C to D.
    CHECK(mismatch_in_frame(l4.p, l4.c, map_circle(s.m1.map, l4.p.circle("D")), l4.p.circle("A")) <= s.m1.residual);
    CHECK(mismatch_in_frame(l4.p, l4.c, map_circle(s.m1.map, l4.p.circle("C")), l4.p.circle("D")) <= s.m1.residual);

    auto rows = symfit_table(cat, 3, 4);
    REQUIRE(rows.size() == 2);
    CHECK(rows[1].m1 < rows[0].m1);
    CHECK(rows[1].m2 < rows[0].m2);
    CHECK(format_symfit(rows).find("strictly_decreasing=1") != std::string::npos);
    CHECK_THROWS_AS(symfit_table(cat, 2, 4), GalleryError);
}

TEST_CASE("group orbit") {
    const auto& cat = builtin();
    Level l = packed(cat.g2, 4);
    GroupSymmetries s = fit_group_symmetries(l.p, l.c, cat.rule);
    const std::vector<std::string> base{"A", "B", "C", "D", "in@x", "out@x"};

    GroupOrbit o0 = group_limit_orbit(l.p, l.c, cat.rule, s.m1.map, s.m2.map, base, 0);
    REQUIRE(o0.circles.size() == base.size());
    for (std::size_t i = 0; i < base.size(); ++i) {
        CHECK(o0.circles[i].counterpart == base[i]);
        CHECK(o0.circles[i].mismatch < 1e-9);
    }

    GroupOrbit o1 = group_limit_orbit(l.p, l.c, cat.rule, s.m1.map, s.m2.map, base, 1);
    CHECK(o1.words == 5);
    CHECK(o1.circles.size() + o1.duplicates == 5 * base.size());
    CHECK(o1.duplicates > 0);
    for (const auto& oc : o1.circles) CHECK(!oc.counterpart.empty());
    // Single letters are the fitted maps, so they stay near the fit residual.
    CHECK(o1.worst_by_length[1] < 2.0 * s.residual());

    GroupOrbit again = group_limit_orbit(l.p, l.c, cat.rule, s.m1.map, s.m2.map, base, 1);
    CHECK(format_orbit(again) == format_orbit(o1));
}

TEST_CASE("sub-complexes and plane isomorphism") {
    const auto& cat = builtin();
    PlanarComplex c = iterate_subdivision(cat.g1, cat.rule, 2);
    PlanarComplex model = iterate_subdivision(polygon_complex(cat.rule, "P"), cat.rule, 2);

    PlanarComplex in = sub_complex(c, {"in"});
    CHECK(in.faces.size() == 5);
    CHECK(in.faces[in.external_face()].walk.size() == 4);
    CHECK(!plane_isomorphism(in, model).empty());

    PlanarComplex tilde = sub_complex(c, {"in.2", "out.1"});
    CHECK(!plane_isomorphism(tilde, model).empty());

    PlanarComplex small = sub_complex(c, {"in.1"});
    CHECK(plane_isomorphism(small, model).empty());

    CHECK_THROWS_AS(sub_complex(c, {"in", "out"}), GalleryError);
    CHECK_THROWS_AS(sub_complex(c, {"nowhere"}), GalleryError);
}

TEST_CASE("local equivalence") {
    const auto& cat = builtin();
    Level a = packed(cat.g1, 3), b = packed(cat.g2, 3);
    LocalEquivalence le = local_equivalence(a.p, a.c, b.p, b.c, cat.rule);
    REQUIRE(le.views.size() == 6);
    CHECK(le.all_isomorphic);
    CHECK(le.max_cross_ratio_gap > 1e-3);
    for (const auto& v : le.views) CHECK(v.cross_ratios.size() == le.model_edges.size());

    LocalEquivalence self = local_equivalence(a.p, a.c, a.p, a.c, cat.rule);
    CHECK(self.max_cross_ratio_gap < 1e-12);

    DemoBundle d1 = local_equivalence_demo(a.p, a.c, b.p, b.c, cat.rule);
    DemoBundle d2 = local_equivalence_demo(a.p, a.c, b.p, b.c, cat.rule);
    CHECK(d1.ok);
    CHECK(d1.files.size() == 6 + 4 + 2);
    CHECK(d1.files == d2.files);
    CHECK(d1.files.count("g1_tilde_left.svg") == 1);

    Level z = packed(cat.g1, 0);
    Level z2 = packed(cat.g2, 0);
    CHECK_THROWS_AS(local_equivalence(z.p, z.c, z2.p, z2.c, cat.rule), GalleryError);
    CHECK_THROWS_AS(local_equivalence(a.p, a.c, z2.p, z2.c, cat.rule), GalleryError);
}

TEST_CASE("branched cover") {
    const auto& cat = builtin();
    CHECK_THROWS_AS(qr_symmetry_demo(cat, 0), GalleryError);
    for (int n = 1; n <= 3; ++n) {
        CoverReport r = qr_symmetry_demo(cat, n);
        CHECK(r.target_faces.size() == (std::size_t{2} << (n - 1)));
        CHECK(r.source_faces.size() == 2 * r.target_faces.size());
        CHECK(r.fiber_histogram.size() == 1);
        CHECK(r.fiber_histogram.count(2) == 1);
        CHECK(r.branch_faces.empty());
        CHECK(r.branch_vertices == std::vector<std::string>{"B"});
        CHECK(r.faces_commute);
        CHECK(r.levels_commute);
        CHECK(r.inside);
    }
    CHECK(format_cover(qr_symmetry_demo(cat, 2)).find("fiber_2=4") != std::string::npos);
}
