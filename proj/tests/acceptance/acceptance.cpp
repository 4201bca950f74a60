// One PASS/FAIL line per acceptance criterion. Exit status is 0 when every FAIL is one of the
// documented unattainable items (see README, "Known failures").
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <iostream>
#include <map>
#include <set>
#include <sstream>

#include "gasket_forge/catalog.hpp"
#include "gasket_forge/cli.hpp"
#include "gasket_forge/formats.hpp"
#include "gasket_forge/gallery.hpp"
#include "gasket_forge/markov.hpp"
#include "gasket_forge/packing.hpp"
#include "gasket_forge/tiles.hpp"

using namespace gf;
namespace fs = std::filesystem;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

const std::set<int> kKnownUnattainable{5, 9};

std::string fmt(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3g", x);
    return buf;
}

std::string fixture(const std::string& name) { return std::string(GF_FIXTURE_DIR) + "/" + name; }

PlanarComplex level(const PlanarComplex& g0, int n) { return iterate_subdivision(g0, builtin().rule, n); }

// 1. Fourth curvature of the K4 packing with three unit circles.
Outcome descartes() {
    Packing p = pack_complex(parse_complex(read_file(fixture("k4.complex"))));
    const cplx c1(0, 0), c2(2, 0), c3(1, std::sqrt(3.0));
    const std::array<SpherePoint, 3> src{p.tangency(0, 1), p.tangency(0, 2), p.tangency(1, 2)};
    const double target = 3.0 + 2.0 * std::sqrt(3.0);
    double best = 1e300;
    // The two orientations of the target triangle put circle 4 in the inner or outer gap.
    for (bool flip : {false, true}) {
        std::array<SpherePoint, 3> dst{SpherePoint(0.5 * (c1 + c2)), SpherePoint(0.5 * (c1 + c3)),
                                       SpherePoint(0.5 * (c2 + c3))};
        if (flip) dst = {SpherePoint(std::conj(dst[0].z)), SpherePoint(std::conj(dst[1].z)),
                         SpherePoint(std::conj(dst[2].z))};
        Packing q = normalize(p, src, dst);
        const GenCircle& g = q.circles[3];
        if (g.is_line() || g.radius <= 0) continue;
        bool units = true;
        for (int i = 0; i < 3; ++i) units = units && std::abs(q.circles[i].abs_radius() - 1.0) < 1e-9;
        if (units) best = std::min(best, std::abs(1.0 / g.radius - target));
    }
    return {best <= 1e-8, "|k4 - (3+2sqrt3)| = " + fmt(best)};
}

// 2. Residuals on the built-in fixtures.
Outcome residuals() {
    double worst = 0.0;
    std::string where;
    auto take = [&](const Packing& p, const std::string& name) {
        double r = std::max(p.tangency_residual, p.angle_residual);
        if (!p.converged) r = std::max(r, 1.0);
        if (r > worst) {
            worst = r;
            where = name;
        }
    };
    take(pack_complex(parse_complex(read_file(fixture("k4.complex")))), "K4");
    take(pack_complex(parse_complex(read_file(fixture("octahedron.complex")))), "octahedron");
    for (const char* g : {"g1", "g2"})
        for (int n = 1; n <= 5; ++n)
            take(pack_complex(level(builtin_complex(g), n)), std::string(g) + " level " + std::to_string(n));
    return {worst <= 1e-10, "max residual " + fmt(worst) + (where.empty() ? "" : " (" + where + ")")};
}

// 3. Rule classification.
Outcome classification() {
    const auto& cat = builtin();
    bool wf = validate_rule(cat.rule).ok;
    bool simple = !is_simple(cat.rule, 3).violated;
    bool irreducible = !is_irreducible(cat.rule, 3).violated;
    bool acyl = is_acylindrical(cat.rule, 3).verdict == Acylindricity::certified;
    bool cyl = is_acylindrical(cat.cylindrical_rule, 3).verdict == Acylindricity::suspected_cylindrical;
    int s2 = check_standing_assumptions(cat.rule, nullptr, 3).s2_power;
    std::ostringstream d;
    d << "well-formed=" << wf << " simple=" << simple << " irreducible=" << irreducible << " certified=" << acyl
      << " bottom suspected-cylindrical=" << cyl << " S2 power=" << s2;
    return {wf && simple && irreducible && acyl && cyl && s2 == 2, d.str()};
}

// 4. Cross-ratios of two normalizations of G1 level 4.
Outcome rigidity() {
    PlanarComplex c = level(builtin().g1, 4);
    PackOptions a, b;
    b.outer = "C";
    Packing pa = pack_complex(c, a), pb = pack_complex(c, b);
    auto ratios = [&](const Packing& p) {
        std::map<std::string, SpherePoint> out;
        auto t = [&](int u, int v) { return p.tangency(p.index(c.vertex_ids[u]), p.index(c.vertex_ids[v])); };
        for (const auto& f : c.faces) {
            const auto& w = f.walk;
            out["face " + f.id] = cross_ratio(t(w[0], w[1]), t(w[1], w[2]), t(w[2], w[3]), t(w[3], w[0])).value;
        }
        auto rot = c.rotation();
        for (std::size_t v = 0; v < rot.size(); ++v) {
            const auto& r = rot[v];
            if (r.size() < 4) continue;
            int u = static_cast<int>(v);
            out["vertex " + c.vertex_ids[v]] = cross_ratio(t(u, r[0]), t(u, r[1]), t(u, r[2]), t(u, r[3])).value;
        }
        return out;
    };
    auto ra = ratios(pa), rb = ratios(pb);
    double worst = 0.0;
    for (const auto& [key, z] : ra) {
        const SpherePoint& w = rb.at(key);
        double d = (z.inf || w.inf) ? (z.inf == w.inf ? 0.0 : 1e300) : std::abs(z.z - w.z);
        worst = std::max(worst, d);
    }
    return {worst <= 1e-8, std::to_string(ra.size()) + " cross-ratios, outer A vs C, max diff " + fmt(worst)};
}

// 5. Tile diameters over levels 1..5.
Outcome tile_decay() {
    bool pass = true;
    std::ostringstream d;
    for (const char* g : {"g1", "g2"}) {
        PlanarComplex c = level(builtin_complex(g), 5);
        Packing p = pack_complex(c);
        std::vector<double> m;
        for (int n = 1; n <= 5; ++n) m.push_back(max_upper_diameter(tiles_at_level(p, c, n, 4)));
        bool dec = true;
        for (std::size_t i = 1; i < m.size(); ++i) dec = dec && m[i] < m[i - 1];
        double ratio = m.back() / m.front();
        pass = pass && dec && ratio < 0.25;
        d << g << ": decreasing=" << dec << " final/initial=" << fmt(ratio) << "; ";
    }
    d << "needs < 0.25";
    return {pass, d.str()};
}

// 6. Intersection patterns of G1 tiles up to level 3.
Outcome intersections() {
    PlanarComplex c = level(builtin().g1, 3);
    Packing p = pack_complex(c);
    int pairs = 0, bad = 0;
    for (int n = 0; n <= 3; ++n) {
        auto ids = faces_at_level(c, n);
        auto tiles = tiles_at_level(p, c, n, 4);
        for (std::size_t i = 0; i < ids.size(); ++i)
            for (std::size_t j = i + 1; j < ids.size(); ++j) {
                ++pairs;
                if (!intersection_pattern(tiles[i], tiles[j], shared_boundary(c, ids[i], ids[j])).matches) ++bad;
            }
    }
    return {bad == 0 && pairs > 0, std::to_string(pairs) + " pairs, " + std::to_string(bad) + " mismatches"};
}

// 7. Parabolic asymptotics.
Outcome asymptotics() {
    AsymptoticsFit model = fit_asymptotics(model_parabolic_sequence(100), SpherePoint(0.0));
    bool a = std::abs(model.s_d + 1.0) <= 1e-12 && std::abs(model.s_g + 2.0) <= 1e-12;
    const auto& cat = builtin();
    InvariantCircleRun run =
        invariant_circle_asymptotics(cat.rule, cat.g1, cat.s_map, cat.period_two_vertex, 2, "B", 100, 8);
    bool b = run.fit.s_d >= -1.15 && run.fit.s_d <= -0.85 && run.fit.s_g >= -2.2 && run.fit.s_g <= -1.8 &&
             run.fit.hi == 100;
    std::ostringstream d;
    d << "model s_d=" << fmt(model.s_d) << " s_g=" << fmt(model.s_g) << "; G1 circle A (M=" << run.fit.hi
      << ", level 8 + refinement, " << run.vertices << " vertices) s_d=" << fmt(run.fit.s_d)
      << " s_g=" << fmt(run.fit.s_g);
    return {a && b, d.str()};
}

// 8. Symmetry fits over levels 3..5.
Outcome symmetry_fits() {
    const auto& cat = builtin();
    auto rows = symfit_table(cat, 3, 5);
    std::vector<double> td;
    for (int n = 3; n <= 5; ++n) {
        PlanarComplex c = level(cat.g2, n);
        Packing p = pack_complex(c);
        auto seq = classify_periodic_faces(c, periodic_path("in", {1, 2}, n + 1), 2);
        td.push_back(estimate_mobius_symmetry(p, c, cat.rule, seq).trace_defect);
    }
    bool dec = true;
    std::ostringstream d;
    d << "M1";
    for (const auto& r : rows) d << ' ' << fmt(r.m1);
    d << "; M2";
    for (const auto& r : rows) d << ' ' << fmt(r.m2);
    d << "; |tr^2-4|";
    for (double t : td) d << ' ' << fmt(t);
    for (std::size_t i = 1; i < rows.size(); ++i)
        dec = dec && rows[i].m1 < rows[i - 1].m1 && rows[i].m2 < rows[i - 1].m2 && td[i] < td[i - 1];
    return {dec, d.str()};
}

// 9. Group orbit against the level-6 G2 packing.
Outcome orbit() {
    const auto& cat = builtin();
    PlanarComplex c = level(cat.g2, 6);
    Packing p = pack_complex(c);
    GroupSymmetries s = fit_group_symmetries(p, c, cat.rule);
    GroupOrbit o = group_limit_orbit(p, c, cat.rule, s.m1.map, s.m2.map, {"A", "B", "C", "D", "in@x", "out@x"}, 3);
    const double bound = s.residual() + 1e-6;
    // Every computed word image is scored, including words whose counterpart a shorter word already reached.
    std::size_t scored = 0;
    for (const auto& oc : o.circles)
        if (!oc.counterpart.empty()) ++scored;
    std::ostringstream d;
    d << o.words * o.base.size() << " word images (" << scored << " distinct), bound " << fmt(bound)
      << ", worst by length";
    for (double w : o.worst_all_by_length) d << ' ' << fmt(w);
    d << " (shortest words only:";
    for (double w : o.worst_by_length) d << ' ' << fmt(w);
    d << ")";
    return {o.worst_all <= bound && scored == o.circles.size(), d.str()};
}

// 10. Local equivalence.
Outcome local_equivalence_check() {
    const auto& cat = builtin();
    PlanarComplex c1 = level(cat.g1, 4), c2 = level(cat.g2, 4);
    LocalEquivalence le = local_equivalence(pack_complex(c1), c1, pack_complex(c2), c2, cat.rule);
    std::ostringstream d;
    d << "isomorphic:";
    for (const auto& v : le.views) d << ' ' << v.name << '=' << v.isomorphic;
    d << "; max cross-ratio gap G1,+ vs G2,+ " << fmt(le.max_cross_ratio_gap);
    return {le.all_isomorphic && le.max_cross_ratio_gap > 1e-3, d.str()};
}

// 11. CLI determinism: two runs with automatic threads and one with a single thread.
std::map<std::string, std::string> snapshot(const fs::path& dir) {
    std::map<std::string, std::string> files;
    for (const auto& e : fs::recursive_directory_iterator(dir))
        if (e.is_regular_file()) files[fs::relative(e.path(), dir).string()] = read_file(e.path().string());
    return files;
}

Outcome determinism(const std::string& cli) {
    const std::vector<std::vector<std::string>> jobs{
        {"validate", "--builtin", "quad"},
        {"pack", "--builtin", "g2", "--level", "4", "--out", "g2.packing"},
        {"render", "g2.packing", "--out", "g2.svg"},
        {"render", "--builtin", "g2", "--level", "4", "--depth", "2", "--cloud-out", "g2.cloud", "--out", "cloud.svg"},
        {"stats", "--symmetry", "--level", "4"},
        {"stats", "--tiles", "--level", "4"},
        {"gallery", "--demo", "snlo", "--level", "4", "--out", "snlo"},
        {"gallery", "--demo", "qrsym", "--level", "3", "--out", "qrsym"},
        {"gallery", "--demo", "symfit", "--level", "5", "--depth", "3", "--out", "symfit"},
    };
    const fs::path root = fs::temp_directory_path() / "gf_acceptance_determinism";
    fs::remove_all(root);
    const std::vector<std::pair<std::string, std::string>> runs{{"auto1", "0"}, {"auto2", "0"}, {"single", "1"}};
    std::vector<std::map<std::string, std::string>> seen;
    for (const auto& [name, threads] : runs) {
        fs::path dir = root / name;
        fs::create_directories(dir);
        for (std::size_t j = 0; j < jobs.size(); ++j) {
            std::string cmd = "cd '" + dir.string() + "' && GASKET_FORGE_THREADS=" + threads + " '" + cli + "'";
            for (const auto& a : jobs[j]) cmd += " '" + a + "'";
            cmd += " > stdout_" + std::to_string(j) + ".txt 2> stderr_" + std::to_string(j) + ".txt";
            int rc = std::system(cmd.c_str());
            if (rc != 0) return {false, "command failed: " + cmd};
        }
        seen.push_back(snapshot(dir));
    }
    bool same = seen[0] == seen[1] && seen[0] == seen[2];
    return {same, std::to_string(seen[0].size()) + " files from " + std::to_string(jobs.size()) +
                      " commands, identical across 2 auto runs and 1 single-thread run: " + (same ? "yes" : "no")};
}

}  // namespace

int main(int argc, char** argv) {
    std::string cli = argc > 1 ? argv[1] : "";
    if (cli.empty() || !fs::exists(cli)) {
        std::cerr << "usage: gf_acceptance <path to gasket-forge>\n";
        return 2;
    }
    cli = fs::absolute(cli).string();
    const std::vector<std::pair<std::string, std::function<Outcome()>>> items{
        {"Descartes oracle", descartes},
        {"residuals on fixtures", residuals},
        {"rule classification", classification},
        {"Mobius rigidity surrogate", rigidity},
        {"tile-diameter decay", tile_decay},
        {"intersection patterns", intersections},
        {"parabolic asymptotics", asymptotics},
        {"symmetry fitting", symmetry_fits},
        {"group-orbit consistency", orbit},
        {"local-equivalence demo", local_equivalence_check},
        {"determinism", [&] { return determinism(cli); }},
    };
    int unexpected = 0;
    for (std::size_t i = 0; i < items.size(); ++i) {
        const int id = static_cast<int>(i) + 1;
        Outcome o;
        try {
            o = items[i].second();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        bool known = !o.pass && kKnownUnattainable.count(id);
        if (!o.pass && !known) ++unexpected;
        std::cout << (o.pass ? "PASS" : "FAIL") << ' ' << id << ' ' << items[i].first << ": " << o.detail
                  << (known ? " [known unattainable, see README]" : "") << std::endl;
    }
    return unexpected == 0 ? 0 : 1;
}
