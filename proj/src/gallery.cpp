#include "gasket_forge/gallery.hpp"

#include <algorithm>
#include <cstdio>
#include <deque>
#include <filesystem>
#include <set>
#include <sstream>

#include "gasket_forge/formats.hpp"
#include "gasket_forge/parallel.hpp"
#include "gasket_forge/render.hpp"

namespace gf {

namespace {

std::string num(double x) { return svg_real(x); }

std::string num(const SpherePoint& z) {
    if (z.inf) return "inf inf";
    return num(z.z.real()) + " " + num(z.z.imag());
}

const Face& record_or_throw(const PlanarComplex& c, const std::string& id) {
    const Face* f = c.face_record(id);
    if (!f) throw GalleryError("face " + id + " is not in the level-" + std::to_string(c.level) + " complex");
    return *f;
}

// Frame sending the tangencies of three consecutive corner pairs to 1, i, -1.
MobiusMap corner_frame(const Packing& p, const std::array<std::string, 4>& corners) {
    auto t = [&](int a, int b) { return p.tangency(p.index(corners[a]), p.index(corners[b])); };
    return mobius_from_triples(t(0, 1), t(1, 2), t(2, 3), SpherePoint(1.0), SpherePoint(cplx(0.0, 1.0)),
                               SpherePoint(-1.0));
}

MobiusMap face_frame(const Packing& p, const PlanarComplex& c, const std::string& face) {
    const Face& f = record_or_throw(c, face);
    if (f.walk.size() != 4) throw GalleryError("face " + face + " is not a quadrilateral");
    return corner_frame(p, {c.vertex_ids[f.walk[0]], c.vertex_ids[f.walk[1]], c.vertex_ids[f.walk[2]],
                            c.vertex_ids[f.walk[3]]});
}

}  // namespace

// ---- catalog dynamics ----

CatalogDynamics catalog_dynamics(const BuiltinCatalog& cat) {
    CatalogDynamics d;
    auto step = [&](const std::string& v) {
        auto it = cat.s_map.find(v);
        if (it == cat.s_map.end()) throw GalleryError("vertex map misses " + v);
        return it->second;
    };
    PlanarComplex g1 = subdivide(cat.g1, cat.rule);
    d.homomorphism = build_homomorphism(cat.s_map, g1, cat.g1).valid();

    const std::string& a = cat.period_two_vertex;
    d.orbit_of_period_two.push_back(a);
    for (int k = 1; k <= 4; ++k) {
        d.orbit_of_period_two.push_back(step(d.orbit_of_period_two.back()));
        if (d.period == 0 && d.orbit_of_period_two.back() == a) d.period = k;
    }

    // Walk the orbit of C until a vertex repeats; the preperiod is the index of the first repeat.
    std::vector<std::string>& orb = d.orbit_of_preperiodic;
    orb.push_back(cat.preperiodic_vertex);
    for (int k = 0; k < 16; ++k) {
        std::string next = step(orb.back());
        const auto first = std::find(orb.begin(), orb.end(), next) - orb.begin();
        const bool repeat = first < static_cast<long>(orb.size());
        orb.push_back(next);
        if (repeat) {
            d.preperiod = static_cast<int>(first);
            break;
        }
    }
    d.ok = d.homomorphism && d.period == 2 && d.preperiod > 0;
    return d;
}

// ---- symmetries ----

GroupSymmetries fit_group_symmetries(const Packing& p, const PlanarComplex& c, const SubdivisionRule& rule) {
    if (c.level < 3) throw GalleryError("symmetry fit needs level >= 3, got " + std::to_string(c.level));
    const BuiltinCatalog& cat = builtin();
    try {
        return {fit_symmetry(p, c, rule, cat.g1_pieces), fit_symmetry(p, c, rule, cat.g2_pieces)};
    } catch (const MarkovError& e) {
        throw GalleryError(std::string("correspondence missing: ") + e.what());
    }
}

namespace {

constexpr char kLetters[4] = {'a', 'b', 'A', 'B'};

int letter_index(char l) {
    for (int i = 0; i < 4; ++i)
        if (kLetters[i] == l) return i;
    throw GalleryError(std::string("unknown letter ") + l);
}

}  // namespace

std::vector<std::string> reduced_words(int max_length) {
    if (max_length < 0) throw GalleryError("word length must be non-negative");
    std::vector<std::string> words{""};
    std::size_t from = 0;
    for (int len = 1; len <= max_length; ++len) {
        std::size_t to = words.size();
        for (std::size_t i = from; i < to; ++i) {
            for (int g = 0; g < 4; ++g) {
                const std::string& w = words[i];
                if (!w.empty() && letter_index(w.back()) == (g + 2) % 4) continue;
                words.push_back(w + kLetters[g]);
            }
        }
        from = to;
    }
    return words;
}

GroupOrbit group_limit_orbit(const Packing& p, const PlanarComplex& c, const SubdivisionRule& rule,
                             const MobiusMap& m1, const MobiusMap& m2, const std::vector<std::string>& base,
                             int max_length) {
    const BuiltinCatalog& cat = builtin();
    GroupOrbit orbit;
    orbit.m1 = m1;
    orbit.m2 = m2;
    orbit.max_length = max_length;
    orbit.base = base;

    const MobiusMap gens[4] = {m1, m2, m1.inverse(), m2.inverse()};
    std::vector<int> vmap[4];
    try {
        vmap[0] = transport(rule, c, c, cat.g1_pieces);
        vmap[1] = transport(rule, c, c, cat.g2_pieces);
        vmap[2] = transport(rule, c, c, inverse_pieces(cat.g1_pieces));
        vmap[3] = transport(rule, c, c, inverse_pieces(cat.g2_pieces));
    } catch (const ComplexError& e) {
        throw GalleryError(std::string("symmetry correspondence is ambiguous: ") + e.what());
    }
    const MobiusMap frame = face_frame(p, c, "in");

    const std::vector<std::string> words = reduced_words(max_length);
    orbit.words = words.size();
    std::vector<OrbitCircle> all(words.size() * base.size());
    // Compose matrices before touching a circle: an intermediate image can pass near infinity.
    parallel_for(words.size(), [&](std::size_t wi) {
        const std::string& w = words[wi];
        MobiusMap word{1.0, 0.0, 0.0, 1.0};
        for (char l : w) word = word * gens[letter_index(l)];
        for (std::size_t bi = 0; bi < base.size(); ++bi) {
            OrbitCircle& oc = all[wi * base.size() + bi];
            oc.word = w;
            oc.base = base[bi];
            const GenCircle& g = p.circle(base[bi]);
            oc.circle = map_circle(word, g);
            int v = c.find_vertex(base[bi]);
            for (auto it = w.rbegin(); it != w.rend() && v >= 0; ++it) v = vmap[letter_index(*it)][v];
            if (v < 0) continue;
            oc.counterpart = c.vertex_ids[v];
            oc.mismatch = circle_mismatch(map_circle(frame * word, g), map_circle(frame, p.circle(oc.counterpart)));
        }
    });

    std::set<std::string> seen;
    orbit.worst_by_length.assign(max_length + 1, 0.0);
    orbit.worst_all_by_length.assign(max_length + 1, 0.0);
    for (auto& oc : all) {
        if (oc.mismatch > 0.0) {
            double& w = orbit.worst_all_by_length[oc.word.size()];
            w = std::max(w, oc.mismatch);
            orbit.worst_all = std::max(orbit.worst_all, oc.mismatch);
        }
        if (!oc.counterpart.empty() && !seen.insert(oc.counterpart).second) {
            ++orbit.duplicates;
            continue;
        }
        if (oc.mismatch > 0.0) {
            double& w = orbit.worst_by_length[oc.word.size()];
            w = std::max(w, oc.mismatch);
            orbit.worst = std::max(orbit.worst, oc.mismatch);
        }
        orbit.circles.push_back(std::move(oc));
    }
    return orbit;
}

std::string format_orbit(const GroupOrbit& orbit) {
    std::ostringstream os;
    os << "# word base counterpart mismatch\n";
    for (const auto& oc : orbit.circles)
        os << (oc.word.empty() ? "e" : oc.word) << ' ' << oc.base << ' '
           << (oc.counterpart.empty() ? "-" : oc.counterpart) << ' ' << num(oc.mismatch) << '\n';
    os << "words=" << orbit.words << " circles=" << orbit.circles.size() << " duplicates=" << orbit.duplicates << '\n';
    for (std::size_t k = 0; k < orbit.worst_by_length.size(); ++k)
        os << "worst_length_" << k << "=" << num(orbit.worst_by_length[k]) << '\n';
    os << "worst=" << num(orbit.worst) << '\n';
    for (std::size_t k = 0; k < orbit.worst_all_by_length.size(); ++k)
        os << "worst_all_length_" << k << "=" << num(orbit.worst_all_by_length[k]) << '\n';
    os << "worst_all=" << num(orbit.worst_all) << '\n';
    return os.str();
}

// ---- local equivalence ----

PlanarComplex sub_complex(const PlanarComplex& c, const std::vector<std::string>& faces) {
    std::vector<int> picked;
    for (const auto& id : faces) {
        auto d = descendant_faces(c, id);
        if (d.empty()) throw GalleryError("face " + id + " is not in the level-" + std::to_string(c.level) + " complex");
        picked.insert(picked.end(), d.begin(), d.end());
    }
    std::sort(picked.begin(), picked.end());
    picked.erase(std::unique(picked.begin(), picked.end()), picked.end());

    PlanarComplex out;
    out.level = c.level;
    std::map<int, int> index;
    for (int v : vertices_of_faces(c, picked)) index[v] = out.add_vertex(c.vertex_ids[v], c.birth[v]);
    std::set<std::pair<int, int>> darts;
    for (int fi : picked) {
        Face f = c.faces[fi];
        for (int& v : f.walk) v = index.at(v);
        const std::size_t k = f.walk.size();
        for (std::size_t i = 0; i < k; ++i) darts.insert({f.walk[i], f.walk[(i + 1) % k]});
        out.faces.push_back(std::move(f));
    }
    // The external face runs each unmatched dart backwards.
    std::map<int, int> ext_next;
    for (auto [u, v] : darts)
        if (!darts.count({v, u}))
            if (!ext_next.emplace(v, u).second)
                throw GalleryError("faces do not form a disk: boundary revisits " + out.vertex_ids[v]);
    if (ext_next.empty()) throw GalleryError("faces have no boundary");
    Face ext{"ext", "-", {}, true, 0};
    int start = ext_next.begin()->first, cur = start;
    do {
        ext.walk.push_back(cur);
        cur = ext_next.at(cur);
    } while (cur != start && ext.walk.size() <= ext_next.size());
    if (ext.walk.size() != ext_next.size()) throw GalleryError("faces do not form a disk: boundary is not one cycle");
    out.faces.push_back(std::move(ext));
    return out;
}

namespace {

// Aligns the rotations at u and u' through the dart pair (u,v) -> (u',v') and spreads outward.
std::vector<int> propagate(const std::vector<std::vector<int>>& ra, const std::vector<std::vector<int>>& rb, int u,
                           int v, int u2, int v2) {
    const std::size_t n = ra.size();
    std::vector<int> ma(n, -1), mb(n, -1);
    std::vector<char> done(n, 0);
    auto assign = [&](int x, int y) {
        if (ma[x] == y && mb[y] == x) return true;
        if (ma[x] != -1 || mb[y] != -1) return false;
        ma[x] = y;
        mb[y] = x;
        return true;
    };
    if (!assign(u, u2) || !assign(v, v2)) return {};
    std::deque<std::array<int, 4>> queue{{u, v, u2, v2}};
    while (!queue.empty()) {
        auto [x, y, x2, y2] = queue.front();
        queue.pop_front();
        if (done[x]) continue;
        done[x] = 1;
        const auto& rx = ra[x];
        const auto& rx2 = rb[x2];
        if (rx.size() != rx2.size()) return {};
        const std::size_t d = rx.size();
        std::size_t i = std::find(rx.begin(), rx.end(), y) - rx.begin();
        std::size_t j = std::find(rx2.begin(), rx2.end(), y2) - rx2.begin();
        if (i == d || j == d) return {};
        for (std::size_t k = 0; k < d; ++k) {
            int w = rx[(i + k) % d], w2 = rx2[(j + k) % d];
            if (!assign(w, w2)) return {};
            if (!done[w]) queue.push_back({w, x, w2, x2});
        }
    }
    for (int x : ma)
        if (x < 0) return {};
    return ma;
}

const Face& external_of(const PlanarComplex& c) {
    int e = c.external_face();
    if (e < 0) throw GalleryError("complex has no external face");
    return c.faces[e];
}

bool external_preserved(const PlanarComplex& a, const PlanarComplex& b, const std::vector<int>& m) {
    std::set<int> ea, eb(external_of(b).walk.begin(), external_of(b).walk.end());
    for (int v : external_of(a).walk) ea.insert(m[v]);
    return ea == eb;
}

std::vector<int> isomorphism_from(const PlanarComplex& a, const PlanarComplex& b, int u, int v, int u2, int v2) {
    if (a.vertex_count() != b.vertex_count() || a.faces.size() != b.faces.size() ||
        a.edges().size() != b.edges().size())
        return {};
    auto m = propagate(a.rotation(), b.rotation(), u, v, u2, v2);
    if (m.empty() || !external_preserved(a, b, m)) return {};
    return m;
}

}  // namespace

std::vector<int> plane_isomorphism(const PlanarComplex& a, const PlanarComplex& b) {
    const auto& ea = external_of(a).walk;
    const auto& eb = external_of(b).walk;
    if (ea.size() < 2 || ea.size() != eb.size()) return {};
    const std::size_t k = eb.size();
    for (std::size_t i = 0; i < k; ++i) {
        auto m = isomorphism_from(a, b, ea[0], ea[1], eb[i], eb[(i + 1) % k]);
        if (!m.empty()) return m;
    }
    return {};
}

void write_bundle(const DemoBundle& bundle, const std::string& dir) {
    std::filesystem::create_directories(dir);
    for (const auto& [name, content] : bundle.files) write_file((std::filesystem::path(dir) / name).string(), content);
}

namespace {

struct ViewSpec {
    const char* name;
    int packing;  // 1 or 2
    std::vector<std::string> faces;
};

const std::vector<ViewSpec>& view_specs() {
    static const std::vector<ViewSpec> v{
        {"g1_in", 1, {"in"}},
        {"g1_out", 1, {"out"}},
        {"g1_tilde_left", 1, {"in.2", "out.1"}},
        {"g1_tilde_right", 1, {"in.1", "out.2"}},
        {"g2_in", 2, {"in"}},
        {"g2_out", 2, {"out"}},
    };
    return v;
}

}  // namespace

LocalEquivalence local_equivalence(const Packing& p1, const PlanarComplex& c1, const Packing& p2,
                                   const PlanarComplex& c2, const SubdivisionRule& rule) {
    if (c1.level != c2.level) throw GalleryError("packings are at different levels");
    if (c1.level < 1) throw GalleryError("local equivalence needs level >= 1, got " + std::to_string(c1.level));
    LocalEquivalence le;
    le.model = iterate_subdivision(polygon_complex(rule, "P"), rule, c1.level);
    const auto model_edges = le.model.edges();
    for (auto [u, v] : model_edges) le.model_edges.emplace_back(le.model.vertex_ids[u], le.model.vertex_ids[v]);
    const int m0 = le.model.vertex("0"), m1 = le.model.vertex("1");

    le.all_isomorphic = true;
    for (const auto& spec : view_specs()) {
        const PlanarComplex& c = spec.packing == 1 ? c1 : c2;
        const Packing& p = spec.packing == 1 ? p1 : p2;
        SubPackingView view;
        view.name = spec.name;
        view.faces = spec.faces;
        PlanarComplex sub = sub_complex(c, spec.faces);

        // A single face starts from its first typed edge; a union tries its boundary darts in order.
        std::vector<std::pair<int, int>> starts;
        if (spec.faces.size() == 1) {
            const Face& f = record_or_throw(c, spec.faces[0]);
            starts.emplace_back(sub.vertex(c.vertex_ids[f.walk[0]]), sub.vertex(c.vertex_ids[f.walk[1]]));
        } else {
            const auto& ext = external_of(sub).walk;
            for (std::size_t i = 0; i < ext.size(); ++i) {
                starts.emplace_back(ext[i], ext[(i + 1) % ext.size()]);
                starts.emplace_back(ext[(i + 1) % ext.size()], ext[i]);
            }
        }
        for (auto [u, v] : starts) {
            view.to_model = isomorphism_from(sub, le.model, u, v, m0, m1);
            if (!view.to_model.empty()) break;
        }
        view.isomorphic = !view.to_model.empty();
        le.all_isomorphic = le.all_isomorphic && view.isomorphic;
        if (view.isomorphic) {
            std::vector<std::string> from_model(le.model.vertex_count());
            for (std::size_t s = 0; s < view.to_model.size(); ++s) from_model[view.to_model[s]] = sub.vertex_ids[s];
            const MobiusMap frame = corner_frame(p, {from_model[le.model.vertex("0")], from_model[le.model.vertex("1")],
                                                     from_model[le.model.vertex("2")], from_model[le.model.vertex("3")]});
            for (const auto& id : from_model) view.circles.push_back(map_circle(frame, p.circle(id)));
            auto t = [&](int a, int b) { return p.tangency(p.index(from_model[a]), p.index(from_model[b])); };
            const SpherePoint t01 = t(le.model.vertex("0"), m1), t12 = t(m1, le.model.vertex("2")),
                              t23 = t(le.model.vertex("2"), le.model.vertex("3"));
            for (auto [u, v] : model_edges) view.cross_ratios.push_back(cross_ratio(t(u, v), t01, t12, t23).value);
        }
        le.views.push_back(std::move(view));
    }
    const auto& a = le.views[0].cross_ratios;
    const auto& b = le.views[4].cross_ratios;
    if (a.size() == b.size())
        for (std::size_t i = 0; i < a.size(); ++i)
            le.max_cross_ratio_gap = std::max(le.max_cross_ratio_gap, spherical_distance(a[i], b[i]));
    return le;
}

std::string format_cross_ratio_table(const LocalEquivalence& le) {
    std::ostringstream os;
    os << "# cross-ratio of each model tangency point against the corner tangencies 01, 12, 23\n";
    os << "# edge";
    for (const auto& v : le.views) os << ' ' << v.name << ".re " << v.name << ".im";
    os << '\n';
    for (std::size_t e = 0; e < le.model_edges.size(); ++e) {
        os << le.model_edges[e].first << '-' << le.model_edges[e].second;
        for (const auto& v : le.views) os << ' ' << (e < v.cross_ratios.size() ? num(v.cross_ratios[e]) : "- -");
        os << '\n';
    }
    for (const auto& v : le.views) os << "isomorphic_" << v.name << "=" << (v.isomorphic ? 1 : 0) << '\n';
    os << "all_isomorphic=" << (le.all_isomorphic ? 1 : 0) << '\n';
    os << "max_gap_g1_in_g2_in=" << num(le.max_cross_ratio_gap) << '\n';
    return os.str();
}

DemoBundle local_equivalence_demo(const Packing& p1, const PlanarComplex& c1, const Packing& p2,
                                  const PlanarComplex& c2, const SubdivisionRule& rule) {
    LocalEquivalence le = local_equivalence(p1, c1, p2, c2, rule);
    DemoBundle bundle;
    RenderSpec spec;
    spec.half_width = 1.6;
    spec.stroke = 0.003;
    auto layer = [](const SubPackingView& v, const char* color) {
        SvgLayer l;
        l.name = v.name;
        l.color = color;
        l.circles = v.circles;
        return l;
    };
    for (const auto& v : le.views) bundle.files[v.name + ".svg"] = render_svg({layer(v, "#000000")}, spec);
    const std::pair<int, int> overlays[] = {{0, 4}, {1, 5}, {2, 4}, {3, 5}};
    for (auto [i, j] : overlays) {
        const auto& a = le.views[i];
        const auto& b = le.views[j];
        bundle.files["overlay_" + a.name + "_" + b.name + ".svg"] =
            render_svg({layer(a, "#1f4e9c"), layer(b, "#c0392b")}, spec);
    }
    bundle.files["cross_ratios.txt"] = format_cross_ratio_table(le);
    bundle.ok = le.all_isomorphic && le.max_cross_ratio_gap > 1e-3;
    std::ostringstream os;
    os << "demo=snlo\nlevel=" << c1.level << "\nall_isomorphic=" << (le.all_isomorphic ? 1 : 0)
       << "\nmax_gap_g1_in_g2_in=" << num(le.max_cross_ratio_gap) << "\n";
    bundle.summary = os.str();
    bundle.files["summary.txt"] = bundle.summary;
    return bundle;
}

// ---- branched cover ----

namespace {

std::vector<int> canonical_cycle(std::vector<int> walk) {
    std::rotate(walk.begin(), std::min_element(walk.begin(), walk.end()), walk.end());
    return walk;
}

}  // namespace

CoverReport qr_symmetry_demo(const BuiltinCatalog& cat, int n) {
    if (n < 1) throw GalleryError("branched cover needs level >= 1: the domain U~ is made of level-1 faces");
    VertexMarkovMap vm = induce_vertex_markov(cat.rule, cat.g1, cat.s_map, n + 2, 1);
    const PlanarComplex& top = vm.levels[n + 2];
    const PlanarComplex& low = vm.levels[n];
    auto s2 = [&](int v) { return vm.psi[n][vm.psi[n + 1][v]]; };

    CoverReport r;
    r.level = n;
    const std::vector<std::string> u_faces{"in.1", "out.2"};
    auto in_u = [&](const std::string& id) {
        for (const auto& u : u_faces)
            if (is_descendant_id(id, u)) return true;
        return false;
    };

    std::map<std::vector<int>, int> low_face;
    for (std::size_t f = 0; f < low.faces.size(); ++f) low_face[canonical_cycle(low.faces[f].walk)] = static_cast<int>(f);
    for (const auto& f : low.faces)
        if (in_u(f.id)) {
            r.target_faces.push_back(f.id);
            r.fiber[f.id] = 0;
        }

    // Image face of every top face; the homomorphism must hit a face with the same cyclic walk.
    r.faces_commute = true;
    std::vector<int> image(top.faces.size(), -1);
    for (std::size_t f = 0; f < top.faces.size(); ++f) {
        std::vector<int> w;
        for (int v : top.faces[f].walk) w.push_back(s2(v));
        auto it = low_face.find(canonical_cycle(w));
        if (it == low_face.end()) {
            r.faces_commute = false;
            continue;
        }
        image[f] = it->second;
    }

    // W~: the edge-connected component of the preimage of U~ around B.
    std::map<std::pair<int, int>, std::vector<int>> by_edge;
    std::vector<char> pre(top.faces.size(), 0);
    for (std::size_t f = 0; f < top.faces.size(); ++f) {
        if (image[f] < 0 || !in_u(low.faces[image[f]].id)) continue;
        pre[f] = 1;
        const auto& w = top.faces[f].walk;
        for (std::size_t i = 0; i < w.size(); ++i) {
            int a = w[i], b = w[(i + 1) % w.size()];
            by_edge[{std::min(a, b), std::max(a, b)}].push_back(static_cast<int>(f));
        }
    }
    const int b_vertex = top.vertex("B");
    std::vector<char> in_w(top.faces.size(), 0);
    std::deque<int> queue;
    for (std::size_t f = 0; f < top.faces.size(); ++f)
        if (pre[f] && std::count(top.faces[f].walk.begin(), top.faces[f].walk.end(), b_vertex)) {
            in_w[f] = 1;
            queue.push_back(static_cast<int>(f));
        }
    while (!queue.empty()) {
        int f = queue.front();
        queue.pop_front();
        const auto& w = top.faces[f].walk;
        for (std::size_t i = 0; i < w.size(); ++i) {
            int a = w[i], b = w[(i + 1) % w.size()];
            for (int g : by_edge[{std::min(a, b), std::max(a, b)}])
                if (!in_w[g]) {
                    in_w[g] = 1;
                    queue.push_back(g);
                }
        }
    }

    r.inside = true;
    std::vector<int> faces_at_top(top.vertex_count(), 0), w_faces_at(top.vertex_count(), 0);
    std::vector<int> faces_at_low(low.vertex_count(), 0);
    for (const auto& f : top.faces)
        for (int v : f.walk) ++faces_at_top[v];
    for (const auto& f : low.faces)
        for (int v : f.walk) ++faces_at_low[v];
    for (std::size_t f = 0; f < top.faces.size(); ++f) {
        if (!in_w[f]) continue;
        r.source_faces.push_back(top.faces[f].id);
        ++r.fiber[low.faces[image[f]].id];
        if (!in_u(top.faces[f].id)) r.inside = false;
        for (int v : top.faces[f].walk) ++w_faces_at[v];
    }
    for (const auto& [face, k] : r.fiber) {
        ++r.fiber_histogram[k];
        if (k == 1) r.branch_faces.push_back(face);
    }
    for (std::size_t v = 0; v < top.vertex_count(); ++v) {
        if (w_faces_at[v] == 0 || w_faces_at[v] != faces_at_top[v]) continue;  // boundary of W~
        if (faces_at_top[v] == 2 * faces_at_low[s2(static_cast<int>(v))]) r.branch_vertices.push_back(top.vertex_ids[v]);
    }

    // Vertices already present at level n + 1 have the same image whichever level computes it.
    r.levels_commute = true;
    const PlanarComplex& mid = vm.levels[n + 1];
    const PlanarComplex& below = vm.levels[n - 1];
    for (std::size_t v = 0; v < mid.vertex_count(); ++v) {
        int deep = s2(top.vertex(mid.vertex_ids[v]));
        int shallow = vm.psi[n - 1][vm.psi[n][v]];
        if (low.vertex_ids[deep] != below.vertex_ids[shallow]) r.levels_commute = false;
    }
    return r;
}

std::string format_cover(const CoverReport& r) {
    std::ostringstream os;
    os << "demo=qrsym\nlevel=" << r.level << "\ntarget_faces=" << r.target_faces.size()
       << "\nsource_faces=" << r.source_faces.size() << '\n';
    for (const auto& [k, count] : r.fiber_histogram) os << "fiber_" << k << "=" << count << '\n';
    os << "branch_faces=" << r.branch_faces.size() << "\nbranch_vertices=";
    for (std::size_t i = 0; i < r.branch_vertices.size(); ++i) os << (i ? "," : "") << r.branch_vertices[i];
    os << "\nfaces_commute=" << (r.faces_commute ? 1 : 0) << "\nlevels_commute=" << (r.levels_commute ? 1 : 0)
       << "\ninside=" << (r.inside ? 1 : 0) << '\n';
    os << "# target face, fiber size\n";
    for (const auto& [face, k] : r.fiber) os << face << ' ' << k << '\n';
    return os.str();
}

// ---- symmetry fit across levels ----

std::vector<SymfitRow> symfit_table(const BuiltinCatalog& cat, int lo, int hi) {
    if (lo < 3) throw GalleryError("symmetry fit needs level >= 3, got " + std::to_string(lo));
    if (hi < lo) throw GalleryError("empty level range");
    std::vector<SymfitRow> rows;
    PlanarComplex c = iterate_subdivision(cat.g2, cat.rule, lo);
    for (int n = lo; n <= hi; ++n) {
        if (n > lo) c = subdivide(c, cat.rule);
        Packing p = pack_complex(c);
        GroupSymmetries s = fit_group_symmetries(p, c, cat.rule);
        rows.push_back({n, s.m1.residual, s.m2.residual, p.tangency_residual});
    }
    return rows;
}

std::string format_symfit(const std::vector<SymfitRow>& rows) {
    std::ostringstream os;
    os << "# level m1_residual m2_residual tangency_residual\n";
    for (const auto& r : rows) os << r.level << ' ' << num(r.m1) << ' ' << num(r.m2) << ' ' << num(r.tangency) << '\n';
    bool dec = true;
    for (std::size_t i = 1; i < rows.size(); ++i)
        dec = dec && rows[i].m1 < rows[i - 1].m1 && rows[i].m2 < rows[i - 1].m2;
    os << "strictly_decreasing=" << (dec ? 1 : 0) << '\n';
    return os.str();
}

}  // namespace gf
