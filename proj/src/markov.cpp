#include "gasket_forge/markov.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <set>
#include <sstream>

namespace gf {

namespace {

int face_depth(const std::string& id) { return static_cast<int>(std::count(id.begin(), id.end(), '.')); }

const Face& face_or_throw(const PlanarComplex& c, const std::string& id) {
    const Face* f = c.face_record(id);
    if (!f) throw MarkovError("unknown face " + id);
    return *f;
}

std::vector<const Face*> all_face_records(const PlanarComplex& c) {
    std::vector<const Face*> out;
    for (const auto& f : c.faces)
        if (!f.external) out.push_back(&f);
    for (const auto& [id, f] : c.ancestors) out.push_back(&f);
    return out;
}

// Three consecutive tangencies of a face, starting from type-vertex `first`.
std::array<SpherePoint, 3> face_tangencies(const Packing& p, const PlanarComplex& c, const Face& f, int first) {
    const int k = static_cast<int>(f.walk.size());
    std::array<SpherePoint, 3> t;
    for (int j = 0; j < 3; ++j) {
        const std::string& u = c.vertex_ids[f.walk[((first + j) % k + k) % k]];
        const std::string& v = c.vertex_ids[f.walk[((first + j + 1) % k + k) % k]];
        t[j] = p.tangency(p.index(u), p.index(v));
    }
    return t;
}

const std::array<SpherePoint, 3>& balanced_frame() {
    static const std::array<SpherePoint, 3> f{SpherePoint(1.0), SpherePoint(cplx(0.0, 1.0)), SpherePoint(-1.0)};
    return f;
}

MobiusMap frame_of(const std::array<SpherePoint, 3>& t) {
    const auto& f = balanced_frame();
    return mobius_from_triples(t[0], t[1], t[2], f[0], f[1], f[2]);
}

}  // namespace

// ---- vertex maps ----

std::string VertexMarkovMap::image(const std::string& id) const {
    const PlanarComplex& top = levels.back();
    int v = top.find_vertex(id);
    if (v < 0) throw MarkovError("unknown vertex " + id);
    int n = std::max(0, top.birth[v] - shift);
    if (n >= static_cast<int>(psi.size())) throw MarkovError("no map computed for vertex " + id);
    int w = psi[n][levels[n + shift].vertex(id)];
    return levels[n].vertex_ids[w];
}

std::string VertexMarkovMap::iterate(const std::string& id, int power) const {
    std::string v = id;
    for (int i = 0; i < power; ++i) v = image(v);
    return v;
}

VertexMarkovMap induce_vertex_markov(const SubdivisionRule& rule, const PlanarComplex& g0,
                                     const std::map<std::string, std::string>& base_map, int depth, int shift) {
    if (shift < 0) throw MarkovError("shift must be non-negative");
    if (depth < shift) throw MarkovError("depth must be at least the shift");
    VertexMarkovMap vm;
    vm.shift = shift;
    vm.levels.push_back(g0);
    for (int n = 1; n <= depth; ++n) vm.levels.push_back(subdivide(vm.levels.back(), rule));

    const PlanarComplex& gs = vm.levels[shift];
    SubdivisionHomomorphism h = build_homomorphism(base_map, gs, g0);
    if (!h.valid()) throw MarkovError("base map is not a homomorphism: " + h.violations.front());
    for (std::size_t f = 0; f < gs.faces.size(); ++f)
        if (h.face_map[f] >= 0) vm.pieces.push_back({gs.faces[f].id, g0.faces[h.face_map[f]].id, h.face_offset[f]});

    for (int n = 0; n + shift <= depth; ++n) {
        const PlanarComplex& from = vm.levels[n + shift];
        const PlanarComplex& to = vm.levels[n];
        std::vector<int> map;
        try {
            map = transport(rule, from, to, vm.pieces);
        } catch (const ComplexError& e) {
            throw MarkovError(std::string("transport ambiguity at level ") + std::to_string(n) + ": " + e.what());
        }
        for (std::size_t v = 0; v < map.size(); ++v)
            if (map[v] < 0)
                throw MarkovError("vertex " + from.vertex_ids[v] + " of G^" + std::to_string(n + shift) +
                                  " has no image");
        auto adj = to.adjacency();
        for (auto [u, v] : from.edges()) {
            int a = map[u], b = map[v];
            if (a == b || !std::binary_search(adj[a].begin(), adj[a].end(), b))
                vm.violations.push_back("edge " + from.vertex_ids[u] + "-" + from.vertex_ids[v] + " of G^" +
                                        std::to_string(n + shift) + " goes to " + to.vertex_ids[a] + "-" +
                                        to.vertex_ids[b]);
        }
        vm.psi.push_back(std::move(map));
    }
    return vm;
}

// ---- invariant circles ----

InvariantCircleData markov_partition_on_circle(const Packing& p, const VertexMarkovMap& vm, const std::string& vertex,
                                               int power) {
    if (power < 1) throw MarkovError("power must be positive");
    if (vm.depth() < 1) throw MarkovError("vertex map needs level 1");
    if (vm.iterate(vertex, power) != vertex)
        throw MarkovError(vertex + " is not fixed by psi^" + std::to_string(power));
    const PlanarComplex& g1 = vm.levels[1];
    const PlanarComplex& g0 = vm.levels[0];
    int v1 = g1.vertex(vertex);
    std::vector<int> rot = g1.rotation()[v1];
    auto key = [&](int u) { return std::make_pair(g1.birth[u], g1.vertex_ids[u]); };
    auto start = std::min_element(rot.begin(), rot.end(), [&](int a, int b) { return key(a) < key(b); });
    std::rotate(rot.begin(), start, rot.end());

    InvariantCircleData icd;
    icd.vertex = vertex;
    icd.power = power;
    for (int u : rot) icd.neighbors.push_back(g1.vertex_ids[u]);
    const int r = static_cast<int>(icd.neighbors.size());
    const int pv = p.index(vertex);
    for (const auto& u : icd.neighbors) icd.points.push_back(p.tangency(pv, p.index(u)));

    std::vector<std::string> images;
    for (const auto& u : icd.neighbors) {
        std::string w = vm.iterate(u, power);
        auto it = std::find(icd.neighbors.begin(), icd.neighbors.end(), w);
        if (it == icd.neighbors.end()) throw MarkovError("image " + w + " of " + u + " is not a neighbor of " + vertex);
        icd.image.push_back(static_cast<int>(it - icd.neighbors.begin()));
        images.push_back(w);
    }

    std::vector<int> rot0 = g0.rotation()[g0.vertex(vertex)];
    const int d0 = static_cast<int>(rot0.size());
    auto pos0 = [&](const std::string& w) {
        for (int i = 0; i < d0; ++i)
            if (g0.vertex_ids[rot0[i]] == w) return i;
        throw MarkovError("image " + w + " is not a neighbor of " + vertex + " in G^0");
    };
    int total = 0;
    for (int i = 0; i < r; ++i) {
        int step = ((pos0(images[(i + 1) % r]) - pos0(images[i])) % d0 + d0) % d0;
        if (step == 1)
            ++total;
        else if (step == d0 - 1 && d0 > 2) {
            --total;
            icd.orientation_preserving = false;
        } else if (step != 0)
            throw MarkovError("image walk around " + vertex + " skips a neighbor");
    }
    if (total % d0 != 0) throw MarkovError("image walk around " + vertex + " does not close up");
    icd.degree = total / d0;
    return icd;
}

// ---- asymptotics ----

double fit_slope(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size() || x.size() < 2) throw MarkovError("slope fit needs two or more points");
    const double n = static_cast<double>(x.size());
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= n;
    my /= n;
    double sxy = 0, sxx = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxy += (x[i] - mx) * (y[i] - my);
        sxx += (x[i] - mx) * (x[i] - mx);
    }
    if (!(sxx > 0.0)) throw MarkovError("slope fit needs distinct abscissae");
    return sxy / sxx;
}

AsymptoticsFit fit_asymptotics(const std::vector<SpherePoint>& a_n, const SpherePoint& a, double window) {
    const int m = static_cast<int>(a_n.size());
    if (a.is_inf()) throw MarkovError("fixed point at infinity; renormalize first");
    for (const auto& q : a_n)
        if (q.is_inf()) throw MarkovError("sequence point at infinity; renormalize first");
    AsymptoticsFit fit;
    fit.lo = std::max(1, static_cast<int>(std::ceil(window * m)));
    fit.hi = m;
    if (m - fit.lo + 1 < 3 || m - fit.lo < 3)
        throw MarkovError("too few points for a fit: " + std::to_string(m));
    std::vector<double> xd, yd, xg, yg;
    for (int n = 1; n <= m; ++n) {
        AsymptoticsRow row;
        row.n = n;
        row.d = std::abs(a_n[n - 1].z - a.z);
        row.g = n < m ? std::abs(a_n[n - 1].z - a_n[n].z) : std::numeric_limits<double>::quiet_NaN();
        if (n >= fit.lo) {
            if (!(row.d > 0.0) || (n < m && !(row.g > 0.0))) throw MarkovError("repeated point at n=" + std::to_string(n));
            xd.push_back(std::log(static_cast<double>(n)));
            yd.push_back(std::log(row.d));
            if (n < m) {
                xg.push_back(0.5 * (std::log(static_cast<double>(n)) + std::log(static_cast<double>(n + 1))));
                yg.push_back(std::log(row.g));
            }
        }
        fit.rows.push_back(row);
    }
    fit.s_d = fit_slope(xd, yd);
    fit.s_g = fit_slope(xg, yg);
    return fit;
}

std::vector<SpherePoint> model_parabolic_sequence(int count) {
    std::vector<SpherePoint> out;
    for (int n = 1; n <= count; ++n) out.emplace_back(1.0 / n);
    return out;
}

std::string format_asymptotics(const AsymptoticsFit& fit) {
    std::ostringstream os;
    char buf[128];
    os << "n d_n g_n\n";
    for (const auto& r : fit.rows) {
        if (std::isnan(r.g))
            std::snprintf(buf, sizeof buf, "%d %.12g -\n", r.n, r.d);
        else
            std::snprintf(buf, sizeof buf, "%d %.12g %.12g\n", r.n, r.d, r.g);
        os << buf;
    }
    std::snprintf(buf, sizeof buf, "fit s_d=%.9f s_g=%.9f window=[%d,%d]\n", fit.s_d, fit.s_g, fit.lo, fit.hi);
    os << buf;
    return os.str();
}

std::vector<std::string> edge_face_sequence(const PlanarComplex& c, const std::string& v, const std::string& w) {
    const int vi = c.vertex(v), wi = c.vertex(w);
    std::map<int, std::string> by_depth;
    for (const Face* f : all_face_records(c)) {
        const int k = static_cast<int>(f->walk.size());
        for (int i = 0; i < k; ++i)
            if (f->walk[i] == vi && f->walk[(i + 1) % k] == wi) {
                int d = face_depth(f->id);
                if (by_depth.count(d)) throw MarkovError("two faces of depth " + std::to_string(d) + " on edge " + v + "-" + w);
                by_depth[d] = f->id;
            }
    }
    std::vector<std::string> out;
    for (int d = 0; by_depth.count(d); ++d) out.push_back(by_depth[d]);
    return out;
}

std::vector<std::string> approach_neighbors(const PlanarComplex& c, const std::string& v, const std::string& w) {
    const int vi = c.vertex(v);
    std::vector<std::string> out;
    for (const auto& id : edge_face_sequence(c, v, w)) {
        const Face& f = face_or_throw(c, id);
        const int k = static_cast<int>(f.walk.size());
        int i = static_cast<int>(std::find(f.walk.begin(), f.walk.end(), vi) - f.walk.begin());
        const std::string& u = c.vertex_ids[f.walk[(i + k - 1) % k]];
        if (out.empty() || out.back() != u) out.push_back(u);
    }
    return out;
}

PlanarComplex refine_along_edge(const PlanarComplex& complex, const SubdivisionRule& rule, const std::string& v,
                                const std::string& w, int count) {
    PlanarComplex c = complex;
    for (int guard = 0; guard < 64 * count + 64; ++guard) {
        if (static_cast<int>(approach_neighbors(c, v, w).size()) >= count) return c;
        auto seq = edge_face_sequence(c, v, w);
        if (seq.empty()) throw MarkovError("no face on the left of " + v + "-" + w);
        c = subdivide_faces(c, rule, {seq.back()});
    }
    throw MarkovError("refinement along " + v + "-" + w + " does not produce new neighbors");
}

AsymptoticsFit parabolic_asymptotics(const Packing& p, const PlanarComplex& complex, const InvariantCircleData& icd,
                                     const std::string& fixed_neighbor, int count, double window) {
    auto it = std::find(icd.neighbors.begin(), icd.neighbors.end(), fixed_neighbor);
    if (it == icd.neighbors.end()) throw MarkovError(fixed_neighbor + " is not a neighbor of " + icd.vertex);
    int j = static_cast<int>(it - icd.neighbors.begin());
    if (icd.image[j] != j) throw MarkovError("tangency of " + icd.vertex + " and " + fixed_neighbor + " is not fixed");
    auto nb = approach_neighbors(complex, icd.vertex, fixed_neighbor);
    if (static_cast<int>(nb.size()) < count)
        throw MarkovError("insufficient depth: " + std::to_string(nb.size()) + " approach points, need " +
                          std::to_string(count));
    const int pv = p.index(icd.vertex);
    SpherePoint a = p.tangency(pv, p.index(fixed_neighbor));
    std::vector<SpherePoint> a_n;
    for (int n = 0; n < count; ++n) a_n.push_back(p.tangency(pv, p.index(nb[n])));
    return fit_asymptotics(a_n, a, window);
}

std::string outer_away_from(const PlanarComplex& c, const std::vector<std::string>& avoid) {
    int oldest = *std::min_element(c.birth.begin(), c.birth.end());
    auto adj = c.adjacency();
    std::set<int> bad;
    for (const auto& a : avoid) bad.insert(c.vertex(a));
    std::string fallback;
    for (std::size_t v = 0; v < c.vertex_count(); ++v) {
        if (c.birth[v] != oldest || bad.count(static_cast<int>(v))) continue;
        bool touches = false;
        for (int u : adj[v]) touches = touches || bad.count(u);
        if (!touches) return c.vertex_ids[v];
        if (fallback.empty()) fallback = c.vertex_ids[v];
    }
    if (fallback.empty()) throw MarkovError("no level-0 vertex left for the outer circle");
    return fallback;
}

InvariantCircleRun invariant_circle_asymptotics(const SubdivisionRule& rule, const PlanarComplex& g0,
                                                const std::map<std::string, std::string>& base_map,
                                                const std::string& vertex, int power,
                                                const std::string& fixed_neighbor, int count, int uniform_level) {
    VertexMarkovMap vm = induce_vertex_markov(rule, g0, base_map, 2);
    if (!vm.valid()) throw MarkovError("vertex map breaks an edge: " + vm.violations.front());
    PlanarComplex c = iterate_subdivision(g0, rule, uniform_level);
    c = refine_along_edge(c, rule, vertex, fixed_neighbor, count + count / 2);
    PackOptions opt;
    opt.outer = outer_away_from(c, {vertex, fixed_neighbor});
    Packing p = pack_complex(c, opt);
    if (!p.converged) throw MarkovError("packing did not converge");
    InvariantCircleRun run;
    run.circle = markov_partition_on_circle(p, vm, vertex, power);
    run.fit = parabolic_asymptotics(p, c, run.circle, fixed_neighbor, count);
    run.vertices = c.vertex_count();
    run.tangency_residual = p.tangency_residual;
    return run;
}

// ---- periodic face sequences ----

std::string to_string(PeriodicType t) { return t == PeriodicType::parabolic ? "parabolic" : "hyperbolic"; }

std::vector<std::string> periodic_path(const std::string& face, const std::vector<int>& path, int length) {
    if (path.empty()) throw MarkovError("empty child path");
    std::vector<std::string> out{face};
    for (int k = 1; k < length; ++k) out.push_back(out.back() + "." + std::to_string(path[(k - 1) % path.size()]));
    return out;
}

PeriodicFaceSequence classify_periodic_faces(const PlanarComplex& c, const std::vector<std::string>& faces, int period) {
    if (period < 1) throw MarkovError("period must be positive");
    if (static_cast<int>(faces.size()) < period + 1) throw MarkovError("need at least period + 1 faces");
    std::vector<const Face*> rec;
    for (const auto& id : faces) rec.push_back(&face_or_throw(c, id));
    std::vector<std::string> child;
    for (std::size_t k = 0; k + 1 < faces.size(); ++k) {
        const std::string& a = faces[k];
        const std::string& b = faces[k + 1];
        if (b.size() <= a.size() + 1 || b.compare(0, a.size(), a) != 0 || b[a.size()] != '.' ||
            b.find('.', a.size() + 1) != std::string::npos)
            throw MarkovError(b + " is not a child of " + a);
        child.push_back(b.substr(a.size() + 1));
    }
    for (std::size_t k = 0; k + period < faces.size(); ++k) {
        if (rec[k]->type != rec[k + period]->type)
            throw MarkovError("sequence not periodic: types of " + faces[k] + " and " + faces[k + period] + " differ");
        if (k + period < child.size() && child[k] != child[k + period])
            throw MarkovError("sequence not periodic: " + faces[k + 1] + " and " + faces[k + period + 1] +
                              " sit in different cells");
    }
    PeriodicFaceSequence seq;
    seq.faces = faces;
    seq.period = period;
    std::set<int> f0(rec[0]->walk.begin(), rec[0]->walk.end());
    for (int v : rec[period]->walk)
        if (f0.count(v)) seq.shared.push_back(c.vertex_ids[v]);
    std::sort(seq.shared.begin(), seq.shared.end());
    seq.type = seq.shared.size() >= 2 ? PeriodicType::parabolic : PeriodicType::hyperbolic;
    return seq;
}

// ---- symmetries ----

SymmetryEstimate fit_symmetry(const Packing& p, const PlanarComplex& c, const SubdivisionRule& rule,
                              const std::vector<FacePiece>& pieces, double tolerance) {
    if (pieces.empty()) throw MarkovError("no face pieces to fit");
    const Face& src = face_or_throw(c, pieces[0].source);
    const Face& dst = face_or_throw(c, pieces[0].target);
    if (src.walk.size() != dst.walk.size() || src.walk.size() < 3)
        throw MarkovError("faces " + src.id + " and " + dst.id + " do not match");
    const MobiusMap frame = frame_of(face_tangencies(p, c, dst, 0));
    auto ts = face_tangencies(p, c, src, -pieces[0].offset);
    auto td = face_tangencies(p, c, dst, 0);

    SymmetryEstimate est;
    est.map = mobius_from_triples(ts[0], ts[1], ts[2], td[0], td[1], td[2]);
    est.tolerance = tolerance;
    est.level = c.level;
    est.kind = classify(est.map, tolerance);
    est.trace_defect = std::abs(est.map.trace_squared() - 4.0);

    std::vector<int> map;
    try {
        map = transport(rule, c, c, pieces);
    } catch (const ComplexError& e) {
        throw MarkovError(std::string("symmetry correspondence is ambiguous: ") + e.what());
    }
    const MobiusMap fm = frame * est.map;
    for (std::size_t v = 0; v < map.size(); ++v) {
        if (map[v] < 0) continue;
        const GenCircle& from = p.circle(c.vertex_ids[v]);
        const GenCircle& to = p.circle(c.vertex_ids[map[v]]);
        est.residual = std::max(est.residual, circle_mismatch(map_circle(fm, from), map_circle(frame, to)));
        ++est.pairs;
    }
    return est;
}

SymmetryEstimate estimate_mobius_symmetry(const Packing& p, const PlanarComplex& c, const SubdivisionRule& rule,
                                          const PeriodicFaceSequence& seq, double tolerance) {
    if (static_cast<int>(seq.faces.size()) <= seq.period) throw MarkovError("sequence shorter than its period");
    if (!c.face_record(seq.faces[seq.period]))
        throw MarkovError("depth insufficient: " + seq.faces[seq.period] + " not in the complex");
    return fit_symmetry(p, c, rule, {{seq.faces[seq.period], seq.faces[0], 0}}, tolerance);
}

// ---- contraction proxy ----

namespace {

struct SubPacking {
    std::set<std::string> vertices;
    std::set<std::pair<std::string, std::string>> edges;
};

SubPacking sub_packing(const PlanarComplex& c, const std::string& face) {
    SubPacking s;
    for (int fi : descendant_faces(c, face)) {
        const Face& f = c.faces[fi];
        const int k = static_cast<int>(f.walk.size());
        for (int i = 0; i < k; ++i) {
            std::string a = c.vertex_ids[f.walk[i]], b = c.vertex_ids[f.walk[(i + 1) % k]];
            s.vertices.insert(a);
            if (b < a) std::swap(a, b);
            s.edges.insert({a, b});
        }
    }
    return s;
}

}  // namespace

double contraction_proxy(const Packing& pa, const PlanarComplex& ca, const Packing& pb, const PlanarComplex& cb,
                         const std::string& face) {
    const Face& fa = face_or_throw(ca, face);
    const Face& fb = face_or_throw(cb, face);
    auto ids = [](const PlanarComplex& c, const Face& f) {
        std::vector<std::string> out;
        for (int v : f.walk) out.push_back(c.vertex_ids[v]);
        return out;
    };
    if (ids(ca, fa) != ids(cb, fb)) throw MarkovError("combinatorics mismatch: boundary of " + face + " differs");
    SubPacking sa = sub_packing(ca, face), sb = sub_packing(cb, face);
    if (sa.vertices != sb.vertices || sa.edges != sb.edges)
        throw MarkovError("combinatorics mismatch inside " + face);
    const MobiusMap na = frame_of(face_tangencies(pa, ca, fa, 0));
    const MobiusMap nb = frame_of(face_tangencies(pb, cb, fb, 0));
    double worst = 0.0;
    for (const auto& [u, v] : sa.edges) {
        SpherePoint ta = apply(na, pa.tangency(pa.index(u), pa.index(v)));
        SpherePoint tb = apply(nb, pb.tangency(pb.index(u), pb.index(v)));
        worst = std::max(worst, spherical_distance(ta, tb));
    }
    return worst;
}

ContractionFit contraction_fit(const Packing& pa, const PlanarComplex& ca, const Packing& pb, const PlanarComplex& cb,
                               const std::vector<std::string>& faces) {
    ContractionFit fit;
    std::vector<double> x, y;
    for (const auto& f : faces) {
        double v = contraction_proxy(pa, ca, pb, cb, f);
        fit.values.emplace_back(f, v);
        if (v > 0.0) {
            x.push_back(face_depth(f));
            y.push_back(std::log(v));
        }
    }
    if (x.size() < 2) throw MarkovError("contraction fit needs two faces with nonzero proxy");
    fit.slope = fit_slope(x, y);
    fit.ratio = std::exp(fit.slope);
    return fit;
}

}  // namespace gf
