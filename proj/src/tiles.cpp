#include "gasket_forge/tiles.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <set>
#include <sstream>

namespace gf {

namespace {

constexpr double kPi = 3.14159265358979323846;

using Vec3 = std::array<double, 3>;

double dot(const Vec3& a, const Vec3& b) { return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]; }

Vec3 cross(const Vec3& a, const Vec3& b) {
    return {a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]};
}

Vec3 unit(Vec3 v) {
    double n = std::sqrt(dot(v, v));
    return {v[0] / n, v[1] / n, v[2] / n};
}

double chord_to_angle(double chord) { return 2.0 * std::asin(std::min(1.0, 0.5 * chord)); }

double vec_distance(const Vec3& a, const Vec3& b) {
    Vec3 d{a[0] - b[0], a[1] - b[1], a[2] - b[2]};
    return chord_to_angle(std::sqrt(dot(d, d)));
}

MobiusMap conj_coeffs(const MobiusMap& m) { return {std::conj(m.a), std::conj(m.b), std::conj(m.c), std::conj(m.d)}; }

// Deterministic orthonormal frame perpendicular to c.
std::pair<Vec3, Vec3> frame_about(const Vec3& c) {
    Vec3 helper = std::abs(c[2]) < 0.9 ? Vec3{0, 0, 1} : Vec3{1, 0, 0};
    Vec3 e1 = unit(cross(helper, c));
    Vec3 e2 = cross(c, e1);
    return {e1, e2};
}

const Face& face_by_id(const PlanarComplex& c, const std::string& id) {
    const Face* f = c.face_record(id);
    if (!f) throw ComplexError("unknown face " + id);
    return *f;
}

}  // namespace

// ---- chains ----

SpherePoint FaceChain::corner(std::size_t i) const {
    return tangency_point(circles[i], circles[(i + 1) % circles.size()]);
}

FaceChain make_chain(const std::vector<GenCircle>& circles, double tol, const std::string& name) {
    const std::size_t r = circles.size();
    if (r < 3) throw ChainError("a chain needs at least three circles");
    FaceChain ch;
    ch.face = name;
    ch.circles = circles;
    for (std::size_t i = 0; i < r; ++i) ch.vertices.push_back(std::to_string(i));
    for (std::size_t i = 0; i < r; ++i) {
        double e = tangency_error(circles[i], circles[(i + 1) % r]);
        ch.tangency_error = std::max(ch.tangency_error, e);
        if (e > tol) throw ChainError("consecutive circles " + std::to_string(i) + " and " + std::to_string((i + 1) % r) +
                                      " are not tangent");
    }
    for (std::size_t i = 0; i < r; ++i)
        for (std::size_t j = i + 2; j < r; ++j) {
            if (i == 0 && j == r - 1) continue;
            if (inversive_product(circles[i], circles[j]) < 1.0 + tol)
                throw ChainError("non-consecutive circles " + std::to_string(i) + " and " + std::to_string(j) +
                                 " touch or overlap");
        }
    return ch;
}

FaceChain boundary_chain(const Packing& p, const PlanarComplex& complex, const std::string& face, double tol) {
    const Face& f = face_by_id(complex, face);
    if (f.external) throw ChainError("external face " + face + " has no tile");
    std::vector<GenCircle> circles;
    std::vector<std::string> ids;
    for (int v : f.walk) {
        ids.push_back(complex.vertex_ids[v]);
        circles.push_back(p.circle(ids.back()));
    }
    FaceChain ch = make_chain(circles, tol, face);
    ch.vertices = ids;
    return ch;
}

// ---- reflections ----

Isometry compose(const Isometry& a, const Isometry& b) {
    Isometry out;
    out.m = (a.m * (a.anti ? conj_coeffs(b.m) : b.m)).normalized();
    out.anti = a.anti != b.anti;
    return out;
}

Isometry reflection_isometry(const GenCircle& mirror) { return {Reflection{mirror}.as_anti().m.normalized(), true}; }

SpherePoint apply(const Isometry& g, const SpherePoint& p) { return g.anti ? apply(AntiMobius{g.m}, p) : apply(g.m, p); }

GenCircle map_circle(const Isometry& g, const GenCircle& c) {
    return g.anti ? map_circle(AntiMobius{g.m}, c) : map_circle(g.m, c);
}

std::vector<std::vector<int>> admissible_words(int r, int length) {
    std::vector<std::vector<int>> out;
    if (length == 0) {
        out.push_back({});
        return out;
    }
    std::vector<int> w;
    auto rec = [&](auto&& self) -> void {
        if (static_cast<int>(w.size()) == length) {
            out.push_back(w);
            return;
        }
        for (int i = 0; i < r; ++i) {
            if (!w.empty() && w.back() == i) continue;
            w.push_back(i);
            self(self);
            w.pop_back();
        }
    };
    rec(rec);
    return out;
}

long admissible_word_count(int r, int length) {
    if (length == 0) return 1;
    long n = r;
    for (int i = 1; i < length; ++i) n *= r - 1;
    return n;
}

long tile_sample_count(int r, int depth) {
    long n = r;
    for (int l = 1; l <= depth; ++l) n += admissible_word_count(r, l) * (r - 2);
    return n;
}

namespace {

// Depth-first walk over admissible words, calling visit(word, g_word) in lexicographic order.
template <class Visit>
void walk_words(const FaceChain& ch, int depth, Visit visit) {
    const int r = static_cast<int>(ch.size());
    std::vector<Isometry> gens;
    for (const auto& c : ch.circles) gens.push_back(reflection_isometry(c));
    std::vector<int> word;
    auto rec = [&](auto&& self, const Isometry& g) -> void {
        visit(word, g);
        if (static_cast<int>(word.size()) == depth) return;
        for (int i = 0; i < r; ++i) {
            if (!word.empty() && word.back() == i) continue;
            word.push_back(i);
            self(self, compose(g, gens[i]));
            word.pop_back();
        }
    };
    rec(rec, Isometry{});
}

}  // namespace

std::vector<SpherePoint> tile_boundary_samples(const FaceChain& ch, int depth) {
    if (depth < 0) throw std::invalid_argument("depth must be nonnegative");
    const int r = static_cast<int>(ch.size());
    std::vector<SpherePoint> corners;
    for (int i = 0; i < r; ++i) corners.push_back(ch.corner(i));
    std::vector<SpherePoint> out;
    out.reserve(tile_sample_count(r, depth));
    walk_words(ch, depth, [&](const std::vector<int>& w, const Isometry& g) {
        if (w.empty()) {
            out.insert(out.end(), corners.begin(), corners.end());
            return;
        }
        int last = w.back();
        for (int j = 0; j < r; ++j) {
            // corner j lies on circles j and j+1
            if (j == last || (j + 1) % r == last) continue;
            out.push_back(apply(g, corners[j]));
        }
    });
    return out;
}

std::vector<SpherePoint> alternating_limit_points(const FaceChain& ch) {
    const int r = static_cast<int>(ch.size());
    std::vector<SpherePoint> out;
    for (int i = 0; i < r; ++i)
        for (int j = i + 2; j < r; ++j) {
            if (i == 0 && j == r - 1) continue;
            MobiusMap h = compose(reflection_isometry(ch.circles[i]), reflection_isometry(ch.circles[j])).m;
            // Fixed points of h: c z^2 + (d - a) z - b = 0.
            if (std::abs(h.c) < 1e-14 * (std::abs(h.a) + std::abs(h.d))) {
                out.push_back(SpherePoint::infinity());
                out.push_back(SpherePoint(h.b / (h.d - h.a)));
                continue;
            }
            cplx disc = std::sqrt((h.d - h.a) * (h.d - h.a) + 4.0 * h.b * h.c);
            out.push_back(SpherePoint((h.a - h.d + disc) / (2.0 * h.c)));
            out.push_back(SpherePoint((h.a - h.d - disc) / (2.0 * h.c)));
        }
    return out;
}

std::vector<GenCircle> nested_disks(const FaceChain& ch, int depth) {
    if (depth < 0) throw std::invalid_argument("depth must be nonnegative");
    if (depth == 0) return ch.circles;
    std::vector<GenCircle> out;
    walk_words(ch, depth - 1, [&](const std::vector<int>& w, const Isometry& g) {
        if (static_cast<int>(w.size()) != depth - 1) return;
        for (int i = 0; i < static_cast<int>(ch.size()); ++i) {
            if (!w.empty() && w.back() == i) continue;
            out.push_back(map_circle(g, ch.circles[i]));
        }
    });
    return out;
}

double point_diameter(const std::vector<SpherePoint>& pts) {
    std::vector<Vec3> v;
    v.reserve(pts.size());
    for (const auto& p : pts) v.push_back(to_sphere(p));
    double best = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i)
        for (std::size_t j = i + 1; j < v.size(); ++j) best = std::max(best, vec_distance(v[i], v[j]));
    return best;
}

double cap_union_diameter(const std::vector<GenCircle>& disks) {
    std::vector<Cap> caps;
    caps.reserve(disks.size());
    for (const auto& d : disks) caps.push_back(to_cap(d));
    double best = 0.0;
    for (std::size_t i = 0; i < caps.size(); ++i) {
        best = std::max(best, std::min(kPi, 2.0 * caps[i].radius));
        for (std::size_t j = i + 1; j < caps.size(); ++j)
            best = std::max(best, std::min(kPi, vec_distance(caps[i].center, caps[j].center) + caps[i].radius +
                                                    caps[j].radius));
    }
    return best;
}

DiameterEstimate tile_diameter(const FaceChain& ch, int depth) {
    DiameterEstimate d;
    d.lower = point_diameter(tile_boundary_samples(ch, depth));
    d.upper = cap_union_diameter(nested_disks(ch, depth));
    return d;
}

// ---- tiles ----

MarkovTile make_tile(const Packing& p, const PlanarComplex& complex, const std::string& face, int level, int depth) {
    MarkovTile t;
    t.face = face;
    t.level = level;
    t.depth = depth;
    t.chain = boundary_chain(p, complex, face);
    t.samples = tile_boundary_samples(t.chain, depth);
    auto lim = alternating_limit_points(t.chain);
    t.samples.insert(t.samples.end(), lim.begin(), lim.end());
    t.diameter.lower = point_diameter(t.samples);
    t.diameter.upper = cap_union_diameter(nested_disks(t.chain, depth));
    return t;
}

std::vector<std::string> faces_at_level(const PlanarComplex& c, int n) {
    if (n > c.level) throw ComplexError("complex is only at level " + std::to_string(c.level));
    std::vector<std::string> out;
    for (const auto& [id, f] : c.ancestors)
        if (f.depth == n && !f.external) out.push_back(id);
    for (const auto& f : c.faces)
        if (f.depth == n && !f.external) out.push_back(f.id);
    std::sort(out.begin(), out.end());
    return out;
}

std::vector<MarkovTile> tiles_at_level(const Packing& p, const PlanarComplex& c, int n, int depth) {
    std::vector<MarkovTile> out;
    for (const auto& id : faces_at_level(c, n)) out.push_back(make_tile(p, c, id, n, depth));
    return out;
}

double max_upper_diameter(const std::vector<MarkovTile>& tiles) {
    double m = 0.0;
    for (const auto& t : tiles) m = std::max(m, t.diameter.upper);
    return m;
}

std::string to_string(SharedBoundary s) {
    switch (s) {
        case SharedBoundary::none: return "none";
        case SharedBoundary::vertex: return "vertex";
        case SharedBoundary::edge: return "edge";
        case SharedBoundary::two_nonadjacent: return "two-nonadjacent-vertices";
        case SharedBoundary::many: return "three-or-more-vertices";
    }
    return "?";
}

SharedBoundary shared_boundary(const PlanarComplex& c, const std::string& fa, const std::string& fb) {
    const Face& a = face_by_id(c, fa);
    const Face& b = face_by_id(c, fb);
    std::set<int> va(a.walk.begin(), a.walk.end());
    std::vector<int> common;
    for (int v : b.walk)
        if (va.count(v)) common.push_back(v);
    if (common.size() <= 1) return common.empty() ? SharedBoundary::none : SharedBoundary::vertex;
    if (common.size() >= 3) return SharedBoundary::many;
    auto consecutive = [](const Face& f, int u, int v) {
        const std::size_t k = f.walk.size();
        for (std::size_t i = 0; i < k; ++i) {
            int x = f.walk[i], y = f.walk[(i + 1) % k];
            if ((x == u && y == v) || (x == v && y == u)) return true;
        }
        return false;
    };
    bool edge = consecutive(a, common[0], common[1]) && consecutive(b, common[0], common[1]);
    return edge ? SharedBoundary::edge : SharedBoundary::two_nonadjacent;
}

int expected_common_points(SharedBoundary s) {
    switch (s) {
        case SharedBoundary::none:
        case SharedBoundary::vertex: return 0;
        case SharedBoundary::edge: return 1;
        case SharedBoundary::two_nonadjacent: return 2;
        case SharedBoundary::many: return -1;
    }
    return 0;
}

IntersectionVerdict intersection_pattern(const MarkovTile& a, const MarkovTile& b, SharedBoundary shared, double tol) {
    IntersectionVerdict v;
    v.shared = shared;
    std::vector<Vec3> pa, pb;
    for (const auto& p : a.samples) pa.push_back(to_sphere(p));
    for (const auto& p : b.samples) pb.push_back(to_sphere(p));
    // Cluster A's samples so repeated images of one point count once.
    std::vector<int> cluster(pa.size(), -1);
    int clusters = 0;
    for (std::size_t i = 0; i < pa.size(); ++i) {
        if (cluster[i] >= 0) continue;
        cluster[i] = clusters;
        for (std::size_t j = i + 1; j < pa.size(); ++j)
            if (cluster[j] < 0 && vec_distance(pa[i], pa[j]) <= tol) cluster[j] = clusters;
        ++clusters;
    }
    std::vector<bool> hit(clusters, false);
    for (std::size_t i = 0; i < pa.size(); ++i) {
        if (hit[cluster[i]]) continue;
        for (const auto& q : pb)
            if (vec_distance(pa[i], q) <= tol) {
                hit[cluster[i]] = true;
                break;
            }
    }
    v.common = static_cast<int>(std::count(hit.begin(), hit.end(), true));
    int want = expected_common_points(shared);
    v.matches = want < 0 ? v.common > 2 : v.common == want;
    return v;
}

// ---- tangency density ----

TangencySet tangency_points(const Packing& p) {
    TangencySet ts;
    for (auto [u, v] : p.edges) {
        std::string a = p.ids[u], b = p.ids[v];
        if (b < a) std::swap(a, b);
        ts[{a, b}] = p.tangency(u, v);
    }
    return ts;
}

double density_gap(const Packing& p, const TangencySet& ts, const std::string& vertex, double from, double to) {
    Cap cap = to_cap(p.circle(vertex));
    auto [e1, e2] = frame_about(cap.center);
    const double two_pi = 2.0 * kPi;
    auto wrap = [&](double a) {
        a = std::fmod(a, two_pi);
        return a < 0 ? a + two_pi : a;
    };
    const bool full = from == to;
    const double span = full ? two_pi : wrap(to - from);
    std::vector<double> angles;
    for (const auto& [key, pt] : ts) {
        if (key.first != vertex && key.second != vertex) continue;
        Vec3 x = to_sphere(pt);
        double a = wrap(std::atan2(dot(x, e2), dot(x, e1)) - from);
        if (full || a <= span) angles.push_back(a);
    }
    if (angles.size() < 2) return full ? two_pi : span;
    std::sort(angles.begin(), angles.end());
    double gap = 0.0;
    for (std::size_t i = 0; i + 1 < angles.size(); ++i) gap = std::max(gap, angles[i + 1] - angles[i]);
    if (full) gap = std::max(gap, angles.front() + two_pi - angles.back());
    return gap;
}

// ---- eccentricity ----

double eccentricity(const std::vector<SpherePoint>& boundary) {
    if (boundary.empty()) throw std::invalid_argument("eccentricity of an empty sample");
    std::vector<Vec3> pts;
    for (const auto& b : boundary) pts.push_back(to_sphere(b));
    auto ratio = [&](const Vec3& c) {
        double lo = kPi, hi = 0.0;
        for (const auto& q : pts) {
            double d = vec_distance(c, q);
            lo = std::min(lo, d);
            hi = std::max(hi, d);
        }
        return lo > 0.0 ? hi / lo : std::numeric_limits<double>::infinity();
    };
    // The center has to be surrounded by the samples: seen from c, their directions leave no gap of
    // half a turn or more. Without this the ratio tends to 1 as c runs off the tile.
    auto surrounded = [&](const Vec3& c) {
        auto [e1, e2] = frame_about(c);
        std::vector<double> ang;
        ang.reserve(pts.size());
        for (const auto& q : pts) ang.push_back(std::atan2(dot(q, e2), dot(q, e1)));
        std::sort(ang.begin(), ang.end());
        double gap = ang.front() + 2.0 * kPi - ang.back();
        for (std::size_t i = 1; i < ang.size(); ++i) gap = std::max(gap, ang[i] - ang[i - 1]);
        return gap < kPi;
    };
    Vec3 centroid{0, 0, 0};
    for (const auto& q : pts)
        for (int k = 0; k < 3; ++k) centroid[k] += q[k];
    if (dot(centroid, centroid) < 1e-24) centroid = pts.front();
    centroid = unit(centroid);

    std::vector<Vec3> starts{centroid};
    const std::size_t stride = std::max<std::size_t>(1, pts.size() / 8);
    for (std::size_t i = 0; i < pts.size(); i += stride) {
        Vec3 mid{0.5 * (centroid[0] + pts[i][0]), 0.5 * (centroid[1] + pts[i][1]), 0.5 * (centroid[2] + pts[i][2])};
        if (dot(mid, mid) > 1e-24) starts.push_back(unit(mid));
    }
    double best = std::numeric_limits<double>::infinity();
    for (Vec3 c : starts) {
        if (!surrounded(c)) continue;
        double val = ratio(c);
        double step = 0.25;
        for (int guard = 0; guard < 4000 && step > 1e-12; ++guard) {
            auto [e1, e2] = frame_about(c);
            bool moved = false;
            for (int dir = 0; dir < 8 && !moved; ++dir) {
                double ang = dir * kPi / 4.0;
                double dx = std::cos(ang) * step, dy = std::sin(ang) * step;
                Vec3 trial = unit({c[0] + dx * e1[0] + dy * e2[0], c[1] + dx * e1[1] + dy * e2[1],
                                   c[2] + dx * e1[2] + dy * e2[2]});
                double tv = ratio(trial);
                if (tv < val && surrounded(trial)) {
                    val = tv;
                    c = trial;
                    moved = true;
                }
            }
            if (!moved) step *= 0.5;
        }
        best = std::min(best, val);
    }
    return std::max(1.0, best);
}

QuasiroundnessReport quasiroundness_report(const Packing& p, const PlanarComplex& c, int n, int depth) {
    QuasiroundnessReport r;
    r.level = n;
    double sum = 0.0;
    for (const auto& id : faces_at_level(c, n)) {
        FaceChain ch = boundary_chain(p, c, id);
        double e = eccentricity(tile_boundary_samples(ch, depth));
        r.per_face.emplace_back(id, e);
        r.max = std::max(r.max, e);
        sum += e;
    }
    if (!r.per_face.empty()) r.mean = sum / static_cast<double>(r.per_face.size());
    return r;
}

// ---- point clouds ----

PointCloud limit_set_cloud(const Packing& p, const PlanarComplex& c, int n, int depth, int samples_per_circle) {
    PointCloud cloud;
    cloud.level = n;
    cloud.depth = depth;
    auto push = [&](const SpherePoint& q) {
        if (q.is_inf() || !std::isfinite(q.z.real()) || !std::isfinite(q.z.imag()))
            ++cloud.dropped_at_infinity;
        else
            cloud.points.push_back(q.z);
    };
    for (const auto& circle : p.circles)
        for (int k = 0; k < samples_per_circle; ++k)
            push(circle.point_at((k + 0.5) / samples_per_circle));
    if (depth >= 1)
        for (const auto& id : faces_at_level(c, n))
            for (const auto& q : tile_boundary_samples(boundary_chain(p, c, id), depth)) push(q);
    return cloud;
}

std::string format_cloud(const PointCloud& cloud) {
    std::ostringstream os;
    os << "cloud level=" << cloud.level << " depth=" << cloud.depth << "\n";
    char buf[96];
    for (const auto& z : cloud.points) {
        std::snprintf(buf, sizeof buf, "pt %.17g %.17g\n", z.real(), z.imag());
        os << buf;
    }
    return os.str();
}

PointCloud parse_cloud(const std::string& text) {
    PointCloud cloud;
    std::istringstream in(text);
    std::string line;
    int number = 0;
    bool header = false;
    while (std::getline(in, line)) {
        ++number;
        std::istringstream ls(line);
        std::string kw;
        if (!(ls >> kw) || kw[0] == '#') continue;
        if (kw == "cloud") {
            header = true;
            for (std::string tok; ls >> tok;) {
                if (tok.rfind("level=", 0) == 0) cloud.level = std::stoi(tok.substr(6));
                if (tok.rfind("depth=", 0) == 0) cloud.depth = std::stoi(tok.substr(6));
            }
        } else if (kw == "pt") {
            double x, y;
            if (!(ls >> x >> y)) throw std::invalid_argument("line " + std::to_string(number) + ": bad point");
            cloud.points.emplace_back(x, y);
        } else {
            throw std::invalid_argument("line " + std::to_string(number) + ": unrecognized record " + kw);
        }
    }
    if (!header) throw std::invalid_argument("missing cloud header");
    return cloud;
}

}  // namespace gf
