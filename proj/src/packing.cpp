#include "gasket_forge/packing.hpp"

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <Eigen/SparseLU>
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <queue>
#include <limits>
#include <map>
#include <set>
#include <sstream>

namespace gf {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kInf = std::numeric_limits<double>::infinity();

// ln of sin(a/2)-factor R(v, u) = e^{-v} (1 - e^{-2u}) / (1 - e^{-2(v+u)}) and its partials.
struct Ratio {
    double log_r, d_v, d_u;
};

Ratio ratio(double v, double u) {
    if (std::isinf(u)) return {-v, -1.0, 0.0};
    double w = v + u;
    double log_r = -v + std::log(-std::expm1(-2.0 * u)) - std::log(-std::expm1(-2.0 * w));
    double inv_w = 2.0 / std::expm1(2.0 * w);
    return {log_r, -1.0 - inv_w, 2.0 / std::expm1(2.0 * u) - inv_w};
}

// Angle at v of the hyperbolic triangle of circles (v, u, w), with partials in h.
struct Angle {
    double alpha, d_v, d_u, d_w;
};

Angle angle_at(double hv, double hu, double hw) {
    Ratio a = ratio(hv, hu), b = ratio(hv, hw);
    double x = std::exp(a.log_r + b.log_r);
    x = std::min(x, 1.0);
    double alpha = 2.0 * std::atan2(std::sqrt(x), std::sqrt(1.0 - x));
    double t = std::tan(0.5 * alpha);
    return {alpha, t * (a.d_v + b.d_v), t * a.d_u, t * b.d_u};
}

struct Petal {
    int u, w;  // counterclockwise around the center
};

struct Problem {
    std::vector<int> interior;          // vertices with a radius variable
    std::vector<int> slot;              // vertex -> index in interior or -1
    std::vector<std::vector<Petal>> petals;
    std::vector<double> h;              // hyperbolic radii; +inf on the horocycle boundary
};

double angle_sum(const Problem& P, int v) {
    double s = 0.0;
    for (const auto& pt : P.petals[v]) s += angle_at(P.h[v], P.h[pt.u], P.h[pt.w]).alpha;
    return s;
}

double max_defect(const Problem& P) {
    double m = 0.0;
    for (int v : P.interior) m = std::max(m, std::abs(angle_sum(P, v) - 2.0 * kPi));
    return m;
}

// One Gauss-Seidel sweep of the uniform-neighbor update.
void sweep(Problem& P, double damping) {
    for (int v : P.interior) {
        const double k = static_cast<double>(P.petals[v].size());
        double theta = angle_sum(P, v);
        double beta = std::sin(theta / (2.0 * k));
        double p = std::exp(-P.h[v]);
        // Squared s-label of the equal neighbors reproducing theta.
        double t = (p - beta) / (p * (1.0 - beta * p));
        t = std::clamp(t, 0.0, 1.0 - 1e-15);
        double delta = std::sin(kPi / k);
        double pn = 2.0 * delta / ((1.0 - t) + std::sqrt((1.0 - t) * (1.0 - t) + 4.0 * delta * delta * t));
        double hn = -std::log(pn);
        if (!(hn > 0.0) || !std::isfinite(hn)) continue;
        P.h[v] += damping * (hn - P.h[v]);
    }
}

// Newton iteration on y = log h; returns the final max defect.
double newton(Problem& P, double target, int max_steps) {
    const int n = static_cast<int>(P.interior.size());
    if (n == 0) return 0.0;
    auto residual = [&](Eigen::VectorXd& F) {
        F.resize(n);
        for (int i = 0; i < n; ++i) F[i] = angle_sum(P, P.interior[i]) - 2.0 * kPi;
        return F.cwiseAbs().maxCoeff();
    };
    Eigen::VectorXd F;
    double cur = residual(F);
    for (int step = 0; step < max_steps && cur > target; ++step) {
        std::vector<Eigen::Triplet<double>> trip;
        for (int i = 0; i < n; ++i) {
            int v = P.interior[i];
            double diag = 0.0;
            for (const auto& pt : P.petals[v]) {
                Angle a = angle_at(P.h[v], P.h[pt.u], P.h[pt.w]);
                diag += a.d_v * P.h[v];
                if (P.slot[pt.u] >= 0) trip.emplace_back(i, P.slot[pt.u], a.d_u * P.h[pt.u]);
                if (P.slot[pt.w] >= 0) trip.emplace_back(i, P.slot[pt.w], a.d_w * P.h[pt.w]);
            }
            trip.emplace_back(i, i, diag);
        }
        Eigen::SparseMatrix<double> J(n, n);
        J.setFromTriplets(trip.begin(), trip.end());
        Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
        lu.compute(J);
        if (lu.info() != Eigen::Success) break;
        Eigen::VectorXd dy = lu.solve(-F);
        if (lu.info() != Eigen::Success || !dy.allFinite()) break;
        std::vector<double> saved = P.h;
        double t = 1.0;
        bool improved = false;
        for (int ls = 0; ls < 40; ++ls, t *= 0.5) {
            for (int i = 0; i < n; ++i) P.h[P.interior[i]] = saved[P.interior[i]] * std::exp(t * dy[i]);
            Eigen::VectorXd Fn;
            double next = residual(Fn);
            if (next < cur) {
                F = Fn;
                cur = next;
                improved = true;
                break;
            }
        }
        if (!improved) {
            P.h = saved;
            break;
        }
    }
    return cur;
}

// Euclidean circle inside the unit disk from a hyperbolic circle of radius h centred at 0.
double euclid_radius(double h) { return std::tanh(0.5 * h); }

// Gauss-Newton sweeps on (center, radius) of each bounded disk against all of its neighbors.
// Layout places every circle from just two others, so small errors pile up along long chains;
// this spreads them back out. Lines only slide along their normal, unbounded disks stay fixed.
void polish_layout(std::vector<GenCircle>& circles, const std::vector<std::vector<int>>& nbrs, int sweeps) {
    const int nv = static_cast<int>(circles.size());
    for (int sweep = 0; sweep < sweeps; ++sweep)
        for (int v = 0; v < nv; ++v) {
            if (circles[v].is_line()) {
                GenCircle& l = circles[v];
                double num = 0.0, den = 0.0;
                for (int u : nbrs[v]) {
                    const GenCircle& o = circles[u];
                    if (o.is_line() || o.radius <= 0.0) continue;
                    double res = std::real((o.center - l.anchor) * std::conj(l.normal)) - o.radius;
                    double w = 1.0 / (o.radius * o.radius);
                    num += w * res;
                    den += w;
                }
                if (den > 0.0) l.anchor += (num / den) * l.normal;
                continue;
            }
            if (circles[v].radius <= 0.0) continue;
            cplx c = circles[v].center;
            double r = circles[v].radius;
            for (int step = 0; step < 2; ++step) {
                Eigen::Matrix3d A = Eigen::Matrix3d::Zero();
                Eigen::Vector3d g = Eigen::Vector3d::Zero();
                for (int u : nbrs[v]) {
                    const GenCircle& o = circles[u];
                    double res, scale = r;
                    Eigen::Vector3d J;
                    if (o.is_line()) {
                        res = std::real((c - o.anchor) * std::conj(o.normal)) - r;
                        J << o.normal.real(), o.normal.imag(), -1.0;
                    } else {
                        cplx d = c - o.center;
                        double dist = std::abs(d);
                        if (!(dist > 0.0)) continue;
                        cplx dir = d / dist;
                        scale = std::max(r, o.abs_radius());
                        if (o.radius < 0) {
                            res = dist + r - o.abs_radius();
                            J << dir.real(), dir.imag(), 1.0;
                        } else {
                            res = dist - r - o.radius;
                            J << dir.real(), dir.imag(), -1.0;
                        }
                    }
                    double w = 1.0 / (scale * scale);
                    A += w * J * J.transpose();
                    g += w * res * J;
                }
                Eigen::Vector3d dx = A.ldlt().solve(-g);
                if (!dx.allFinite()) break;
                c += cplx(dx[0], dx[1]);
                r += dx[2];
            }
            if (r > 0.0 && std::isfinite(r) && std::isfinite(c.real()) && std::isfinite(c.imag()))
                circles[v] = GenCircle::circle(c, r);
        }
}

// Keeps the polished circles only when they improve the worst tangency.
void polish_packing(Packing& p, int sweeps) {
    std::vector<std::vector<int>> nbrs(p.circles.size());
    for (auto [u, v] : p.edges) {
        nbrs[u].push_back(v);
        nbrs[v].push_back(u);
    }
    std::vector<GenCircle> trial = p.circles;
    polish_layout(trial, nbrs, sweeps);
    std::swap(trial, p.circles);
    double err = max_tangency_error(p);
    if (err < p.tangency_residual)
        p.tangency_residual = err;
    else
        std::swap(trial, p.circles);
}

// Third circle tangent to a and b, with <w, U> = target against the outside of the unit circle,
// placed so that (a, b, w) runs counterclockwise.
GenCircle third_circle(const GenCircle& a, const GenCircle& b, double target) {
    // Work in the frame where b is the unit circle at the origin.
    const cplx t = b.center;
    const double s = b.radius;
    auto frame = [&](const GenCircle& g) {
        Inversive in = to_inversive(g);
        Inversive out;
        out.b = s * in.b;
        cplx bz(in.bx, in.by);
        cplx bzn = bz - t * in.b;
        out.bx = bzn.real();
        out.by = bzn.imag();
        out.bb = (in.bb - 2.0 * std::real(std::conj(t) * bz) + std::norm(t) * in.b) / s;
        return out;
    };
    Inversive ia = frame(a);
    Inversive ib;
    ib.b = 1.0;
    ib.bb = -1.0;
    Inversive iu;
    iu.b = -s;
    iu.bx = t.real();
    iu.by = t.imag();
    double mt = std::abs(t);
    iu.bb = (1.0 - mt) * (1.0 + mt) / s;

    Eigen::Matrix<double, 3, 4> M;
    Eigen::Vector3d rhs(1.0, 1.0, target);
    const Inversive* rows[3] = {&ia, &ib, &iu};
    for (int r = 0; r < 3; ++r) M.row(r) << 0.5 * rows[r]->bb, 0.5 * rows[r]->b, -rows[r]->bx, -rows[r]->by;
    Eigen::JacobiSVD<Eigen::Matrix<double, 3, 4>> svd(M, Eigen::ComputeFullU | Eigen::ComputeFullV);
    Eigen::Vector4d w0 = svd.solve(rhs);
    Eigen::Vector4d nv = svd.matrixV().col(3);
    auto form = [](const Eigen::Vector4d& x, const Eigen::Vector4d& y) {
        return 0.5 * (x[0] * y[1] + x[1] * y[0]) - x[2] * y[2] - x[3] * y[3];
    };
    double qa = form(nv, nv), qb = form(w0, nv), qc = form(w0, w0) + 1.0;
    double disc = std::max(0.0, qb * qb - qa * qc);
    double roots[2];
    if (std::abs(qa) < 1e-300) {
        roots[0] = roots[1] = -qc / (2.0 * qb);
    } else {
        double sq = std::sqrt(disc);
        double q = -(qb + std::copysign(sq, qb));
        roots[0] = q / qa;
        roots[1] = q != 0.0 ? qc / q : roots[0];
    }
    cplx ca = (a.center - t) / s;
    GenCircle best;
    double best_score = -kInf;
    for (double lam : roots) {
        Eigen::Vector4d w = w0 + lam * nv;
        if (!(w[0] > 0.0)) continue;
        cplx cw = cplx(w[2], w[3]) / w[0];
        // Orientation of centers (a, b, w) with b at the origin.
        double cross = std::imag(std::conj(-ca) * (cw - ca));
        if (cross > best_score) {
            best_score = cross;
            best.kind = GenCircle::Kind::proper;
            best.center = t + s * cw;
            best.radius = s / w[0];
        }
    }
    if (best_score == -kInf) throw SolverError("layout failed: no bounded third circle");
    return best;
}

std::string edge_key_ids(const std::string& a, const std::string& b) { return a < b ? a + "|" + b : b + "|" + a; }

}  // namespace

// ---- triangulation ----

Triangulation star_triangulate(const PlanarComplex& c) {
    Triangulation t;
    t.ids = c.vertex_ids;
    t.original_count = static_cast<int>(c.vertex_count());
    t.helper.assign(c.vertex_count(), false);
    t.origin_face.assign(c.vertex_count(), -1);
    for (std::size_t fi = 0; fi < c.faces.size(); ++fi) {
        const auto& f = c.faces[fi];
        if (f.external) {
            t.boundary = f.walk;
            continue;
        }
        std::set<int> distinct(f.walk.begin(), f.walk.end());
        if (distinct.size() != f.walk.size() || f.walk.size() < 3)
            throw SolverError("face " + f.id + " has a non-simple boundary walk");
        const int k = static_cast<int>(f.walk.size());
        if (k == 3) {
            t.triangles.push_back({f.walk[0], f.walk[1], f.walk[2]});
            continue;
        }
        int h = static_cast<int>(t.ids.size());
        t.ids.push_back("*" + f.id);
        t.helper.push_back(true);
        t.origin_face.push_back(static_cast<int>(fi));
        for (int i = 0; i < k; ++i) t.triangles.push_back({f.walk[i], f.walk[(i + 1) % k], h});
    }
    return t;
}

// ---- packing helpers ----

int Packing::find(const std::string& id) const {
    for (std::size_t i = 0; i < ids.size(); ++i)
        if (ids[i] == id) return static_cast<int>(i);
    return -1;
}

int Packing::index(const std::string& id) const {
    int i = find(id);
    if (i < 0) throw SolverError("packing has no circle for " + id);
    return i;
}

double tangency_error(const GenCircle& a, const GenCircle& b) {
    if (a.is_line() && b.is_line()) return std::abs(std::imag(a.normal * std::conj(b.normal)));
    if (a.is_line() || b.is_line()) {
        const GenCircle& l = a.is_line() ? a : b;
        const GenCircle& c = a.is_line() ? b : a;
        double dist = std::abs(std::real((c.center - l.anchor) * std::conj(l.normal)));
        return std::abs(dist - c.abs_radius()) / c.abs_radius();
    }
    double d = std::abs(a.center - b.center);
    double ra = a.abs_radius(), rb = b.abs_radius();
    double gap;
    if (a.radius < 0 || b.radius < 0)
        gap = std::abs(std::abs(ra - rb) - d);  // internal tangency
    else
        gap = std::abs(d - ra - rb);
    return gap / std::max(ra, rb);
}

double max_tangency_error(const Packing& p) {
    double m = 0.0;
    for (auto [u, v] : p.edges) m = std::max(m, tangency_error(p.circles[u], p.circles[v]));
    return m;
}

// ---- solver ----

Packing solve_max_packing(const Triangulation& t, int outer, const SolverConfig& cfg) {
    if (!(cfg.epsilon > 0.0)) throw SolverError("epsilon must be positive");
    if (!t.boundary.empty()) throw SolverError("solve_max_packing needs a triangulated sphere");
    const int nv = static_cast<int>(t.vertex_count());
    if (outer < 0 || outer >= nv) throw SolverError("outer vertex out of range");

    // Sphere check: every edge on exactly two triangles with opposite directions.
    std::map<std::pair<int, int>, int> directed;
    for (const auto& tr : t.triangles)
        for (int i = 0; i < 3; ++i) {
            if (tr[i] == tr[(i + 1) % 3]) throw SolverError("degenerate triangle");
            if (++directed[{tr[i], tr[(i + 1) % 3]}] > 1) throw SolverError("not a sphere triangulation: repeated edge");
        }
    std::vector<std::set<int>> nbrs(nv);
    for (auto& [e, cnt] : directed) {
        if (!directed.count({e.second, e.first})) throw SolverError("not a sphere triangulation: open edge");
        nbrs[e.first].insert(e.second);
    }
    long edges = static_cast<long>(directed.size()) / 2;
    if (nv - edges + static_cast<long>(t.triangles.size()) != 2) throw SolverError("not a sphere triangulation: Euler characteristic");
    for (int v = 0; v < nv; ++v)
        if (nbrs[v].size() < 3)
            throw SolverError("not a sphere triangulation: vertex " + t.ids[v] + " has degree " +
                              std::to_string(nbrs[v].size()));

    Problem P;
    P.slot.assign(nv, -1);
    P.petals.resize(nv);
    P.h.assign(nv, 1.0);
    std::vector<bool> on_boundary(nv, false);
    for (int u : nbrs[outer]) {
        on_boundary[u] = true;
        P.h[u] = kInf;
    }
    for (int v = 0; v < nv; ++v) {
        if (v == outer || on_boundary[v]) continue;
        P.slot[v] = static_cast<int>(P.interior.size());
        P.interior.push_back(v);
    }
    std::vector<std::array<int, 3>> inner_tris;
    for (const auto& tr : t.triangles) {
        if (tr[0] == outer || tr[1] == outer || tr[2] == outer) continue;
        inner_tris.push_back(tr);
        for (int i = 0; i < 3; ++i) P.petals[tr[i]].push_back({tr[(i + 1) % 3], tr[(i + 2) % 3]});
    }

    Packing out;
    out.ids = t.ids;
    out.outer = t.ids[outer];
    double defect = max_defect(P);
    long it = 0;
    const double switch_tol = cfg.newton_polish ? std::max(cfg.epsilon, 5e-2) : cfg.epsilon;
    while (defect > switch_tol && it < cfg.max_iterations) {
        sweep(P, cfg.damping);
        ++it;
        if (it % 8 == 0) defect = max_defect(P);
    }
    defect = max_defect(P);
    if (cfg.newton_polish) {
        defect = newton(P, std::min(1e-13, cfg.epsilon), 60);
        while (defect > cfg.epsilon && it < cfg.max_iterations) {
            for (int k = 0; k < 64 && it < cfg.max_iterations; ++k, ++it) sweep(P, cfg.damping);
            defect = newton(P, std::min(1e-13, cfg.epsilon), 60);
        }
    }
    out.iterations = it;
    out.angle_residual = defect;
    out.converged = defect <= cfg.epsilon;

    // Layout.
    std::vector<GenCircle> circles(nv);
    std::vector<bool> placed(nv, false);
    std::vector<std::vector<int>> tris_of(nv);
    for (std::size_t i = 0; i < inner_tris.size(); ++i)
        for (int v : inner_tris[i]) tris_of[v].push_back(static_cast<int>(i));
    auto target_of = [&](int v) { return std::isinf(P.h[v]) ? 1.0 : 1.0 / std::tanh(P.h[v]); };

    // Place circles largest-first: each new circle comes from the triangle whose two
    // placed circles are biggest, which keeps layout error from compounding through tiny circles.
    using Candidate = std::pair<double, std::pair<int, int>>;  // (score, (triangle, missing slot))
    std::priority_queue<Candidate> queue;
    auto offer = [&](int v) {
        for (int ti : tris_of[v]) {
            const auto& tr = inner_tris[ti];
            int missing = -1, count = 0;
            for (int i = 0; i < 3; ++i) {
                if (placed[tr[i]])
                    ++count;
                else
                    missing = i;
            }
            if (count != 2) continue;
            int a = tr[(missing + 1) % 3], b = tr[(missing + 2) % 3];
            double score = std::min(circles[a].abs_radius(), circles[b].abs_radius());
            queue.push({score, {ti, missing}});
        }
    };
    auto mark = [&](int v, const GenCircle& g) {
        circles[v] = g;
        placed[v] = true;
    };
    std::vector<int> seeds;
    if (!inner_tris.empty()) {
        int start = -1;
        for (int v : P.interior)
            if (start < 0 || P.h[v] > P.h[start]) start = v;
        if (start >= 0) {
            const Petal& first = P.petals[start].front();
            double rv = euclid_radius(P.h[start]);
            mark(start, GenCircle::circle(0.0, rv));
            double lo = rv;
            double hi = std::isinf(P.h[first.u]) ? 1.0 : std::tanh(0.5 * (P.h[start] + 2.0 * P.h[first.u]));
            mark(first.u, GenCircle::circle(0.5 * (lo + hi), 0.5 * (hi - lo)));
            seeds = {start, first.u};
        } else {
            // Only horocycles: three of them touching the unit circle at the cube roots of unity.
            const auto& tr = inner_tris.front();
            double rho = 2.0 * std::sqrt(3.0) - 3.0;
            for (int i = 0; i < 3; ++i) {
                mark(tr[i], GenCircle::circle(std::polar(1.0 - rho, 2.0 * kPi * i / 3.0), rho));
                seeds.push_back(tr[i]);
            }
        }
    }
    for (int v : seeds) offer(v);
    while (!queue.empty()) {
        auto [score, slot] = queue.top();
        queue.pop();
        const auto& tr = inner_tris[slot.first];
        int w = tr[slot.second];
        if (placed[w]) continue;
        int a = tr[(slot.second + 1) % 3], b = tr[(slot.second + 2) % 3];
        // (a, b, w) is a rotation of the counterclockwise triangle.
        mark(w, third_circle(circles[a], circles[b], target_of(w)));
        offer(w);
    }
    circles[outer] = GenCircle::circle(0.0, 1.0, true);
    placed[outer] = true;
    for (int v = 0; v < nv; ++v)
        if (!placed[v]) throw SolverError("layout did not reach vertex " + t.ids[v]);
    out.circles = std::move(circles);
    for (auto& [e, cnt] : directed)
        if (e.first < e.second) out.edges.push_back(e);
    out.tangency_residual = max_tangency_error(out);
    if (cfg.newton_polish) polish_packing(out, 3);
    return out;
}

Packing apply_mobius(const Packing& p, const MobiusMap& m) {
    Packing out = p;
    for (auto& c : out.circles) c = map_circle(m, c);
    out.tangency_residual = max_tangency_error(out);
    return out;
}

namespace {

// A circle the normalization sent through infinity comes back from the matrix as a huge circle;
// replace it by the line it approximates near the origin.
GenCircle snap_to_line(const GenCircle& g) {
    if (g.is_line() || std::abs(g.center) == 0.0) return g;
    cplx dir = g.center / std::abs(g.center);
    cplx q = g.center - g.abs_radius() * dir;
    return GenCircle::line(q, g.radius > 0 ? -dir : dir);
}

}  // namespace

Packing normalize(const Packing& p, const std::array<SpherePoint, 3>& s, const std::array<SpherePoint, 3>& d) {
    return apply_mobius(p, mobius_from_triples(s[0], s[1], s[2], d[0], d[1], d[2]));
}

std::string default_outer_vertex(const PlanarComplex& c) {
    if (c.vertex_count() == 0) throw SolverError("empty complex");
    int oldest = *std::min_element(c.birth.begin(), c.birth.end());
    auto adj = c.adjacency();
    int best = -1;
    for (std::size_t v = 0; v < c.vertex_count(); ++v) {
        if (c.birth[v] != oldest) continue;
        if (best < 0 || adj[v].size() > adj[best].size() ||
            (adj[v].size() == adj[best].size() && c.vertex_ids[v] < c.vertex_ids[best]))
            best = static_cast<int>(v);
    }
    return c.vertex_ids[best];
}

std::array<std::pair<std::string, std::string>, 3> normalization_edges(const PlanarComplex& c) {
    int oldest = *std::min_element(c.birth.begin(), c.birth.end());
    std::vector<std::pair<std::string, std::string>> e;
    for (auto [u, v] : c.edges()) {
        if (c.birth[u] != oldest || c.birth[v] != oldest) continue;
        std::string a = c.vertex_ids[u], b = c.vertex_ids[v];
        if (b < a) std::swap(a, b);
        e.emplace_back(a, b);
    }
    std::sort(e.begin(), e.end());
    if (e.size() < 3) throw SolverError("fewer than three level-0 edges for normalization");
    return {e[0], e[1], e[2]};
}

Packing pack_complex(const PlanarComplex& complex, const PackOptions& opt) {
    if (!complex.spherical()) throw SolverError("pack_complex needs a spherical complex");
    Triangulation t = star_triangulate(complex);
    std::string outer = opt.outer.empty() ? default_outer_vertex(complex) : opt.outer;
    int o = complex.find_vertex(outer);
    if (o < 0) throw SolverError("unknown outer vertex " + outer);
    Packing full = solve_max_packing(t, o, opt.solver);

    Packing p;
    p.outer = full.outer;
    p.angle_residual = full.angle_residual;
    p.converged = full.converged;
    p.iterations = full.iterations;
    p.level = complex.level;
    p.ids.assign(full.ids.begin(), full.ids.begin() + t.original_count);
    p.circles.assign(full.circles.begin(), full.circles.begin() + t.original_count);
    for (auto [u, v] : complex.edges())
        if (u != v) p.edges.emplace_back(u, v);
    p.tangency_residual = max_tangency_error(p);
    if (opt.normalize) {
        auto e = normalization_edges(complex);
        std::array<SpherePoint, 3> src;
        for (int i = 0; i < 3; ++i) src[i] = p.tangency(p.index(e[i].first), p.index(e[i].second));
        p = normalize(p, src, {SpherePoint(0.0), SpherePoint(1.0), SpherePoint::infinity()});
        GenCircle& g = p.circles[p.index(e[2].first)];
        GenCircle& h = p.circles[p.index(e[2].second)];
        g = snap_to_line(g);
        h = snap_to_line(h);
        // Circles touching at infinity are parallel lines with opposite normals.
        cplx n = g.normal - h.normal;
        g.normal = n / std::abs(n);
        h.normal = -g.normal;
        p.tangency_residual = max_tangency_error(p);
        if (opt.solver.newton_polish) polish_packing(p, 3);
    }
    return p;
}

Packing pack_level(const PlanarComplex& complex, const SubdivisionRule& rule, int n, const PackOptions& opt) {
    return pack_complex(iterate_subdivision(complex, rule, n), opt);
}

double measure_convergence(const Packing& a, const Packing& b) {
    std::map<std::string, std::pair<int, int>> eb;
    for (auto [u, v] : b.edges) eb[edge_key_ids(b.ids[u], b.ids[v])] = {u, v};
    double worst = 0.0;
    int common = 0;
    for (auto [u, v] : a.edges) {
        auto it = eb.find(edge_key_ids(a.ids[u], a.ids[v]));
        if (it == eb.end()) continue;
        ++common;
        worst = std::max(worst, spherical_distance(a.tangency(u, v), b.tangency(it->second.first, it->second.second)));
    }
    if (common == 0) throw SolverError("packings share no tangency points");
    return worst;
}

// ---- text format ----

namespace {

std::string num(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

}  // namespace

std::string format_packing(const Packing& p) {
    std::ostringstream os;
    os << "packing chart=plane outer=" << p.outer << "\n";
    for (std::size_t i = 0; i < p.ids.size(); ++i) {
        const auto& c = p.circles[i];
        if (c.is_line())
            os << "line " << p.ids[i] << " " << num(c.anchor.real()) << " " << num(c.anchor.imag()) << " "
               << num(c.normal.real()) << " " << num(c.normal.imag()) << "\n";
        else
            os << "circle " << p.ids[i] << " " << num(c.center.real()) << " " << num(c.center.imag()) << " "
               << num(c.radius) << "\n";
    }
    for (auto [u, v] : p.edges) os << "edge " << p.ids[u] << " " << p.ids[v] << "\n";
    os << "residuals tangency=" << num(p.tangency_residual) << " angle=" << num(p.angle_residual) << "\n";
    return os.str();
}

Packing parse_packing(const std::string& text) {
    Packing p;
    std::istringstream in(text);
    std::string raw;
    int line = 0;
    bool header = false, footer = false;
    auto fail = [&](const std::string& msg) {
        throw std::invalid_argument("line " + std::to_string(line) + ": " + msg);
    };
    auto real = [&](const std::string& s) {
        try {
            std::size_t used = 0;
            double x = std::stod(s, &used);
            if (used != s.size()) fail("bad number " + s);
            return x;
        } catch (const std::logic_error&) {
            fail("bad number " + s);
        }
        return 0.0;
    };
    while (std::getline(in, raw)) {
        ++line;
        if (auto pos = raw.find('#'); pos != std::string::npos) raw.resize(pos);
        std::istringstream ls(raw);
        std::vector<std::string> tok;
        for (std::string s; ls >> s;) tok.push_back(s);
        if (tok.empty()) continue;
        if (tok[0] == "packing") {
            for (std::size_t i = 1; i < tok.size(); ++i)
                if (tok[i].rfind("outer=", 0) == 0) p.outer = tok[i].substr(6);
            header = true;
        } else if (tok[0] == "circle" && tok.size() == 5) {
            p.ids.push_back(tok[1]);
            GenCircle g;
            g.kind = GenCircle::Kind::proper;
            g.center = cplx(real(tok[2]), real(tok[3]));
            g.radius = real(tok[4]);
            if (g.radius == 0.0) fail("zero radius");
            p.circles.push_back(g);
        } else if (tok[0] == "line" && tok.size() == 6) {
            p.ids.push_back(tok[1]);
            GenCircle g;
            g.kind = GenCircle::Kind::line;
            g.anchor = cplx(real(tok[2]), real(tok[3]));
            g.normal = cplx(real(tok[4]), real(tok[5]));
            if (std::abs(std::abs(g.normal) - 1.0) > 1e-12) fail("line normal is not a unit vector");
            p.circles.push_back(g);
        } else if (tok[0] == "edge" && tok.size() == 3) {
            int u = p.find(tok[1]), v = p.find(tok[2]);
            if (u < 0 || v < 0) fail("edge refers to an unknown circle");
            p.edges.emplace_back(u, v);
        } else if (tok[0] == "residuals") {
            for (std::size_t i = 1; i < tok.size(); ++i) {
                if (tok[i].rfind("tangency=", 0) == 0) p.tangency_residual = real(tok[i].substr(9));
                if (tok[i].rfind("angle=", 0) == 0) p.angle_residual = real(tok[i].substr(6));
            }
            footer = true;
        } else {
            fail("unrecognized record " + tok[0]);
        }
    }
    if (!header) throw std::invalid_argument("missing packing header");
    if (!footer) throw std::invalid_argument("missing residuals footer");
    return p;
}

}  // namespace gf
