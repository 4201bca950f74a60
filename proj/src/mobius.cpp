#include "gasket_forge/mobius.hpp"

#include <algorithm>
#include <cmath>

namespace gf {

namespace {

constexpr double kPi = 3.14159265358979323846;
// Relative closeness at which a circle is taken to pass through the pole of an inversion.
constexpr double kThroughPole = 1e-11;

cplx unit(cplx v) { return v / std::abs(v); }

// Building blocks of every Mobius and anti-Mobius map.
GenCircle affine(const GenCircle& g, cplx k, cplx t) {
    GenCircle out = g;
    if (g.is_line()) {
        out.anchor = k * g.anchor + t;
        out.normal = unit(g.normal * k);
    } else {
        out.center = k * g.center + t;
        out.radius = g.radius * std::abs(k);
    }
    return out;
}

GenCircle conjugate(const GenCircle& g) {
    GenCircle out = g;
    out.center = std::conj(g.center);
    out.anchor = std::conj(g.anchor);
    out.normal = std::conj(g.normal);
    return out;
}

// z -> 1/z; `scale` is the magnitude used to judge whether the circle meets 0.
GenCircle invert(const GenCircle& g, double scale) {
    if (g.is_line()) {
        double s = std::real(g.anchor * std::conj(g.normal));
        if (std::abs(s) <= kThroughPole * std::max(1.0, scale))
            return GenCircle::line(0.0, std::conj(g.normal));
        GenCircle out;
        out.kind = GenCircle::Kind::proper;
        out.center = std::conj(g.normal) / (2.0 * s);
        out.radius = -1.0 / (2.0 * s);
        return out;
    }
    double m = std::abs(g.center);
    double r = g.abs_radius();
    if (std::abs(m - r) <= kThroughPole * r) {
        cplx n = std::conj(g.center) / m;
        double s = 1.0 / (2.0 * m);
        cplx outward = g.radius > 0 ? -n : n;
        return GenCircle::line(s * n, outward);
    }
    double den = (m - r) * (m + r);
    GenCircle out;
    out.kind = GenCircle::Kind::proper;
    out.center = std::conj(g.center) / den;
    out.radius = g.radius / den;
    return out;
}

// Decomposition m(z) = a/c - (det/c^2) / (z - p) with p = -d/c.
GenCircle mobius_on_circle(const MobiusMap& m, const GenCircle& g) {
    double size = std::abs(m.a) + std::abs(m.d);
    if (std::abs(m.c) <= 1e-15 * size) return affine(g, m.a / m.d, m.b / m.d);
    cplx p = -m.d / m.c;
    GenCircle h = affine(g, 1.0, -p);
    double scale = std::abs(p) + (g.is_line() ? std::abs(g.anchor) : std::abs(g.center) + g.abs_radius());
    h = invert(h, scale);
    return affine(h, -m.det() / (m.c * m.c), m.a / m.c);
}

}  // namespace

bool same_point(const SpherePoint& p, const SpherePoint& q, double tol) {
    if (p.inf || q.inf) return p.inf == q.inf;
    return std::abs(p.z - q.z) <= tol;
}

std::array<double, 3> to_sphere(const SpherePoint& p) {
    if (p.inf) return {0.0, 0.0, 1.0};
    double n2 = std::norm(p.z);
    double den = n2 + 1.0;
    return {2.0 * p.z.real() / den, 2.0 * p.z.imag() / den, (n2 - 1.0) / den};
}

SpherePoint from_sphere(const std::array<double, 3>& v) {
    double len = std::sqrt(v[0] * v[0] + v[1] * v[1] + v[2] * v[2]);
    double x = v[0] / len, y = v[1] / len, z = v[2] / len;
    if (z >= 1.0 - 1e-300 && x == 0.0 && y == 0.0) return SpherePoint::infinity();
    if (z > 0) {
        cplx w(x, -y);
        if (std::abs(w) == 0.0) return SpherePoint::infinity();
        return SpherePoint((1.0 + z) / w);
    }
    return SpherePoint(cplx(x, y) / (1.0 - z));
}

double spherical_distance(const SpherePoint& p, const SpherePoint& q) {
    if (p.inf && q.inf) return 0.0;
    if (p.inf) return 2.0 * std::atan2(1.0, std::abs(q.z));
    if (q.inf) return 2.0 * std::atan2(1.0, std::abs(p.z));
    return 2.0 * std::atan2(std::abs(p.z - q.z), std::abs(1.0 + std::conj(p.z) * q.z));
}

GenCircle GenCircle::circle(cplx c, double r, bool unbounded) {
    if (!(r > 0)) throw DegenerateInput("circle radius must be positive");
    GenCircle g;
    g.kind = Kind::proper;
    g.center = c;
    g.radius = unbounded ? -r : r;
    return g;
}

GenCircle GenCircle::line(cplx a, cplx n) {
    if (std::abs(n) == 0.0) throw DegenerateInput("line normal must be nonzero");
    GenCircle g;
    g.kind = Kind::line;
    g.anchor = a;
    g.normal = unit(n);
    return g;
}

GenCircle GenCircle::flipped() const {
    GenCircle g = *this;
    if (is_line())
        g.normal = -normal;
    else
        g.radius = -radius;
    return g;
}

double GenCircle::side(cplx z) const {
    if (is_line()) return std::real((z - anchor) * std::conj(normal));
    return (std::norm(z - center) - radius * radius) / radius;
}

bool GenCircle::disk_contains(const SpherePoint& p, double tol) const {
    if (p.inf) return is_line() || radius < 0;
    return side(p.z) <= tol;
}

SpherePoint GenCircle::point_at(double t) const {
    if (is_line()) {
        if (t == 0.0) return SpherePoint::infinity();
        return SpherePoint(anchor + cplx(0, 1) * normal * std::tan(kPi * (t - 0.5)));
    }
    return SpherePoint(center + abs_radius() * std::polar(1.0, 2.0 * kPi * t));
}

Inversive to_inversive(const GenCircle& c) {
    Inversive v;
    if (c.is_line()) {
        v.b = 0.0;
        v.bb = -2.0 * std::real(c.anchor * std::conj(c.normal));
        v.bx = -c.normal.real();
        v.by = -c.normal.imag();
        return v;
    }
    double r = c.radius;
    v.b = 1.0 / r;
    v.bb = (std::norm(c.center) - r * r) / r;
    v.bx = c.center.real() / r;
    v.by = c.center.imag() / r;
    return v;
}

GenCircle from_inversive(const Inversive& v) {
    double nz = std::hypot(v.bx, v.by);
    if (std::abs(v.b) <= 1e-14 * std::max(1.0, nz)) {
        cplx n = -cplx(v.bx, v.by) / nz;
        return GenCircle::line(n * (-v.bb / 2.0), n);
    }
    GenCircle g;
    g.kind = GenCircle::Kind::proper;
    g.radius = 1.0 / v.b;
    g.center = cplx(v.bx, v.by) / v.b;
    return g;
}

double inversive_product(const Inversive& u, const Inversive& v) {
    return 0.5 * (u.b * v.bb + u.bb * v.b) - u.bx * v.bx - u.by * v.by;
}

double inversive_product(const GenCircle& u, const GenCircle& v) {
    if (!u.is_line() && !v.is_line()) {
        // Direct form avoids the cancellation in the coordinate expression.
        double d2 = std::norm(u.center - v.center);
        return (d2 - u.radius * u.radius - v.radius * v.radius) / (2.0 * u.radius * v.radius);
    }
    return inversive_product(to_inversive(u), to_inversive(v));
}

double circle_mismatch(const GenCircle& u, const GenCircle& v) {
    Cap a = to_cap(u), b = to_cap(v);
    return angle_between(a.center, b.center) + std::abs(a.radius - b.radius);
}

MobiusMap MobiusMap::normalized() const {
    cplx s = std::sqrt(det());
    if (std::abs(s) == 0.0) throw DegenerateInput("singular Mobius matrix");
    return {a / s, b / s, c / s, d / s};
}

MobiusMap MobiusMap::inverse() const { return {d, -b, -c, a}; }

cplx MobiusMap::trace_squared() const {
    cplx t = a + d;
    return t * t / det();
}

MobiusMap operator*(const MobiusMap& m, const MobiusMap& n) {
    return {m.a * n.a + m.b * n.c, m.a * n.b + m.b * n.d, m.c * n.a + m.d * n.c,
            m.c * n.b + m.d * n.d};
}

AntiMobius Reflection::as_anti() const {
    if (mirror.is_line()) {
        cplx n2 = mirror.normal * mirror.normal;
        return {MobiusMap{-n2, mirror.anchor + n2 * std::conj(mirror.anchor), 0.0, 1.0}};
    }
    cplx c = mirror.center;
    double rho2 = mirror.radius * mirror.radius;
    return {MobiusMap{c, rho2 - std::norm(c), 1.0, -std::conj(c)}};
}

SpherePoint apply(const MobiusMap& m, const SpherePoint& p) {
    if (p.inf) {
        if (std::abs(m.c) == 0.0) return SpherePoint::infinity();
        return SpherePoint(m.a / m.c);
    }
    cplx den = m.c * p.z + m.d;
    if (std::abs(den) == 0.0) return SpherePoint::infinity();
    return SpherePoint((m.a * p.z + m.b) / den);
}

SpherePoint apply(const AntiMobius& m, const SpherePoint& p) {
    SpherePoint q = p;
    q.z = std::conj(p.z);
    return apply(m.m, q);
}

SpherePoint apply(const Reflection& r, const SpherePoint& p) {
    const GenCircle& g = r.mirror;
    if (g.is_line()) {
        if (p.inf) return p;
        cplx n2 = g.normal * g.normal;
        return SpherePoint(g.anchor - n2 * std::conj(p.z - g.anchor));
    }
    if (p.inf) return SpherePoint(g.center);
    cplx w = p.z - g.center;
    if (std::abs(w) == 0.0) return SpherePoint::infinity();
    return SpherePoint(g.center + g.radius * g.radius / std::conj(w));
}

GenCircle map_circle(const MobiusMap& m, const GenCircle& c) { return mobius_on_circle(m, c); }

GenCircle map_circle(const AntiMobius& m, const GenCircle& c) {
    return mobius_on_circle(m.m, conjugate(c));
}

GenCircle map_circle(const Reflection& r, const GenCircle& c) {
    const GenCircle& g = r.mirror;
    if (g.is_line()) {
        cplx n2 = g.normal * g.normal;
        return affine(conjugate(c), -n2, g.anchor + n2 * std::conj(g.anchor));
    }
    // z -> center + rho^2 / conj(z - center)
    GenCircle h = conjugate(affine(c, 1.0, -g.center));
    double scale = c.is_line() ? std::abs(c.anchor - g.center)
                               : std::abs(c.center - g.center) + c.abs_radius();
    h = invert(h, scale);
    return affine(h, g.radius * g.radius, g.center);
}

namespace {

// Matrix sending (z1, z2, z3) to (0, 1, infinity).
MobiusMap to_standard(const SpherePoint& z1, const SpherePoint& z2, const SpherePoint& z3) {
    if (same_point(z1, z2) || same_point(z2, z3) || same_point(z1, z3))
        throw DegenerateInput("mobius_from_triples: coincident points");
    if (z1.inf) return {0.0, z2.z - z3.z, 1.0, -z3.z};
    if (z2.inf) return {1.0, -z1.z, 1.0, -z3.z};
    if (z3.inf) return {1.0, -z1.z, 0.0, z2.z - z1.z};
    cplx u = z2.z - z3.z, v = z2.z - z1.z;
    return {u, -z1.z * u, v, -z3.z * v};
}

}  // namespace

MobiusMap mobius_from_triples(const SpherePoint& z1, const SpherePoint& z2, const SpherePoint& z3,
                              const SpherePoint& w1, const SpherePoint& w2, const SpherePoint& w3) {
    MobiusMap tz = to_standard(z1, z2, z3).normalized();
    MobiusMap tw = to_standard(w1, w2, w3).normalized();
    return (tw.inverse() * tz).normalized();
}

std::string to_string(MobiusClass k) {
    switch (k) {
        case MobiusClass::identity: return "identity";
        case MobiusClass::elliptic: return "elliptic";
        case MobiusClass::parabolic: return "parabolic";
        case MobiusClass::loxodromic: return "loxodromic";
    }
    return "?";
}

MobiusClass classify(const MobiusMap& m, double tol) {
    MobiusMap n = m.normalized();
    if (std::abs(n.b) <= tol && std::abs(n.c) <= tol && std::abs(n.a - n.d) <= tol)
        return MobiusClass::identity;
    cplx t2 = n.trace_squared();
    if (std::abs(t2 - 4.0) <= tol) return MobiusClass::parabolic;
    if (std::abs(t2.imag()) <= tol && t2.real() >= 0.0 && t2.real() < 4.0) return MobiusClass::elliptic;
    return MobiusClass::loxodromic;
}

CrossRatio cross_ratio(const SpherePoint& z1, const SpherePoint& z2, const SpherePoint& z3,
                       const SpherePoint& z4) {
    const SpherePoint* pts[4] = {&z1, &z2, &z3, &z4};
    int distinct = 0;
    bool degenerate = false;
    for (int i = 0; i < 4; ++i) {
        bool fresh = true;
        for (int j = 0; j < i; ++j)
            if (same_point(*pts[i], *pts[j])) {
                fresh = false;
                degenerate = true;
            }
        distinct += fresh ? 1 : 0;
    }
    if (distinct < 3) throw DegenerateInput("cross_ratio: fewer than three distinct points");

    // Each factor is zero, infinite, or a finite nonzero number.
    int order = 0;
    cplx value = 1.0;
    auto factor = [&](const SpherePoint& p, const SpherePoint& q, int sign) {
        if (same_point(p, q)) {
            order -= sign;
        } else if (p.inf || q.inf) {
            order += sign;
        } else {
            value = sign > 0 ? value * (p.z - q.z) : value / (p.z - q.z);
        }
    };
    factor(z1, z3, 1);
    factor(z2, z4, 1);
    factor(z1, z4, -1);
    factor(z2, z3, -1);
    CrossRatio out;
    out.degenerate = degenerate;
    if (order > 0)
        out.value = SpherePoint::infinity();
    else if (order < 0)
        out.value = SpherePoint(0.0);
    else
        out.value = SpherePoint(value);
    return out;
}

SpherePoint tangency_point(const GenCircle& u, const GenCircle& v) {
    if (u.is_line() && v.is_line()) return SpherePoint::infinity();
    if (u.is_line() || v.is_line()) {
        const GenCircle& l = u.is_line() ? u : v;
        const GenCircle& c = u.is_line() ? v : u;
        return SpherePoint(c.center - l.normal * std::real((c.center - l.anchor) * std::conj(l.normal)));
    }
    cplx d = v.center - u.center;
    double len = std::abs(d);
    if (len == 0.0) return SpherePoint(u.center + u.abs_radius());
    cplx dir = d / len;
    cplx p1 = u.center + u.abs_radius() * dir;
    cplx p2 = u.center - u.abs_radius() * dir;
    double e1 = std::abs(std::abs(p1 - v.center) - v.abs_radius());
    double e2 = std::abs(std::abs(p2 - v.center) - v.abs_radius());
    return SpherePoint(e1 <= e2 ? p1 : p2);
}

Cap to_cap(const GenCircle& g) {
    Cap cap;
    if (g.is_line()) {
        cplx u = g.normal;
        double s = std::real(g.anchor * std::conj(u));
        double phi = 0.5 * (-kPi + 2.0 * std::atan(s));
        cap.radius = 0.5 * (2.0 * std::atan(s) + kPi);
        cap.center = {std::sin(phi) * u.real(), std::sin(phi) * u.imag(), -std::cos(phi)};
        return cap;
    }
    double m = std::abs(g.center);
    cplx u = m > 0 ? g.center / m : cplx(1.0, 0.0);
    double r = g.abs_radius();
    double a1 = std::atan(m - r), a2 = std::atan(m + r);
    double phi = a1 + a2;
    cap.radius = a2 - a1;
    cap.center = {std::sin(phi) * u.real(), std::sin(phi) * u.imag(), -std::cos(phi)};
    if (g.radius < 0) {
        cap.center = {-cap.center[0], -cap.center[1], -cap.center[2]};
        cap.radius = kPi - cap.radius;
    }
    return cap;
}

double angle_between(const std::array<double, 3>& u, const std::array<double, 3>& v) {
    double cx = u[1] * v[2] - u[2] * v[1];
    double cy = u[2] * v[0] - u[0] * v[2];
    double cz = u[0] * v[1] - u[1] * v[0];
    double dot = u[0] * v[0] + u[1] * v[1] + u[2] * v[2];
    return std::atan2(std::sqrt(cx * cx + cy * cy + cz * cz), dot);
}

}  // namespace gf
