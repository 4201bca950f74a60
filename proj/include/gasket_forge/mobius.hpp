#pragma once

#include <array>
#include <complex>
#include <stdexcept>
#include <string>

namespace gf {

using cplx = std::complex<double>;

struct DegenerateInput : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// A point of the Riemann sphere in the plane chart.
struct SpherePoint {
    cplx z{0.0, 0.0};
    bool inf = false;

    SpherePoint() = default;
    SpherePoint(cplx v) : z(v) {}
    SpherePoint(double x, double y = 0.0) : z(x, y) {}
    static SpherePoint infinity() {
        SpherePoint p;
        p.inf = true;
        return p;
    }
    bool is_inf() const { return inf; }
};

bool same_point(const SpherePoint& p, const SpherePoint& q, double tol = 0.0);

// Unit vector on S^2 (south pole = 0, north pole = infinity).
std::array<double, 3> to_sphere(const SpherePoint& p);
SpherePoint from_sphere(const std::array<double, 3>& v);

double spherical_distance(const SpherePoint& p, const SpherePoint& q);

// Generalized circle. For a proper circle the signed radius is negative when the
// disk is the unbounded complement. A line is {Re((z - anchor) conj(normal)) = 0}
// and its disk is the half-plane the normal points away from.
struct GenCircle {
    enum class Kind { proper, line };
    Kind kind = Kind::proper;
    cplx center{0.0, 0.0};
    double radius = 1.0;  // signed
    cplx anchor{0.0, 0.0};
    cplx normal{1.0, 0.0};

    static GenCircle circle(cplx c, double r, bool unbounded_disk = false);
    static GenCircle line(cplx anchor, cplx outward_normal);

    bool is_line() const { return kind == Kind::line; }
    bool unbounded_disk() const { return kind == Kind::proper && radius < 0; }
    double abs_radius() const { return std::abs(radius); }
    GenCircle flipped() const;
    // Negative inside the disk, zero on the circle.
    double side(cplx z) const;
    bool disk_contains(const SpherePoint& p, double tol = 0.0) const;
    // Point of the circle, t in [0, 1); lines use t -> anchor + tan(pi (t - 1/2)) direction.
    SpherePoint point_at(double t) const;
};

// Inversive (Lorentz) coordinates (b, bb, bx, by) with <c, c> = -1.
struct Inversive {
    double b = 0, bb = 0, bx = 0, by = 0;
};
Inversive to_inversive(const GenCircle& c);
GenCircle from_inversive(const Inversive& v);
double inversive_product(const Inversive& u, const Inversive& v);
// Equals 1 for externally tangent disks, -1 for identical oriented circles.
double inversive_product(const GenCircle& u, const GenCircle& v);
// Spherical mismatch of two oriented circles: distance of cap centers plus
// difference of cap radii. Zero iff equal.
double circle_mismatch(const GenCircle& u, const GenCircle& v);

struct MobiusMap {
    cplx a{1, 0}, b{0, 0}, c{0, 0}, d{1, 0};

    static MobiusMap identity() { return {}; }
    cplx det() const { return a * d - b * c; }
    cplx trace() const { return a + d; }
    MobiusMap normalized() const;
    MobiusMap inverse() const;
    // Square of the trace of the determinant-normalized matrix.
    cplx trace_squared() const;
};

MobiusMap operator*(const MobiusMap& m, const MobiusMap& n);

// Orientation-reversing map z -> m(conj z).
struct AntiMobius {
    MobiusMap m;
};

struct Reflection {
    GenCircle mirror;
    AntiMobius as_anti() const;
};

SpherePoint apply(const MobiusMap& m, const SpherePoint& p);
SpherePoint apply(const AntiMobius& m, const SpherePoint& p);
SpherePoint apply(const Reflection& r, const SpherePoint& p);

GenCircle map_circle(const MobiusMap& m, const GenCircle& c);
GenCircle map_circle(const AntiMobius& m, const GenCircle& c);
GenCircle map_circle(const Reflection& r, const GenCircle& c);

MobiusMap mobius_from_triples(const SpherePoint& z1, const SpherePoint& z2, const SpherePoint& z3,
                              const SpherePoint& w1, const SpherePoint& w2, const SpherePoint& w3);

enum class MobiusClass { identity, elliptic, parabolic, loxodromic };
std::string to_string(MobiusClass k);
MobiusClass classify(const MobiusMap& m, double tol = 1e-6);

struct CrossRatio {
    SpherePoint value;
    bool degenerate = false;  // two of the points coincide
};
// (z1 - z3)(z2 - z4) / ((z1 - z4)(z2 - z3)) with the factors at infinity dropped.
CrossRatio cross_ratio(const SpherePoint& z1, const SpherePoint& z2, const SpherePoint& z3,
                       const SpherePoint& z4);

// Common point of two tangent generalized circles.
SpherePoint tangency_point(const GenCircle& u, const GenCircle& v);

// Spherical cap (closed disk on S^2): unit center and angular radius in [0, pi].
struct Cap {
    std::array<double, 3> center{0, 0, -1};
    double radius = 0;
};
Cap to_cap(const GenCircle& c);
double angle_between(const std::array<double, 3>& u, const std::array<double, 3>& v);

}  // namespace gf
