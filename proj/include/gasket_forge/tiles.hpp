#pragma once

#include <array>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "gasket_forge/mobius.hpp"
#include "gasket_forge/packing.hpp"
#include "gasket_forge/subdivision.hpp"

namespace gf {

struct ChainError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Boundary circles of a face, in walk order. Consecutive circles touch, the others are disjoint.
struct FaceChain {
    std::string face;
    std::vector<std::string> vertices;
    std::vector<GenCircle> circles;
    double tangency_error = 0.0;  // worst consecutive pair

    std::size_t size() const { return circles.size(); }
    // Common point of circles i and i+1 (mod r).
    SpherePoint corner(std::size_t i) const;
};

FaceChain make_chain(const std::vector<GenCircle>& circles, double tol = 1e-6, const std::string& name = "");
FaceChain boundary_chain(const Packing& p, const PlanarComplex& complex, const std::string& face, double tol = 1e-6);

// Composition of reflections: z -> m(z) or m(conj z).
struct Isometry {
    MobiusMap m;
    bool anti = false;
};
Isometry compose(const Isometry& a, const Isometry& b);
Isometry reflection_isometry(const GenCircle& mirror);
SpherePoint apply(const Isometry& g, const SpherePoint& p);
GenCircle map_circle(const Isometry& g, const GenCircle& c);

// Admissible words (no letter repeated back to back) of length exactly l, in lexicographic order.
std::vector<std::vector<int>> admissible_words(int r, int length);
long admissible_word_count(int r, int length);  // r (r-1)^(l-1), or 1 for l = 0

// Images of the corner points under admissible words of length <= depth. A word ending in i
// contributes only the r-2 corners off C_i, since the other two are fixed by g_i.
std::vector<SpherePoint> tile_boundary_samples(const FaceChain& chain, int depth);
long tile_sample_count(int r, int depth);

// Limit points of the alternating words ijij... and jiji... for non-consecutive i < j.
std::vector<SpherePoint> alternating_limit_points(const FaceChain& chain);

// Depth-l disks D_{i1...il} = g_{i1}(D_{i2...il}); depth 0 gives the chain disks.
std::vector<GenCircle> nested_disks(const FaceChain& chain, int depth);

struct DiameterEstimate {
    double lower = 0.0;  // spread of boundary samples
    double upper = 0.0;  // diameter of the union of depth-L disks
};
DiameterEstimate tile_diameter(const FaceChain& chain, int depth);

// Spherical diameter of a point set and of a union of caps.
double point_diameter(const std::vector<SpherePoint>& pts);
double cap_union_diameter(const std::vector<GenCircle>& disks);

struct MarkovTile {
    std::string face;
    int level = 0;
    int depth = 0;
    FaceChain chain;
    std::vector<SpherePoint> samples;      // tile_boundary_samples plus alternating limit points
    DiameterEstimate diameter;
};

MarkovTile make_tile(const Packing& p, const PlanarComplex& complex, const std::string& face, int level, int depth);

// Faces of G^n inside a complex of level >= n (leaves and subdivided ancestors alike).
std::vector<std::string> faces_at_level(const PlanarComplex& complex, int n);

std::vector<MarkovTile> tiles_at_level(const Packing& p, const PlanarComplex& complex, int n, int depth = 4);
double max_upper_diameter(const std::vector<MarkovTile>& tiles);

enum class SharedBoundary { none, vertex, edge, two_nonadjacent, many };
std::string to_string(SharedBoundary s);
SharedBoundary shared_boundary(const PlanarComplex& complex, const std::string& face_a, const std::string& face_b);
// Number of common boundary points the combinatorial case predicts: 0, 1, 2 or -1 for "more than two".
int expected_common_points(SharedBoundary s);

struct IntersectionVerdict {
    SharedBoundary shared = SharedBoundary::none;
    int common = 0;      // clusters of tile A samples that meet tile B samples
    bool matches = false;
};
IntersectionVerdict intersection_pattern(const MarkovTile& a, const MarkovTile& b, SharedBoundary shared,
                                         double tol = 1e-6);

using TangencySet = std::map<std::pair<std::string, std::string>, SpherePoint>;
TangencySet tangency_points(const Packing& p);
// Largest angular gap between consecutive tangency points on the circle of `vertex`, restricted to
// the arc from `from` to `to` (counterclockwise angles about the cap center). Full circle by default.
double density_gap(const Packing& p, const TangencySet& ts, const std::string& vertex, double from = 0.0,
                   double to = 0.0);

// Ratio of circumscribed to inscribed spherical radius about the best center found; >= 1.
double eccentricity(const std::vector<SpherePoint>& boundary);

struct QuasiroundnessReport {
    int level = 0;
    std::vector<std::pair<std::string, double>> per_face;
    double max = 0.0;
    double mean = 0.0;
};
QuasiroundnessReport quasiroundness_report(const Packing& p, const PlanarComplex& complex, int n, int depth = 4);

struct PointCloud {
    int level = 0;
    int depth = 0;
    std::vector<cplx> points;
    long dropped_at_infinity = 0;
};
// Samples of every circle plus, for depth >= 1, the tile boundary samples of every face of G^n.
// Points at infinity are dropped and counted.
PointCloud limit_set_cloud(const Packing& p, const PlanarComplex& complex, int n, int depth,
                           int samples_per_circle = 64);
std::string format_cloud(const PointCloud& cloud);
PointCloud parse_cloud(const std::string& text);

}  // namespace gf
