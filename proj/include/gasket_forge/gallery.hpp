#pragma once

#include <map>
#include <string>
#include <vector>

#include "gasket_forge/catalog.hpp"
#include "gasket_forge/markov.hpp"
#include "gasket_forge/packing.hpp"

namespace gf {

struct GalleryError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// ---- catalog dynamics ----

struct CatalogDynamics {
    std::vector<std::string> orbit_of_period_two;  // A, S(A), S^2(A)
    std::vector<std::string> orbit_of_preperiodic;
    int period = 0;        // least p with S^p(A) = A
    int preperiod = 0;     // steps before the C orbit becomes periodic
    bool homomorphism = false;
    bool ok = false;
};
CatalogDynamics catalog_dynamics(const BuiltinCatalog& cat);

// ---- symmetries and the group orbit ----

struct GroupSymmetries {
    SymmetryEstimate m1, m2;
    double residual() const { return std::max(m1.residual, m2.residual); }
};
// M1 from the g1 correspondence, M2 from g2, on a packing of G2 at level >= 3.
GroupSymmetries fit_group_symmetries(const Packing& p, const PlanarComplex& c, const SubdivisionRule& rule);

// Letters: a = M1, b = M2, A = M1^-1, B = M2^-1. A word acts right to left.
struct OrbitCircle {
    std::string word;
    std::string base;
    GenCircle circle;          // in the packing chart
    std::string counterpart;   // vertex of the packing, empty if out of reach at this level
    double mismatch = -1.0;    // in the frame of face "in"; -1 without a counterpart
};

struct GroupOrbit {
    MobiusMap m1, m2;
    int max_length = 0;
    std::vector<std::string> base;
    std::vector<OrbitCircle> circles;  // shortlex by word, then base order; duplicates removed
    std::size_t words = 0;             // reduced words enumerated
    std::size_t duplicates = 0;
    std::vector<double> worst_by_length;  // kept circles
    double worst = 0.0;
    // Every enumerated (word, base) pair, duplicates included.
    std::vector<double> worst_all_by_length;
    double worst_all = 0.0;
};

std::vector<std::string> reduced_words(int max_length);

// Orbit of the base circles under reduced words of length <= L. Two orbit circles are the same
// when their combinatorial counterparts agree; the first in shortlex order is kept.
GroupOrbit group_limit_orbit(const Packing& p, const PlanarComplex& c, const SubdivisionRule& rule,
                             const MobiusMap& m1, const MobiusMap& m2, const std::vector<std::string>& base,
                             int max_length);
std::string format_orbit(const GroupOrbit& orbit);

// ---- local equivalence ----

// A disk taken out of a complex: the given faces and an external face along their boundary.
PlanarComplex sub_complex(const PlanarComplex& c, const std::vector<std::string>& faces);

// Plane-graph isomorphism taking external face to external face, found by propagating a start
// dart through the rotation systems. Empty if none exists.
std::vector<int> plane_isomorphism(const PlanarComplex& a, const PlanarComplex& b);

struct SubPackingView {
    std::string name;
    std::vector<std::string> faces;
    std::vector<int> to_model;  // vertex of the sub-complex -> vertex of the model complex
    bool isomorphic = false;
    std::vector<GenCircle> circles;  // model order, in the frame of the model corners
    std::vector<SpherePoint> cross_ratios;  // model edge order
};

struct DemoBundle {
    std::map<std::string, std::string> files;  // relative path -> content
    bool ok = true;
    std::string summary;
};
void write_bundle(const DemoBundle& bundle, const std::string& dir);

struct LocalEquivalence {
    PlanarComplex model;  // the quadrilateral subdivided n times
    std::vector<std::pair<std::string, std::string>> model_edges;
    std::vector<SubPackingView> views;  // g1_in, g1_out, g1_tilde_left, g1_tilde_right, g2_in, g2_out
    bool all_isomorphic = false;
    double max_cross_ratio_gap = 0.0;  // between g1_in and g2_in
};

LocalEquivalence local_equivalence(const Packing& p1, const PlanarComplex& c1, const Packing& p2,
                                   const PlanarComplex& c2, const SubdivisionRule& rule);
std::string format_cross_ratio_table(const LocalEquivalence& le);
DemoBundle local_equivalence_demo(const Packing& p1, const PlanarComplex& c1, const Packing& p2,
                                  const PlanarComplex& c2, const SubdivisionRule& rule);

// ---- branched cover ----

struct CoverReport {
    int level = 0;
    std::vector<std::string> target_faces;         // faces of U~ at level n
    std::vector<std::string> source_faces;         // faces of W~ at level n + 2
    std::map<std::string, int> fiber;              // target face -> preimages in W~
    std::map<int, int> fiber_histogram;
    std::vector<std::string> branch_faces;         // fiber size 1
    std::vector<std::string> branch_vertices;      // local degree 2 at the vertex
    bool faces_commute = false;  // S^2 on walks equals the image face walk
    bool levels_commute = false; // S^2 agrees on vertices already present one level down
    bool inside = false;         // every W~ face lies in U~
};
CoverReport qr_symmetry_demo(const BuiltinCatalog& cat, int n);
std::string format_cover(const CoverReport& r);

// ---- symmetry fit across levels ----

struct SymfitRow {
    int level = 0;
    double m1 = 0.0, m2 = 0.0;
    double tangency = 0.0;
};
std::vector<SymfitRow> symfit_table(const BuiltinCatalog& cat, int lo, int hi);
std::string format_symfit(const std::vector<SymfitRow>& rows);

}  // namespace gf
