#pragma once

#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "gasket_forge/mobius.hpp"
#include "gasket_forge/packing.hpp"
#include "gasket_forge/subdivision.hpp"

namespace gf {

struct MarkovError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Vertex maps psi_n : V(G^{n+shift}) -> V(G^n) carried level by level from a base map
// G^shift -> G^0 (shift 1 for a subdivision homomorphism, 0 for a self-map).
struct VertexMarkovMap {
    int shift = 1;
    std::vector<FacePiece> pieces;      // base face correspondence
    std::vector<PlanarComplex> levels;  // G^0 .. G^N
    std::vector<std::vector<int>> psi;  // psi[n] indexed by vertex of G^{n+shift}
    std::vector<std::string> violations;

    bool valid() const { return violations.empty(); }
    int depth() const { return static_cast<int>(levels.size()) - 1; }
    // psi applied once to a vertex id, read at the coarsest level holding it.
    std::string image(const std::string& id) const;
    std::string iterate(const std::string& id, int power) const;
};

VertexMarkovMap induce_vertex_markov(const SubdivisionRule& rule, const PlanarComplex& g0,
                                     const std::map<std::string, std::string>& base_map, int depth, int shift = 1);

// Tangency points of C_v with its neighbors in G^1, in counterclockwise order, and their images
// under psi^power.
struct InvariantCircleData {
    std::string vertex;
    int power = 1;
    std::vector<std::string> neighbors;
    std::vector<SpherePoint> points;
    std::vector<int> image;  // index into neighbors
    int degree = 0;          // winding of the image walk around v in G^0
    bool orientation_preserving = true;
};

InvariantCircleData markov_partition_on_circle(const Packing& p, const VertexMarkovMap& vm, const std::string& vertex,
                                               int power = 1);

struct AsymptoticsRow {
    int n = 0;
    double d = 0.0;
    double g = 0.0;  // NaN on the last row
};
struct AsymptoticsFit {
    std::vector<AsymptoticsRow> rows;
    double s_d = 0.0;
    double s_g = 0.0;
    int lo = 0, hi = 0;  // fit window in n
};

// d_n = |a_n - a|, g_n = |a_n - a_{n+1}| (Euclidean, in the packing chart), slopes of log d_n and log g_n over
// n in [ceil(M window), M]. A gap belongs to the interval [n, n+1] and is plotted at sqrt(n (n+1)).
AsymptoticsFit fit_asymptotics(const std::vector<SpherePoint>& a_n, const SpherePoint& a, double window = 0.1);
// a_n = 1/n for n = 1..M, a = 0: the orbit of 1 under z/(z+1).
std::vector<SpherePoint> model_parabolic_sequence(int count);
std::string format_asymptotics(const AsymptoticsFit& fit);

// Faces of every depth containing the directed boundary edge v -> w (the face on its left).
std::vector<std::string> edge_face_sequence(const PlanarComplex& complex, const std::string& v, const std::string& w);
// Subdivides the faces along v -> w until `count` distinct approach neighbors exist.
PlanarComplex refine_along_edge(const PlanarComplex& complex, const SubdivisionRule& rule, const std::string& v,
                                const std::string& w, int count);
// Distinct other neighbors of v in the faces along v -> w, shallowest first.
std::vector<std::string> approach_neighbors(const PlanarComplex& complex, const std::string& v, const std::string& w);

// Tangencies a_n = C_v n C_{u_n} approaching the fixed tangency a = C_v n C_w.
// Requires w to be fixed by the circle data's endpoint map.
AsymptoticsFit parabolic_asymptotics(const Packing& p, const PlanarComplex& complex, const InvariantCircleData& icd,
                                     const std::string& fixed_neighbor, int count, double window = 0.1);

// A level-0 vertex outside `avoid` and not adjacent to it when possible. Packing with it as the
// outer circle keeps deep refinement near `avoid` away from the horocycles.
std::string outer_away_from(const PlanarComplex& complex, const std::vector<std::string>& avoid);

struct InvariantCircleRun {
    InvariantCircleData circle;
    AsymptoticsFit fit;
    std::size_t vertices = 0;
    double tangency_residual = 0.0;
};
// Uniform level `uniform_level`, then refinement along vertex -> fixed_neighbor to 3/2 of the
// needed count, packed and fitted.
InvariantCircleRun invariant_circle_asymptotics(const SubdivisionRule& rule, const PlanarComplex& g0,
                                                const std::map<std::string, std::string>& base_map,
                                                const std::string& vertex, int power,
                                                const std::string& fixed_neighbor, int count,
                                                int uniform_level = 8);

enum class PeriodicType { hyperbolic, parabolic };
std::string to_string(PeriodicType t);

struct PeriodicFaceSequence {
    std::vector<std::string> faces;  // F^0, F^1, ...
    int period = 1;
    PeriodicType type = PeriodicType::hyperbolic;
    std::vector<std::string> shared;  // vertices of both F^0 and F^p
};

PeriodicFaceSequence classify_periodic_faces(const PlanarComplex& complex, const std::vector<std::string>& faces,
                                             int period);
// F^0 = face, then child indices path[0], path[1], ... repeated, `length` faces in total.
std::vector<std::string> periodic_path(const std::string& face, const std::vector<int>& path, int length);

struct SymmetryEstimate {
    MobiusMap map;
    double residual = 0.0;
    MobiusClass kind = MobiusClass::identity;
    double trace_defect = 0.0;  // |tr^2 - 4| of the normalized matrix
    double tolerance = 1e-6;
    int level = 0;
    std::size_t pairs = 0;
};

// Mobius map through three boundary tangencies of pieces[0] (source -> target), scored on every
// vertex pair the pieces carry. Residuals are circle mismatches in the frame where the target
// face's first three tangencies sit at 1, i, -1, so they do not depend on the chart of p.
SymmetryEstimate fit_symmetry(const Packing& p, const PlanarComplex& complex, const SubdivisionRule& rule,
                              const std::vector<FacePiece>& pieces, double tolerance = 1e-6);
SymmetryEstimate estimate_mobius_symmetry(const Packing& p, const PlanarComplex& complex, const SubdivisionRule& rule,
                                          const PeriodicFaceSequence& seq, double tolerance = 1e-6);

// Max spherical distance between corresponding tangency points of the two sub-packings inside
// `face`, each sent by the Mobius map taking its first three boundary tangencies to 1, i, -1.
double contraction_proxy(const Packing& pa, const PlanarComplex& ca, const Packing& pb, const PlanarComplex& cb,
                         const std::string& face);

struct ContractionFit {
    std::vector<std::pair<std::string, double>> values;
    double slope = 0.0;  // of log proxy against depth
    double ratio = 0.0;  // exp(slope)
};
ContractionFit contraction_fit(const Packing& pa, const PlanarComplex& ca, const Packing& pb, const PlanarComplex& cb,
                               const std::vector<std::string>& faces);

// Least-squares slope of y against x.
double fit_slope(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace gf
