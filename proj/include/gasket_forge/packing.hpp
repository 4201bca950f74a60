#pragma once

#include <array>
#include <string>
#include <unordered_map>
#include <vector>

#include "gasket_forge/mobius.hpp"
#include "gasket_forge/subdivision.hpp"

namespace gf {

struct SolverError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct Triangulation {
    std::vector<std::string> ids;  // original vertices first, then one helper per face of size >= 4
    std::vector<bool> helper;
    std::vector<int> origin_face;  // complex face index for helpers, -1 otherwise
    std::vector<std::array<int, 3>> triangles;  // counterclockwise
    std::vector<int> boundary;  // external face walk; empty for a sphere
    int original_count = 0;

    std::size_t vertex_count() const { return ids.size(); }
    int helper_count() const { return static_cast<int>(ids.size()) - original_count; }
};

Triangulation star_triangulate(const PlanarComplex& complex);

struct SolverConfig {
    double epsilon = 1e-10;        // target for the max angle-sum defect
    long max_iterations = 1000000;  // sweep cap
    double damping = 1.0;
    bool newton_polish = true;
};

struct Packing {
    std::vector<std::string> ids;
    std::vector<GenCircle> circles;
    std::vector<std::pair<int, int>> edges;  // tangency graph
    std::string outer;
    double tangency_residual = 0.0;
    double angle_residual = 0.0;
    bool converged = true;
    long iterations = 0;
    int level = 0;

    int find(const std::string& id) const;
    int index(const std::string& id) const;  // throws when missing
    const GenCircle& circle(const std::string& id) const { return circles[index(id)]; }
    SpherePoint tangency(int u, int v) const { return tangency_point(circles[u], circles[v]); }
};

// Relative tangency error of two circles meant to be externally tangent.
double tangency_error(const GenCircle& a, const GenCircle& b);
double max_tangency_error(const Packing& p);

// Maximal packing of the sphere triangulation with `outer` realized as the unit circle's outside.
Packing solve_max_packing(const Triangulation& t, int outer, const SolverConfig& cfg = {});

// Mobius image sending the three source points to the three targets; residuals re-checked.
Packing normalize(const Packing& p, const std::array<SpherePoint, 3>& source,
                  const std::array<SpherePoint, 3>& target);
Packing apply_mobius(const Packing& p, const MobiusMap& m);

// Default outer vertex: largest degree among the oldest vertices, ties to the smallest id.
std::string default_outer_vertex(const PlanarComplex& complex);

struct PackOptions {
    SolverConfig solver;
    std::string outer;         // empty: default_outer_vertex
    bool normalize = true;     // three level-0 tangency points to 0, 1, infinity
};

// Packs a spherical complex as it is (any level, possibly adaptively refined).
Packing pack_complex(const PlanarComplex& complex, const PackOptions& opt = {});
Packing pack_level(const PlanarComplex& complex, const SubdivisionRule& rule, int n, const PackOptions& opt = {});

// The three level-0 edges whose tangency points define the standard normalization.
std::array<std::pair<std::string, std::string>, 3> normalization_edges(const PlanarComplex& complex);

// Max spherical distance between tangency points of edges common to both packings.
double measure_convergence(const Packing& a, const Packing& b);

// Packing text format: header, circle/line records, edge records, residual footer.
std::string format_packing(const Packing& p);
Packing parse_packing(const std::string& text);

}  // namespace gf
