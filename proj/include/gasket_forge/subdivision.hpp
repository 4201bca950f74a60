#pragma once

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

namespace gf {

struct ComplexError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct PolygonSpec {
    std::string id;
    int sides = 0;
};

// One closed 2-cell of a polygon's decomposition. Local vertex names are the
// boundary indices "0".."k-1" and the declared interior names.
struct CellSpec {
    int index = 0;  // 1-based
    std::string type;
    std::vector<std::string> walk;   // counterclockwise, as written
    std::vector<std::string> typed;  // typed[j] = walk vertex matched with vertex j of the type polygon
};

struct CellDecomposition {
    std::vector<std::string> interior;
    std::vector<CellSpec> cells;
};

struct SubdivisionRule {
    std::vector<PolygonSpec> polygons;
    std::map<std::string, CellDecomposition> decomposition;

    const PolygonSpec* find_polygon(const std::string& id) const;
    int sides(const std::string& id) const;
    // Local index of a vertex name within polygon `id`: boundary 0..k-1, interior k.. ; -1 if unknown.
    int local_index(const std::string& id, const std::string& name) const;
};

struct Face {
    std::string id;
    std::string type;        // polygon id; "-" for the external face
    std::vector<int> walk;   // vertex indices, listed in the order of the type polygon's vertices
    bool external = false;
    int depth = 0;           // subdivisions since the root face
};

// Plane (or spherical) complex. Faces are counterclockwise as seen from their own side;
// the external face of a disk complex therefore runs clockwise in the plane.
struct PlanarComplex {
    int level = 0;
    std::vector<std::string> vertex_ids;
    std::vector<int> birth;  // level at which each vertex appeared
    std::unordered_map<std::string, int> vertex_index;
    std::vector<Face> faces;
    std::map<std::string, Face> ancestors;  // faces that have been subdivided

    int add_vertex(const std::string& id, int born = 0);
    int find_vertex(const std::string& id) const;
    int vertex(const std::string& id) const;  // throws when missing
    int find_face(const std::string& id) const;  // leaf faces only; -1 if missing
    const Face* face_record(const std::string& id) const;  // leaf or ancestor
    bool spherical() const;
    int external_face() const;
    std::size_t vertex_count() const { return vertex_ids.size(); }
    std::vector<std::pair<int, int>> edges() const;  // sorted, u < v
    std::vector<std::vector<int>> adjacency() const;  // sorted neighbor lists
    // Counterclockwise neighbor order at each vertex; throws if faces do not close up.
    std::vector<std::vector<int>> rotation() const;
    int euler_characteristic() const;
};

// Root complex G^0(P_i): the polygon with its external face.
PlanarComplex polygon_complex(const SubdivisionRule& rule, const std::string& polygon);

struct ValidationReport {
    bool ok = true;
    std::vector<std::string> violations;
};
ValidationReport validate_rule(const SubdivisionRule& rule);
// Checks a complex against the rule: face sizes, types, and that the faces tile a closed surface.
ValidationReport validate_complex(const PlanarComplex& complex, const SubdivisionRule* rule = nullptr);

// Subdivides every non-external face, or only those selected.
PlanarComplex subdivide(const PlanarComplex& complex, const SubdivisionRule& rule);
PlanarComplex subdivide_faces(const PlanarComplex& complex, const SubdivisionRule& rule,
                              const std::vector<std::string>& face_ids);
PlanarComplex iterate_subdivision(const PlanarComplex& complex, const SubdivisionRule& rule, int n);

struct PredicateReport {
    bool violated = false;
    int depth = 0;  // deepest level examined
    std::string witness;
};
PredicateReport is_simple(const SubdivisionRule& rule, int max_depth);
PredicateReport is_irreducible(const SubdivisionRule& rule, int max_depth);

enum class Acylindricity { certified, suspected_cylindrical, inconclusive };
std::string to_string(Acylindricity a);
struct AcylindricityReport {
    Acylindricity verdict = Acylindricity::inconclusive;
    int certified_depth = -1;
    std::string witness;
    // Per failing pair: greedy counts of disjoint short interior paths at levels 1..max_depth.
    std::vector<std::vector<int>> path_counts;
};
AcylindricityReport is_acylindrical(const SubdivisionRule& rule, int max_depth, int path_length = 4);

struct StandingReport {
    bool s1 = true;
    std::string s1_witness;
    std::optional<bool> s1_prime;
    std::string s1_prime_witness;
    bool s2 = true;  // at power 1
    std::string s2_witness;
    int s2_power = 1;  // least iterate power for which S2 holds; 0 if none up to max_depth
};
StandingReport check_standing_assumptions(const SubdivisionRule& rule, const PlanarComplex* complex,
                                          int max_depth);

// Glue two disk complexes along their external boundaries. `identification` maps
// boundary vertex ids of b to boundary vertex ids of a. Vertices and faces of b that
// are not identified are renamed with `prefix_b`.
PlanarComplex glue_spherical(const PlanarComplex& a, const PlanarComplex& b,
                             const std::map<std::string, std::string>& identification,
                             const std::string& prefix_b = "");

// A source face (leaf or ancestor) carried onto a target face; source type-vertex j goes
// to target type-vertex (j + offset) mod k.
struct FacePiece {
    std::string source;
    std::string target;
    int offset = 0;
};

// Symmetry of a polygon's decomposition rotating the boundary by `rotation`.
struct RuleAutomorphism {
    std::vector<int> vertex;       // local index -> local index
    std::vector<int> cell;         // cell position -> cell position
    std::vector<int> cell_offset;  // rotation carried to each child
};
RuleAutomorphism rule_automorphism(const SubdivisionRule& rule, const std::string& polygon, int rotation);

// Vertex correspondence induced by matching face pieces level by level.
// Result[v] is the image index in `to`, or -1 if v is not reached. Conflicting images throw.
std::vector<int> transport(const SubdivisionRule& rule, const PlanarComplex& from, const PlanarComplex& to,
                           const std::vector<FacePiece>& pieces);

struct SubdivisionHomomorphism {
    std::vector<int> vertex_map;  // G^1 vertex index -> G^0 vertex index
    std::vector<int> face_map;    // G^1 leaf face index -> G^0 leaf face index (-1 if none)
    std::vector<int> face_offset;
    std::vector<std::string> violations;
    bool valid() const { return violations.empty(); }
};
SubdivisionHomomorphism build_homomorphism(const std::map<std::string, std::string>& vertex_map,
                                           const PlanarComplex& g1, const PlanarComplex& g0);

// Faces of `deep` lying in the closure of face `ancestor_id` (matched by id prefix).
std::vector<int> descendant_faces(const PlanarComplex& deep, const std::string& ancestor_id);
std::vector<int> vertices_of_faces(const PlanarComplex& c, const std::vector<int>& faces);
bool is_descendant_id(const std::string& id, const std::string& ancestor);

}  // namespace gf
