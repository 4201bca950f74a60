#pragma once

#include <map>
#include <string>
#include <vector>

#include "gasket_forge/subdivision.hpp"

namespace gf {

// Quadrilateral rule: a square cut by a wall from its upper-left corner through a new
// center vertex x to its lower-right corner. Corners are 0=LL, 1=LR, 2=UR, 3=UL.
extern const char* const kQuadRuleText;
// Same square with both cells keeping the upper-left/lower-right corners; cylindrical.
extern const char* const kCylindricalRuleText;

struct BuiltinCatalog {
    SubdivisionRule rule;
    SubdivisionRule cylindrical_rule;
    PlanarComplex g1;  // level 0; faces "in" and "out"
    PlanarComplex g2;
    // Branched-cover vertex map on level 1 of g1; E = in@x and F = out@x.
    std::map<std::string, std::string> s_map;
    // Symmetries of g2 as face correspondences.
    std::vector<FacePiece> g1_pieces;
    std::vector<FacePiece> g2_pieces;
    std::string period_two_vertex = "A";
    std::string preperiodic_vertex = "C";
};

const BuiltinCatalog& builtin();
PlanarComplex builtin_complex(const std::string& name);  // "g1" or "g2"
std::vector<FacePiece> inverse_pieces(const std::vector<FacePiece>& pieces);

}  // namespace gf
