#include "gasket_forge/catalog.hpp"

#include "gasket_forge/formats.hpp"

namespace gf {

const char* const kQuadRuleText = R"(# quadrilateral subdivided into two quadrilaterals
polygon P sides=4
interior P x
cell P.1 type=P walk=3,x,1,2
corr P.1 0->3 1->x 2->1 3->2
cell P.2 type=P walk=1,x,3,0
corr P.2 0->1 1->x 2->3 3->0
)";

const char* const kCylindricalRuleText = R"(polygon P sides=4
interior P x
cell P.1 type=P walk=x,1,2,3
corr P.1 0->x 1->1 2->2 3->3
cell P.2 type=P walk=0,1,x,3
corr P.2 0->0 1->1 2->x 3->3
)";

namespace {

// Inner face seen with corners A=UL, B=LL, C=LR, D=UR of the outer picture.
const char* const kG1Text = R"(level 0
vertex A
vertex B
vertex C
vertex D
face in type=P walk=D,C,B,A
face out type=P walk=B,C,D,A
)";

const char* const kG2Text = R"(level 0
vertex A
vertex B
vertex C
vertex D
face in type=P walk=D,C,B,A
face out type=P walk=C,D,A,B
)";

BuiltinCatalog make_catalog() {
    BuiltinCatalog c;
    c.rule = parse_rule(kQuadRuleText);
    c.cylindrical_rule = parse_rule(kCylindricalRuleText);
    c.g1 = parse_complex(kG1Text);
    c.g2 = parse_complex(kG2Text);
    c.s_map = {{"A", "B"}, {"B", "A"}, {"C", "D"}, {"D", "A"}, {"in@x", "C"}, {"out@x", "C"}};
    // DAEC -> ABCD, with the other two quadrilaterals following.
    c.g1_pieces = {{"in.2", "in", 0}, {"in.1", "out.2", 2}, {"out", "out.1", 2}};
    // EABC -> ABCD.
    c.g2_pieces = {{"in.1", "in", 2}, {"in.2", "out.1", 2}, {"out", "out.2", 0}};
    return c;
}

}  // namespace

const BuiltinCatalog& builtin() {
    static const BuiltinCatalog catalog = make_catalog();
    return catalog;
}

PlanarComplex builtin_complex(const std::string& name) {
    if (name == "g1") return builtin().g1;
    if (name == "g2") return builtin().g2;
    throw ComplexError("unknown builtin complex " + name);
}

std::vector<FacePiece> inverse_pieces(const std::vector<FacePiece>& pieces) {
    std::vector<FacePiece> out;
    for (const auto& p : pieces) out.push_back({p.target, p.source, -p.offset});
    return out;
}

}  // namespace gf
