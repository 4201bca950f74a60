#include "gasket_forge/subdivision.hpp"

#include <algorithm>
#include <cctype>
#include <deque>
#include <numeric>
#include <set>
#include <sstream>
#include <unordered_set>

namespace gf {

namespace {

bool is_index(const std::string& s) {
    return !s.empty() && std::all_of(s.begin(), s.end(), [](unsigned char ch) { return std::isdigit(ch); });
}

std::uint64_t edge_key(int u, int v) {
    return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(u)) << 32) | static_cast<std::uint32_t>(v);
}

// Cells of a polygon in local indices, type order.
std::vector<std::vector<int>> local_cells(const SubdivisionRule& rule, const std::string& id) {
    std::vector<std::vector<int>> out;
    const auto& dec = rule.decomposition.at(id);
    for (const auto& cell : dec.cells) {
        std::vector<int> w;
        for (const auto& name : cell.typed) w.push_back(rule.local_index(id, name));
        out.push_back(std::move(w));
    }
    return out;
}

std::string strip_levels(std::string id, int count) {
    for (int i = 0; i < count; ++i) {
        auto pos = id.rfind('.');
        if (pos == std::string::npos) break;
        id.resize(pos);
    }
    return id;
}

bool rotation_of(const std::vector<int>& image, const std::vector<int>& target, int& offset) {
    const int m = static_cast<int>(target.size());
    if (static_cast<int>(image.size()) != m) return false;
    for (int o = 0; o < m; ++o) {
        bool ok = true;
        for (int i = 0; i < m && ok; ++i) ok = image[i] == target[(i + o) % m];
        if (ok) {
            offset = o;
            return true;
        }
    }
    return false;
}

std::vector<PlanarComplex> levels_of(const SubdivisionRule& rule, const PlanarComplex& base, int max_depth) {
    std::vector<PlanarComplex> out;
    out.push_back(base);
    for (int n = 1; n <= max_depth; ++n) out.push_back(subdivide(out.back(), rule));
    return out;
}

std::unordered_set<std::uint64_t> undirected_edges(const PlanarComplex& c) {
    std::unordered_set<std::uint64_t> s;
    for (auto [u, v] : c.edges()) s.insert(edge_key(u, v));
    return s;
}

// S1-type check on every internal face of c.
bool faces_are_polygons(const PlanarComplex& c, std::string& witness) {
    auto edges = undirected_edges(c);
    for (const auto& f : c.faces) {
        if (f.external) continue;
        std::set<int> seen(f.walk.begin(), f.walk.end());
        if (seen.size() != f.walk.size()) {
            witness = "face " + f.id + " boundary walk repeats a vertex at level " + std::to_string(c.level);
            return false;
        }
        const int k = static_cast<int>(f.walk.size());
        for (int i = 0; i < k; ++i) {
            for (int j = i + 2; j < k; ++j) {
                if (i == 0 && j == k - 1) continue;
                int a = std::min(f.walk[i], f.walk[j]), b = std::max(f.walk[i], f.walk[j]);
                if (edges.count(edge_key(a, b))) {
                    witness = "face " + f.id + " boundary is not induced: chord " + c.vertex_ids[f.walk[i]] + "-" +
                              c.vertex_ids[f.walk[j]] + " at level " + std::to_string(c.level);
                    return false;
                }
            }
        }
    }
    return true;
}

bool consecutive(const std::vector<int>& walk, int a, int b) {
    const int k = static_cast<int>(walk.size());
    for (int i = 0; i < k; ++i) {
        int u = walk[i], v = walk[(i + 1) % k];
        if ((u == a && v == b) || (u == b && v == a)) return true;
    }
    return false;
}

// S2 for faces nested `power` levels apart, at starting levels 0, power, 2 power, ...
bool nested_boundaries_ok(const std::vector<PlanarComplex>& levels, int power, std::string& witness) {
    const int top = static_cast<int>(levels.size()) - 1;
    for (int n = 0; n + power <= top; n += power) {
        const auto& coarse = levels[n];
        const auto& fine = levels[n + power];
        for (const auto& f : fine.faces) {
            if (f.external) continue;
            std::string anc = strip_levels(f.id, power);
            const Face* big = coarse.face_record(anc);
            if (!big) continue;
            std::vector<int> common;
            for (int v : f.walk) {
                int cv = coarse.find_vertex(fine.vertex_ids[v]);
                if (cv >= 0 && std::find(big->walk.begin(), big->walk.end(), cv) != big->walk.end()) common.push_back(v);
            }
            bool ok = common.size() <= 1;
            if (common.size() == 2) {
                int a = coarse.vertex(fine.vertex_ids[common[0]]), b = coarse.vertex(fine.vertex_ids[common[1]]);
                ok = consecutive(f.walk, common[0], common[1]) && consecutive(big->walk, a, b);
            }
            if (!ok) {
                std::ostringstream os;
                os << "boundary of " << f.id << " meets boundary of " << anc << " in " << common.size()
                   << " vertices";
                witness = os.str();
                return false;
            }
        }
    }
    return true;
}

int greedy_disjoint_paths(const PlanarComplex& c, int v, int w, const std::vector<bool>& forbidden, int max_len) {
    auto adj = c.adjacency();
    std::vector<bool> used(c.vertex_count(), false);
    int count = 0;
    // The direct edge counts once.
    if (std::binary_search(adj[v].begin(), adj[v].end(), w)) ++count;
    for (;;) {
        std::vector<int> prev(c.vertex_count(), -1), dist(c.vertex_count(), -1);
        std::deque<int> q{v};
        dist[v] = 0;
        bool found = false;
        while (!q.empty() && !found) {
            int x = q.front();
            q.pop_front();
            if (dist[x] >= max_len) continue;
            for (int y : adj[x]) {
                if (x == v && y == w) continue;
                if (y == w) {
                    prev[w] = x;
                    found = true;
                    break;
                }
                if (dist[y] >= 0 || used[y] || forbidden[y]) continue;
                dist[y] = dist[x] + 1;
                prev[y] = x;
                q.push_back(y);
            }
        }
        if (!found) break;
        for (int x = prev[w]; x != v; x = prev[x]) used[x] = true;
        ++count;
    }
    return count;
}

}  // namespace

// ---- rule ----

const PolygonSpec* SubdivisionRule::find_polygon(const std::string& id) const {
    for (const auto& p : polygons)
        if (p.id == id) return &p;
    return nullptr;
}

int SubdivisionRule::sides(const std::string& id) const {
    const auto* p = find_polygon(id);
    if (!p) throw ComplexError("unknown polygon type " + id);
    return p->sides;
}

int SubdivisionRule::local_index(const std::string& id, const std::string& name) const {
    const auto* p = find_polygon(id);
    if (!p) return -1;
    if (is_index(name)) {
        int j = std::stoi(name);
        return j < p->sides ? j : -1;
    }
    auto it = decomposition.find(id);
    if (it == decomposition.end()) return -1;
    const auto& in = it->second.interior;
    auto pos = std::find(in.begin(), in.end(), name);
    if (pos == in.end()) return -1;
    return p->sides + static_cast<int>(pos - in.begin());
}

// ---- complex ----

int PlanarComplex::add_vertex(const std::string& id, int born) {
    auto it = vertex_index.find(id);
    if (it != vertex_index.end()) return it->second;
    int idx = static_cast<int>(vertex_ids.size());
    vertex_ids.push_back(id);
    birth.push_back(born);
    vertex_index.emplace(id, idx);
    return idx;
}

int PlanarComplex::find_vertex(const std::string& id) const {
    auto it = vertex_index.find(id);
    return it == vertex_index.end() ? -1 : it->second;
}

int PlanarComplex::vertex(const std::string& id) const {
    int v = find_vertex(id);
    if (v < 0) throw ComplexError("unknown vertex " + id);
    return v;
}

int PlanarComplex::find_face(const std::string& id) const {
    for (std::size_t i = 0; i < faces.size(); ++i)
        if (faces[i].id == id) return static_cast<int>(i);
    return -1;
}

const Face* PlanarComplex::face_record(const std::string& id) const {
    int f = find_face(id);
    if (f >= 0) return &faces[f];
    auto it = ancestors.find(id);
    return it == ancestors.end() ? nullptr : &it->second;
}

bool PlanarComplex::spherical() const { return external_face() < 0; }

int PlanarComplex::external_face() const {
    for (std::size_t i = 0; i < faces.size(); ++i)
        if (faces[i].external) return static_cast<int>(i);
    return -1;
}

std::vector<std::pair<int, int>> PlanarComplex::edges() const {
    std::set<std::pair<int, int>> s;
    for (const auto& f : faces) {
        const std::size_t k = f.walk.size();
        for (std::size_t i = 0; i < k; ++i) {
            int u = f.walk[i], v = f.walk[(i + 1) % k];
            s.emplace(std::min(u, v), std::max(u, v));
        }
    }
    return {s.begin(), s.end()};
}

std::vector<std::vector<int>> PlanarComplex::adjacency() const {
    std::vector<std::vector<int>> adj(vertex_count());
    for (auto [u, v] : edges()) {
        if (u == v) continue;
        adj[u].push_back(v);
        adj[v].push_back(u);
    }
    for (auto& a : adj) std::sort(a.begin(), a.end());
    return adj;
}

std::vector<std::vector<int>> PlanarComplex::rotation() const {
    // In a counterclockwise face (u, v, w) the neighbor after w around v is u.
    std::vector<std::unordered_map<int, int>> next(vertex_count());
    for (const auto& f : faces) {
        const std::size_t k = f.walk.size();
        for (std::size_t i = 0; i < k; ++i) {
            int u = f.walk[(i + k - 1) % k], v = f.walk[i], w = f.walk[(i + 1) % k];
            if (!next[v].emplace(w, u).second)
                throw ComplexError("rotation undefined at vertex " + vertex_ids[v] + ": repeated corner");
        }
    }
    auto adj = adjacency();
    std::vector<std::vector<int>> rot(vertex_count());
    for (std::size_t v = 0; v < vertex_count(); ++v) {
        if (adj[v].empty()) continue;
        int start = adj[v].front(), cur = start;
        do {
            rot[v].push_back(cur);
            auto it = next[v].find(cur);
            if (it == next[v].end())
                throw ComplexError("rotation undefined at vertex " + vertex_ids[v] + ": boundary corner");
            cur = it->second;
        } while (cur != start && rot[v].size() <= adj[v].size());
        if (rot[v].size() != adj[v].size())
            throw ComplexError("vertex " + vertex_ids[v] + " is not a manifold point");
    }
    return rot;
}

int PlanarComplex::euler_characteristic() const {
    return static_cast<int>(vertex_count()) - static_cast<int>(edges().size()) + static_cast<int>(faces.size());
}

PlanarComplex polygon_complex(const SubdivisionRule& rule, const std::string& polygon) {
    const int k = rule.sides(polygon);
    PlanarComplex c;
    Face f{polygon, polygon, {}, false, 0};
    for (int j = 0; j < k; ++j) f.walk.push_back(c.add_vertex(std::to_string(j)));
    Face ext{"ext", "-", std::vector<int>(f.walk.rbegin(), f.walk.rend()), true, 0};
    c.faces.push_back(std::move(f));
    c.faces.push_back(std::move(ext));
    return c;
}

// ---- validation ----

ValidationReport validate_rule(const SubdivisionRule& rule) {
    ValidationReport rep;
    auto fail = [&](std::string s) {
        rep.ok = false;
        rep.violations.push_back(std::move(s));
    };
    if (rule.polygons.empty()) fail("rule has no polygons");
    for (const auto& p : rule.polygons) {
        if (p.sides < 3) fail("polygon " + p.id + " has fewer than 3 sides");
        auto dit = rule.decomposition.find(p.id);
        if (dit == rule.decomposition.end()) {
            fail("polygon " + p.id + " has no decomposition");
            continue;
        }
        const auto& dec = dit->second;
        if (dec.cells.size() < 2) fail("fewer than 2 cells in polygon " + p.id);

        bool walks_ok = true;
        std::map<std::pair<int, int>, int> directed;
        std::set<int> used;
        for (const auto& cell : dec.cells) {
            std::string cid = p.id + "." + std::to_string(cell.index);
            const auto* t = rule.find_polygon(cell.type);
            if (!t) {
                fail("cell " + cid + " has unknown type " + cell.type);
                walks_ok = false;
                continue;
            }
            if (static_cast<int>(cell.walk.size()) != t->sides) {
                fail("cell " + cid + " walk length " + std::to_string(cell.walk.size()) + " does not match type " +
                     cell.type);
                walks_ok = false;
                continue;
            }
            std::vector<int> w, typed;
            for (const auto& name : cell.walk) {
                int li = rule.local_index(p.id, name);
                if (li < 0) {
                    fail("cell " + cid + " uses unknown vertex " + name);
                    walks_ok = false;
                }
                w.push_back(li);
            }
            for (const auto& name : cell.typed) typed.push_back(rule.local_index(p.id, name));
            int off = 0;
            if (typed.size() != w.size() || !rotation_of(typed, w, off))
                fail("correspondence of cell " + cid + " is not an orientation-preserving bijection onto type " +
                     cell.type);
            if (!walks_ok) continue;
            for (std::size_t i = 0; i < w.size(); ++i) {
                directed[{w[i], w[(i + 1) % w.size()]}]++;
                used.insert(w[i]);
            }
        }
        for (std::size_t i = 0; i < dec.interior.size(); ++i)
            if (walks_ok && !used.count(p.sides + static_cast<int>(i)))
                fail("interior vertex " + dec.interior[i] + " of polygon " + p.id + " is unused");
        if (!walks_ok) continue;

        auto name_of = [&](int li) { return li < p.sides ? std::to_string(li) : dec.interior[li - p.sides]; };
        const int k = p.sides;
        auto boundary = [&](int a, int b) { return a < k && b < k && b == (a + 1) % k; };
        std::map<int, std::vector<int>> unpaired;
        bool tiling = true;
        for (auto [e, cnt] : directed) {
            auto [a, b] = e;
            if (cnt > 1) {
                fail("non-tiling walks: edge " + name_of(a) + "->" + name_of(b) + " of polygon " + p.id +
                     " is traversed twice in the same direction");
                tiling = false;
            }
            if (boundary(a, b)) continue;
            if (!directed.count({b, a})) unpaired[a].push_back(b);
        }
        for (int j = 0; j < k; ++j) {
            int a = j, b = (j + 1) % k;
            if (directed.count({a, b})) continue;
            // Look for the boundary edge being replaced by a path through unpaired edges.
            std::vector<int> prev(k + dec.interior.size(), -2);
            std::deque<int> q{a};
            prev[a] = -1;
            while (!q.empty() && prev[b] == -2) {
                int x = q.front();
                q.pop_front();
                for (int y : unpaired[x])
                    if (prev[y] == -2) {
                        prev[y] = x;
                        q.push_back(y);
                    }
            }
            if (prev[b] != -2 && prev[b] != a) {
                fail("boundary edge subdivided (boundary edge contains interior vertex " + name_of(prev[b]) +
                     "): polygon " + p.id + " edge " + std::to_string(a) + "-" + std::to_string(b));
            } else {
                fail("non-tiling walks: boundary edge " + std::to_string(a) + "-" + std::to_string(b) +
                     " of polygon " + p.id + " is not covered");
            }
            tiling = false;
        }
        if (tiling) {
            for (auto& [a, outs] : unpaired)
                for (int b : outs)
                    fail("non-tiling walks: edge " + name_of(a) + "->" + name_of(b) + " of polygon " + p.id +
                         " is unmatched");
            std::set<std::pair<int, int>> und;
            for (auto& [e, cnt] : directed) und.emplace(std::min(e.first, e.second), std::max(e.first, e.second));
            int chi = static_cast<int>(used.size()) - static_cast<int>(und.size()) + static_cast<int>(dec.cells.size());
            if (chi != 1) fail("cells of polygon " + p.id + " do not form a disk (Euler characteristic " +
                               std::to_string(chi) + ")");
        }
    }
    return rep;
}

ValidationReport validate_complex(const PlanarComplex& c, const SubdivisionRule* rule) {
    ValidationReport rep;
    auto fail = [&](std::string s) {
        rep.ok = false;
        rep.violations.push_back(std::move(s));
    };
    int externals = 0;
    std::map<std::pair<int, int>, int> directed;
    for (const auto& f : c.faces) {
        if (f.external) {
            ++externals;
        } else if (rule) {
            const auto* p = rule->find_polygon(f.type);
            if (!p)
                fail("face " + f.id + " has unknown type " + f.type);
            else if (static_cast<int>(f.walk.size()) != p->sides)
                fail("face " + f.id + " has " + std::to_string(f.walk.size()) + " sides but type " + f.type +
                     " has " + std::to_string(p->sides));
        }
        if (f.walk.size() < 3 && !f.external) fail("face " + f.id + " has fewer than 3 sides");
        for (std::size_t i = 0; i < f.walk.size(); ++i) {
            int u = f.walk[i], v = f.walk[(i + 1) % f.walk.size()];
            if (u == v) fail("face " + f.id + " has a loop at " + c.vertex_ids[u]);
            directed[{u, v}]++;
        }
    }
    if (externals > 1) fail("more than one external face");
    for (auto [e, cnt] : directed) {
        if (cnt > 1) fail("edge " + c.vertex_ids[e.first] + "->" + c.vertex_ids[e.second] + " traversed twice");
        if (!directed.count({e.second, e.first}))
            fail("edge " + c.vertex_ids[e.first] + "-" + c.vertex_ids[e.second] + " lies on only one face");
    }
    if (rep.ok && c.euler_characteristic() != 2)
        fail("faces do not close up to a sphere (Euler characteristic " + std::to_string(c.euler_characteristic()) +
             ")");
    return rep;
}

// ---- subdivision ----

PlanarComplex subdivide_faces(const PlanarComplex& complex, const SubdivisionRule& rule,
                              const std::vector<std::string>& face_ids) {
    std::unordered_set<std::string> selected(face_ids.begin(), face_ids.end());
    const bool all = face_ids.empty();
    PlanarComplex out;
    out.level = complex.level;
    out.vertex_ids = complex.vertex_ids;
    out.birth = complex.birth;
    out.vertex_index = complex.vertex_index;
    out.ancestors = complex.ancestors;
    bool any = false;
    for (const auto& f : complex.faces) {
        if (f.external || (!all && !selected.count(f.id))) {
            out.faces.push_back(f);
            continue;
        }
        auto dit = rule.decomposition.find(f.type);
        if (dit == rule.decomposition.end()) throw ComplexError("face " + f.id + " has type missing from the rule: " + f.type);
        const int k = rule.sides(f.type);
        if (static_cast<int>(f.walk.size()) != k) throw ComplexError("face " + f.id + " does not match its type");
        const auto& dec = dit->second;
        std::vector<int> local(k + dec.interior.size());
        for (int j = 0; j < k; ++j) local[j] = f.walk[j];
        for (std::size_t i = 0; i < dec.interior.size(); ++i)
            local[k + i] = out.add_vertex(f.id + "@" + dec.interior[i], f.depth + 1);
        for (const auto& cell : dec.cells) {
            Face child{f.id + "." + std::to_string(cell.index), cell.type, {}, false, f.depth + 1};
            for (const auto& name : cell.typed) {
                int li = rule.local_index(f.type, name);
                if (li < 0) throw ComplexError("correspondence mismatch in cell " + child.id);
                child.walk.push_back(local[li]);
            }
            if (static_cast<int>(child.walk.size()) != rule.sides(cell.type))
                throw ComplexError("correspondence mismatch in cell " + child.id);
            out.level = std::max(out.level, child.depth);
            out.faces.push_back(std::move(child));
        }
        out.ancestors.emplace(f.id, f);
        any = true;
    }
    if (all && any) out.level = complex.level + 1;
    return out;
}

PlanarComplex subdivide(const PlanarComplex& complex, const SubdivisionRule& rule) {
    return subdivide_faces(complex, rule, {});
}

PlanarComplex iterate_subdivision(const PlanarComplex& complex, const SubdivisionRule& rule, int n) {
    if (n < 0) throw ComplexError("negative subdivision count");
    PlanarComplex c = complex;
    for (int i = 0; i < n; ++i) c = subdivide(c, rule);
    return c;
}

// ---- predicates ----

PredicateReport is_simple(const SubdivisionRule& rule, int max_depth) {
    PredicateReport rep;
    rep.depth = max_depth;
    for (const auto& p : rule.polygons) {
        PlanarComplex c = polygon_complex(rule, p.id);
        for (int n = 0; n <= max_depth; ++n) {
            if (n > 0) c = subdivide(c, rule);
            std::map<std::pair<int, int>, int> directed;
            for (const auto& f : c.faces) {
                for (std::size_t i = 0; i < f.walk.size(); ++i) {
                    int u = f.walk[i], v = f.walk[(i + 1) % f.walk.size()];
                    if (u == v) {
                        rep.violated = true;
                        rep.depth = n;
                        rep.witness = "loop at " + c.vertex_ids[u] + " in face " + f.id + " of G^" +
                                      std::to_string(n) + "(" + p.id + ")";
                        return rep;
                    }
                    if (++directed[{u, v}] > 1) {
                        rep.violated = true;
                        rep.depth = n;
                        rep.witness = "multiple edges " + c.vertex_ids[u] + "-" + c.vertex_ids[v] + " in G^" +
                                      std::to_string(n) + "(" + p.id + ")";
                        return rep;
                    }
                }
            }
        }
    }
    return rep;
}

PredicateReport is_irreducible(const SubdivisionRule& rule, int max_depth) {
    PredicateReport rep;
    rep.depth = max_depth;
    for (const auto& p : rule.polygons) {
        const int k = p.sides;
        PlanarComplex c = polygon_complex(rule, p.id);
        for (int n = 0; n <= max_depth; ++n) {
            if (n > 0) c = subdivide(c, rule);
            for (const auto& f : c.faces) {
                if (f.external) continue;
                for (std::size_t i = 0; i < f.walk.size(); ++i) {
                    int u = f.walk[i], v = f.walk[(i + 1) % f.walk.size()];
                    // Level-0 vertices of G^n(P) are the polygon corners, indices 0..k-1.
                    if (u >= k || v >= k) continue;
                    int d = ((v - u) % k + k) % k;
                    if (d == 1 || d == k - 1) continue;
                    rep.violated = true;
                    rep.depth = n;
                    rep.witness = "edge " + c.vertex_ids[u] + "-" + c.vertex_ids[v] + " joins boundary vertices of " +
                                  p.id + " in face " + f.id;
                    return rep;
                }
            }
        }
    }
    return rep;
}

std::string to_string(Acylindricity a) {
    switch (a) {
        case Acylindricity::certified: return "certified-acylindrical";
        case Acylindricity::suspected_cylindrical: return "suspected-cylindrical";
        case Acylindricity::inconclusive: return "inconclusive";
    }
    return "inconclusive";
}

AcylindricityReport is_acylindrical(const SubdivisionRule& rule, int max_depth, int path_length) {
    AcylindricityReport rep;
    std::map<std::string, std::vector<PlanarComplex>> levels;
    for (const auto& p : rule.polygons) levels[p.id] = levels_of(rule, polygon_complex(rule, p.id), max_depth);

    struct Pair {
        std::string poly;
        int v, w;
    };
    auto arcs_connected = [](const PlanarComplex& c, int k, int v, int w) {
        auto adj = c.adjacency();
        std::vector<bool> seen(c.vertex_count(), false);
        std::deque<int> q;
        for (int j = v + 1; j < w; ++j) {
            seen[j] = true;
            q.push_back(j);
        }
        seen[v] = seen[w] = true;
        while (!q.empty()) {
            int x = q.front();
            q.pop_front();
            for (int y : adj[x]) {
                if (seen[y]) continue;
                if (y < k && (y > w || y < v)) return true;
                seen[y] = true;
                q.push_back(y);
            }
        }
        return false;
    };

    std::vector<Pair> failing;
    for (int K = 0; K <= max_depth; ++K) {
        failing.clear();
        for (const auto& p : rule.polygons) {
            const int k = p.sides;
            for (int v = 0; v < k; ++v)
                for (int w = v + 2; w < k; ++w) {
                    if (v == 0 && w == k - 1) continue;
                    if (!arcs_connected(levels[p.id][K], k, v, w)) failing.push_back({p.id, v, w});
                }
        }
        if (failing.empty()) {
            rep.verdict = Acylindricity::certified;
            rep.certified_depth = K;
            std::ostringstream os;
            os << "all boundary arcs reconnect at level " << K;
            rep.witness = os.str();
            return rep;
        }
    }

    for (const auto& pr : failing) {
        const int k = rule.sides(pr.poly);
        std::vector<int> counts;
        for (int n = 1; n <= max_depth; ++n) {
            const auto& c = levels[pr.poly][n];
            std::vector<bool> forbidden(c.vertex_count(), false);
            for (int j = 0; j < k; ++j) forbidden[j] = j != pr.v && j != pr.w;
            counts.push_back(greedy_disjoint_paths(c, pr.v, pr.w, forbidden, path_length));
        }
        rep.path_counts.push_back(counts);
        for (std::size_t i = 0; i + 1 < counts.size(); ++i) {
            if (counts[i] >= 3 && counts[i + 1] >= counts[i] &&
                rep.verdict != Acylindricity::suspected_cylindrical) {
                rep.verdict = Acylindricity::suspected_cylindrical;
                std::ostringstream os;
                os << "polygon " << pr.poly << " vertices " << pr.v << "," << pr.w << ": disjoint paths";
                for (int cnt : counts) os << ' ' << cnt;
                os << " at levels 1.." << max_depth;
                rep.witness = os.str();
            }
        }
    }
    if (rep.verdict != Acylindricity::suspected_cylindrical) {
        std::ostringstream os;
        os << "polygon " << failing.front().poly << " vertices " << failing.front().v << "," << failing.front().w
           << " still separate at level " << max_depth;
        rep.witness = os.str();
    }
    return rep;
}

StandingReport check_standing_assumptions(const SubdivisionRule& rule, const PlanarComplex* complex, int max_depth) {
    StandingReport rep;
    std::map<std::string, std::vector<PlanarComplex>> levels;
    for (const auto& p : rule.polygons) levels[p.id] = levels_of(rule, polygon_complex(rule, p.id), max_depth);

    for (auto& [id, ls] : levels) {
        for (const auto& c : ls) {
            if (rep.s1 && !faces_are_polygons(c, rep.s1_witness)) rep.s1 = false;
        }
    }
    if (complex) {
        bool ok = true;
        PlanarComplex c = *complex;
        for (int n = 0; n <= max_depth && ok; ++n) {
            if (n > 0) c = subdivide(c, rule);
            ok = faces_are_polygons(c, rep.s1_prime_witness);
        }
        rep.s1_prime = ok;
    }

    auto holds_at = [&](int power, std::string& witness) {
        for (auto& [id, ls] : levels)
            if (!nested_boundaries_ok(ls, power, witness)) return false;
        return true;
    };
    rep.s2 = holds_at(1, rep.s2_witness);
    rep.s2_power = rep.s2 ? 1 : 0;
    if (!rep.s2) {
        for (int power = 2; power <= max_depth; ++power) {
            std::string w;
            if (holds_at(power, w)) {
                rep.s2_power = power;
                break;
            }
        }
    }
    return rep;
}

// ---- gluing ----

PlanarComplex glue_spherical(const PlanarComplex& a, const PlanarComplex& b,
                             const std::map<std::string, std::string>& identification, const std::string& prefix_b) {
    int ea = a.external_face(), eb = b.external_face();
    if (ea < 0 || eb < 0) throw ComplexError("gluing needs two complexes with external faces");
    const auto& wa = a.faces[ea].walk;
    const auto& wb = b.faces[eb].walk;
    if (wa.size() != wb.size()) throw ComplexError("boundary length mismatch in gluing");

    std::set<std::string> a_boundary;
    for (int v : wa) a_boundary.insert(a.vertex_ids[v]);
    std::set<std::string> images;
    for (int v : wb) {
        auto it = identification.find(b.vertex_ids[v]);
        if (it == identification.end())
            throw ComplexError("identification misses boundary vertex " + b.vertex_ids[v]);
        if (!a_boundary.count(it->second))
            throw ComplexError("identification target " + it->second + " is not on the boundary");
        images.insert(it->second);
    }
    if (images.size() != wa.size()) throw ComplexError("identification is not a bijection");

    PlanarComplex out;
    out.level = std::max(a.level, b.level);
    for (std::size_t v = 0; v < a.vertex_count(); ++v) out.add_vertex(a.vertex_ids[v], a.birth[v]);
    std::vector<int> bmap(b.vertex_count());
    std::set<int> b_boundary(wb.begin(), wb.end());
    for (std::size_t v = 0; v < b.vertex_count(); ++v) {
        if (b_boundary.count(static_cast<int>(v))) {
            bmap[v] = out.vertex(identification.at(b.vertex_ids[v]));
        } else {
            std::string id = prefix_b + b.vertex_ids[v];
            if (out.find_vertex(id) >= 0) throw ComplexError("vertex id collision in gluing: " + id);
            bmap[v] = out.add_vertex(id, b.birth[v]);
        }
    }
    for (const auto& f : a.faces)
        if (!f.external) out.faces.push_back(f);
    out.ancestors = a.ancestors;
    for (const auto& f : b.faces) {
        if (f.external) continue;
        Face g = f;
        g.id = prefix_b + f.id;
        if (out.find_face(g.id) >= 0) throw ComplexError("face id collision in gluing: " + g.id);
        for (int& v : g.walk) v = bmap[v];
        out.faces.push_back(std::move(g));
    }
    for (const auto& [id, f] : b.ancestors) {
        Face g = f;
        g.id = prefix_b + id;
        for (int& v : g.walk) v = bmap[v];
        out.ancestors.emplace(g.id, std::move(g));
    }
    auto rep = validate_complex(out);
    if (!rep.ok) throw ComplexError("orientation conflict in gluing: " + rep.violations.front());
    return out;
}

// ---- correspondences ----

RuleAutomorphism rule_automorphism(const SubdivisionRule& rule, const std::string& polygon, int rotation) {
    const int k = rule.sides(polygon);
    rotation = ((rotation % k) + k) % k;
    const auto& dec = rule.decomposition.at(polygon);
    auto cells = local_cells(rule, polygon);
    const int ni = static_cast<int>(dec.interior.size());
    std::vector<int> perm(ni);
    std::iota(perm.begin(), perm.end(), 0);
    do {
        RuleAutomorphism aut;
        aut.vertex.resize(k + ni);
        for (int j = 0; j < k; ++j) aut.vertex[j] = (j + rotation) % k;
        for (int i = 0; i < ni; ++i) aut.vertex[k + i] = k + perm[i];
        aut.cell.assign(cells.size(), -1);
        aut.cell_offset.assign(cells.size(), 0);
        std::vector<bool> taken(cells.size(), false);
        bool ok = true;
        for (std::size_t c = 0; c < cells.size() && ok; ++c) {
            std::vector<int> image;
            for (int li : cells[c]) image.push_back(aut.vertex[li]);
            ok = false;
            for (std::size_t d = 0; d < cells.size(); ++d) {
                int off = 0;
                if (taken[d] || dec.cells[d].type != dec.cells[c].type) continue;
                if (rotation_of(image, cells[d], off)) {
                    taken[d] = true;
                    aut.cell[c] = static_cast<int>(d);
                    aut.cell_offset[c] = off;
                    ok = true;
                    break;
                }
            }
        }
        if (ok) return aut;
    } while (std::next_permutation(perm.begin(), perm.end()));
    throw ComplexError("rule has no symmetry rotating polygon " + polygon + " by " + std::to_string(rotation));
}

std::vector<int> transport(const SubdivisionRule& rule, const PlanarComplex& from, const PlanarComplex& to,
                           const std::vector<FacePiece>& pieces) {
    std::vector<int> image(from.vertex_count(), -1);
    std::map<std::pair<std::string, int>, RuleAutomorphism> cache;
    auto automorphism = [&](const std::string& type, int off) -> const RuleAutomorphism& {
        auto key = std::make_pair(type, off);
        auto it = cache.find(key);
        if (it == cache.end()) it = cache.emplace(key, rule_automorphism(rule, type, off)).first;
        return it->second;
    };
    auto index = [](const PlanarComplex& c) {
        std::unordered_map<std::string, const Face*> m;
        for (const auto& f : c.faces) m.emplace(f.id, &f);
        for (const auto& [id, f] : c.ancestors) m.emplace(id, &f);
        return m;
    };
    const auto from_faces = index(from), to_faces = index(to);
    auto lookup = [](const std::unordered_map<std::string, const Face*>& m, const std::string& id) -> const Face* {
        auto it = m.find(id);
        return it == m.end() ? nullptr : it->second;
    };
    std::vector<std::tuple<std::string, std::string, int>> stack;
    for (const auto& p : pieces) stack.emplace_back(p.source, p.target, p.offset);
    while (!stack.empty()) {
        auto [sid, tid, off] = stack.back();
        stack.pop_back();
        const Face* s = lookup(from_faces, sid);
        const Face* t = lookup(to_faces, tid);
        if (!s || !t) throw ComplexError("unknown face in correspondence: " + (s ? tid : sid));
        if (s->type != t->type) throw ComplexError("type mismatch between faces " + sid + " and " + tid);
        const int k = static_cast<int>(s->walk.size());
        off = ((off % k) + k) % k;
        for (int j = 0; j < k; ++j) {
            int v = s->walk[j], w = t->walk[(j + off) % k];
            if (image[v] >= 0 && image[v] != w)
                throw ComplexError("transport ambiguity at vertex " + from.vertex_ids[v] + " (face " + sid + ")");
            image[v] = w;
        }
        if (from.ancestors.count(sid) && to.ancestors.count(tid)) {
            const auto& aut = automorphism(s->type, off);
            const auto& cells = rule.decomposition.at(s->type).cells;
            for (std::size_t c = cells.size(); c-- > 0;)
                stack.emplace_back(sid + "." + std::to_string(cells[c].index),
                                   tid + "." + std::to_string(cells[aut.cell[c]].index), aut.cell_offset[c]);
        }
    }
    return image;
}

SubdivisionHomomorphism build_homomorphism(const std::map<std::string, std::string>& vertex_map,
                                           const PlanarComplex& g1, const PlanarComplex& g0) {
    SubdivisionHomomorphism h;
    h.vertex_map.assign(g1.vertex_count(), -1);
    for (std::size_t v = 0; v < g1.vertex_count(); ++v) {
        auto it = vertex_map.find(g1.vertex_ids[v]);
        if (it == vertex_map.end()) throw ComplexError("vertex map undefined at " + g1.vertex_ids[v]);
        int w = g0.find_vertex(it->second);
        if (w < 0) throw ComplexError("vertex map target " + it->second + " is not a vertex of the base complex");
        h.vertex_map[v] = w;
    }
    auto adj0 = g0.adjacency();
    for (auto [u, v] : g1.edges()) {
        int a = h.vertex_map[u], b = h.vertex_map[v];
        if (a == b || !std::binary_search(adj0[a].begin(), adj0[a].end(), b))
            h.violations.push_back("edge " + g1.vertex_ids[u] + "-" + g1.vertex_ids[v] + " maps to non-edge " +
                                   g0.vertex_ids[a] + "-" + g0.vertex_ids[b]);
    }
    h.face_map.assign(g1.faces.size(), -1);
    h.face_offset.assign(g1.faces.size(), 0);
    for (std::size_t f = 0; f < g1.faces.size(); ++f) {
        const auto& face = g1.faces[f];
        if (face.external) continue;
        std::vector<int> img;
        for (int v : face.walk) img.push_back(h.vertex_map[v]);
        int rotated = -1;
        for (std::size_t g = 0; g < g0.faces.size(); ++g) {
            const auto& target = g0.faces[g];
            int off = 0;
            if (target.external || !rotation_of(img, target.walk, off)) continue;
            if (off == 0 && target.type == face.type) {
                h.face_map[f] = static_cast<int>(g);
                break;
            }
            rotated = static_cast<int>(g);
        }
        if (h.face_map[f] < 0) {
            if (rotated >= 0)
                h.violations.push_back("face " + face.id + " maps onto " + g0.faces[rotated].id +
                                       " with mismatched boundary correspondence");
            else
                h.violations.push_back("face " + face.id + " does not map onto a face");
        }
    }
    return h;
}

bool is_descendant_id(const std::string& id, const std::string& ancestor) {
    return id == ancestor || (id.size() > ancestor.size() && id.compare(0, ancestor.size(), ancestor) == 0 &&
                              id[ancestor.size()] == '.');
}

std::vector<int> descendant_faces(const PlanarComplex& deep, const std::string& ancestor_id) {
    std::vector<int> out;
    for (std::size_t i = 0; i < deep.faces.size(); ++i)
        if (!deep.faces[i].external && is_descendant_id(deep.faces[i].id, ancestor_id)) out.push_back(static_cast<int>(i));
    return out;
}

std::vector<int> vertices_of_faces(const PlanarComplex& c, const std::vector<int>& faces) {
    std::set<int> s;
    for (int f : faces) s.insert(c.faces[f].walk.begin(), c.faces[f].walk.end());
    return {s.begin(), s.end()};
}

}  // namespace gf
