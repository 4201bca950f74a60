#include "gasket_forge/formats.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <sstream>
#include <vector>

namespace gf {

namespace {

struct Line {
    int number;
    std::vector<std::string> tokens;
};

std::vector<Line> tokenize(const std::string& text) {
    std::vector<Line> out;
    std::istringstream in(text);
    std::string raw;
    int n = 0;
    while (std::getline(in, raw)) {
        ++n;
        if (auto pos = raw.find('#'); pos != std::string::npos) raw.resize(pos);
        std::istringstream ls(raw);
        Line line{n, {}};
        std::string tok;
        while (ls >> tok) line.tokens.push_back(tok);
        if (!line.tokens.empty()) out.push_back(std::move(line));
    }
    return out;
}

[[noreturn]] void fail(int line, const std::string& msg) {
    throw ParseError("line " + std::to_string(line) + ": " + msg);
}

std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::string cur;
    for (char ch : s) {
        if (ch == ',') {
            if (!cur.empty()) out.push_back(cur);
            cur.clear();
        } else {
            cur += ch;
        }
    }
    if (!cur.empty()) out.push_back(cur);
    return out;
}

std::string join(const std::vector<std::string>& v) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + v[i];
    return s;
}

// key=value lookup among tokens[from..]
std::string keyed(const Line& l, const std::string& key, std::size_t from) {
    for (std::size_t i = from; i < l.tokens.size(); ++i) {
        const auto& t = l.tokens[i];
        if (t.size() > key.size() && t.compare(0, key.size() + 1, key + "=") == 0) return t.substr(key.size() + 1);
    }
    fail(l.number, "missing " + key + "=");
}

std::pair<std::string, int> cell_ref(const Line& l, const std::string& ref) {
    auto pos = ref.rfind('.');
    if (pos == std::string::npos || pos == 0 || pos + 1 == ref.size()) fail(l.number, "bad cell id " + ref);
    try {
        std::size_t used = 0;
        int j = std::stoi(ref.substr(pos + 1), &used);
        if (used != ref.size() - pos - 1 || j < 1) fail(l.number, "bad cell index in " + ref);
        return {ref.substr(0, pos), j};
    } catch (const std::logic_error&) {
        fail(l.number, "bad cell index in " + ref);
    }
}

}  // namespace

SubdivisionRule parse_rule(const std::string& text) {
    SubdivisionRule rule;
    std::map<std::pair<std::string, int>, std::map<int, std::string>> corr;
    for (const auto& l : tokenize(text)) {
        const auto& kw = l.tokens[0];
        if (kw == "polygon") {
            if (l.tokens.size() < 3) fail(l.number, "polygon needs an id and sides=");
            PolygonSpec p;
            p.id = l.tokens[1];
            if (p.id.find_first_of(".@") != std::string::npos) fail(l.number, "polygon id may not contain '.' or '@'");
            try {
                p.sides = std::stoi(keyed(l, "sides", 2));
            } catch (const std::logic_error&) {
                fail(l.number, "bad sides value");
            }
            if (rule.find_polygon(p.id)) fail(l.number, "duplicate polygon " + p.id);
            rule.polygons.push_back(p);
            rule.decomposition[p.id];
        } else if (kw == "interior") {
            if (l.tokens.size() < 2) fail(l.number, "interior needs a polygon id");
            auto& in = rule.decomposition[l.tokens[1]].interior;
            for (std::size_t i = 2; i < l.tokens.size(); ++i)
                for (auto& v : split_list(l.tokens[i])) in.push_back(v);
        } else if (kw == "cell") {
            if (l.tokens.size() < 4) fail(l.number, "cell needs id, type= and walk=");
            auto [pid, j] = cell_ref(l, l.tokens[1]);
            CellSpec c;
            c.index = j;
            c.type = keyed(l, "type", 2);
            c.walk = split_list(keyed(l, "walk", 2));
            if (c.walk.empty()) fail(l.number, "empty walk");
            auto& cells = rule.decomposition[pid].cells;
            for (const auto& other : cells)
                if (other.index == j) fail(l.number, "duplicate cell " + l.tokens[1]);
            cells.push_back(std::move(c));
        } else if (kw == "corr") {
            if (l.tokens.size() < 2) fail(l.number, "corr needs a cell id");
            auto key = cell_ref(l, l.tokens[1]);
            auto& m = corr[key];
            for (std::size_t i = 2; i < l.tokens.size(); ++i) {
                const auto& t = l.tokens[i];
                auto arrow = t.find("->");
                if (arrow == std::string::npos) fail(l.number, "bad correspondence " + t);
                int a = 0;
                try {
                    a = std::stoi(t.substr(0, arrow));
                } catch (const std::logic_error&) {
                    fail(l.number, "bad correspondence " + t);
                }
                if (!m.emplace(a, t.substr(arrow + 2)).second) fail(l.number, "repeated correspondence " + t);
            }
        } else {
            fail(l.number, "unknown keyword " + kw);
        }
    }
    if (rule.polygons.empty()) throw ParseError("empty rule file: no polygons declared");
    for (auto& [pid, dec] : rule.decomposition) {
        if (!rule.find_polygon(pid)) throw ParseError("cells or interior given for undeclared polygon " + pid);
        std::sort(dec.cells.begin(), dec.cells.end(), [](const CellSpec& a, const CellSpec& b) { return a.index < b.index; });
        for (auto& c : dec.cells) {
            auto it = corr.find({pid, c.index});
            if (it == corr.end()) {
                c.typed = c.walk;
                continue;
            }
            c.typed.assign(c.walk.size(), "");
            for (auto& [a, v] : it->second) {
                if (a < 0 || a >= static_cast<int>(c.walk.size()))
                    throw ParseError("correspondence of " + pid + "." + std::to_string(c.index) +
                                     " names type vertex " + std::to_string(a) + " out of range");
                c.typed[a] = v;
            }
        }
    }
    for (auto& [key, m] : corr) {
        bool found = false;
        for (const auto& c : rule.decomposition[key.first].cells) found = found || c.index == key.second;
        if (!found) throw ParseError("correspondence for unknown cell " + key.first + "." + std::to_string(key.second));
    }
    return rule;
}

std::string format_rule(const SubdivisionRule& rule) {
    std::ostringstream os;
    for (const auto& p : rule.polygons) os << "polygon " << p.id << " sides=" << p.sides << "\n";
    for (const auto& p : rule.polygons) {
        const auto& dec = rule.decomposition.at(p.id);
        if (!dec.interior.empty()) os << "interior " << p.id << " " << join(dec.interior) << "\n";
        for (const auto& c : dec.cells) {
            os << "cell " << p.id << "." << c.index << " type=" << c.type << " walk=" << join(c.walk) << "\n";
            os << "corr " << p.id << "." << c.index;
            for (std::size_t j = 0; j < c.typed.size(); ++j) os << " " << j << "->" << c.typed[j];
            os << "\n";
        }
    }
    return os.str();
}

PlanarComplex parse_complex(const std::string& text) {
    PlanarComplex c;
    std::vector<std::pair<int, std::vector<std::string>>> rots;
    std::vector<std::string> rot_owner;
    std::vector<std::pair<int, std::string>> externals;
    bool any = false;
    for (const auto& l : tokenize(text)) {
        const auto& kw = l.tokens[0];
        any = true;
        if (kw == "level") {
            if (l.tokens.size() != 2) fail(l.number, "level needs one value");
            try {
                c.level = std::stoi(l.tokens[1]);
            } catch (const std::logic_error&) {
                fail(l.number, "bad level");
            }
        } else if (kw == "vertex") {
            if (l.tokens.size() != 2) fail(l.number, "vertex needs one id");
            if (c.find_vertex(l.tokens[1]) >= 0) fail(l.number, "duplicate vertex " + l.tokens[1]);
            c.add_vertex(l.tokens[1]);
        } else if (kw == "rot") {
            if (l.tokens.size() < 4 || l.tokens[2] != "=") fail(l.number, "rot expects `rot <id> = <list>`");
            std::vector<std::string> nb;
            for (std::size_t i = 3; i < l.tokens.size(); ++i)
                for (auto& v : split_list(l.tokens[i])) nb.push_back(v);
            rots.emplace_back(l.number, nb);
            rot_owner.push_back(l.tokens[1]);
        } else if (kw == "face") {
            if (l.tokens.size() < 4) fail(l.number, "face needs id, type= and walk=");
            Face f;
            f.id = l.tokens[1];
            f.type = keyed(l, "type", 2);
            for (const auto& v : split_list(keyed(l, "walk", 2))) {
                int idx = c.find_vertex(v);
                if (idx < 0) fail(l.number, "unknown vertex " + v);
                f.walk.push_back(idx);
            }
            if (c.find_face(f.id) >= 0) fail(l.number, "duplicate face " + f.id);
            c.faces.push_back(std::move(f));
        } else if (kw == "external") {
            if (l.tokens.size() != 2) fail(l.number, "external needs one face id");
            externals.emplace_back(l.number, l.tokens[1]);
        } else {
            fail(l.number, "unknown keyword " + kw);
        }
    }
    if (!any) throw ParseError("empty complex file");
    for (auto& f : c.faces) f.depth = c.level;
    for (auto& [line, id] : externals) {
        int f = c.find_face(id);
        if (f < 0) fail(line, "external face " + id + " is not declared");
        c.faces[f].external = true;
        c.faces[f].type = "-";
    }
    if (!rots.empty()) {
        std::vector<std::vector<int>> derived;
        try {
            derived = c.rotation();
        } catch (const ComplexError& e) {
            throw ParseError(std::string("faces are inconsistent with rot data: ") + e.what());
        }
        for (std::size_t i = 0; i < rots.size(); ++i) {
            const auto& [line, nb] = rots[i];
            int v = c.find_vertex(rot_owner[i]);
            if (v < 0) fail(line, "unknown vertex " + rot_owner[i]);
            const auto& want = derived[v];
            bool ok = nb.size() == want.size();
            if (ok && !nb.empty()) {
                int first = c.find_vertex(nb[0]);
                auto it = std::find(want.begin(), want.end(), first);
                ok = it != want.end();
                for (std::size_t k = 0; ok && k < nb.size(); ++k)
                    ok = c.find_vertex(nb[k]) == want[(static_cast<std::size_t>(it - want.begin()) + k) % want.size()];
            }
            if (!ok) fail(line, "rot data for " + rot_owner[i] + " disagrees with the faces");
        }
    }
    return c;
}

std::string format_complex(const PlanarComplex& c) {
    std::ostringstream os;
    os << "level " << c.level << "\n";
    for (const auto& v : c.vertex_ids) os << "vertex " << v << "\n";
    std::vector<std::vector<int>> rot;
    try {
        rot = c.rotation();
    } catch (const ComplexError&) {
        rot.clear();
    }
    for (std::size_t v = 0; v < rot.size(); ++v) {
        if (rot[v].empty()) continue;
        os << "rot " << c.vertex_ids[v] << " =";
        for (std::size_t i = 0; i < rot[v].size(); ++i) os << (i ? "," : " ") << c.vertex_ids[rot[v][i]];
        os << "\n";
    }
    for (const auto& f : c.faces) {
        os << "face " << f.id << " type=" << (f.external ? "-" : f.type) << " walk=";
        for (std::size_t i = 0; i < f.walk.size(); ++i) os << (i ? "," : "") << c.vertex_ids[f.walk[i]];
        os << "\n";
    }
    for (const auto& f : c.faces)
        if (f.external) os << "external " << f.id << "\n";
    return os.str();
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::ios_base::failure("cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::ios_base::failure("cannot write " + path);
    out << content;
    if (!out) throw std::ios_base::failure("write failed for " + path);
}

}  // namespace gf
