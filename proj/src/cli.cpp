#include "gasket_forge/cli.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <filesystem>
#include <iostream>
#include <sstream>

#include "gasket_forge/catalog.hpp"
#include "gasket_forge/formats.hpp"
#include "gasket_forge/gallery.hpp"
#include "gasket_forge/markov.hpp"
#include "gasket_forge/packing.hpp"
#include "gasket_forge/render.hpp"
#include "gasket_forge/tiles.hpp"

namespace gf {

namespace {

// Input problems map to exit code 2.
struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::string num(double x) { return svg_real(x); }

std::string load(const std::string& path) {
    if (path.empty()) throw IoError("missing input path");
    try {
        return read_file(path);
    } catch (const std::ios_base::failure& e) {
        throw IoError(e.what());
    }
}

void save(const std::string& path, const std::string& content) {
    try {
        if (auto dir = std::filesystem::path(path).parent_path(); !dir.empty()) std::filesystem::create_directories(dir);
        write_file(path, content);
    } catch (const std::exception& e) {
        throw IoError(e.what());
    }
}

const PlanarComplex& builtin_or_throw(const std::string& name) {
    if (name == "g1") return builtin().g1;
    if (name == "g2") return builtin().g2;
    throw IoError("unknown builtin complex '" + name + "' (expected g1 or g2)");
}

struct Common {
    int level = -1;
    int depth = -1;
    double eps = 1e-10;
    long max_iter = 1000000;
    double tol = 1e-6;
    std::string out;
    std::string builtin;
};

void add_common(CLI::App* cmd, Common& c) {
    cmd->add_option("--level", c.level, "subdivision level");
    cmd->add_option("--depth", c.depth, "tile or word depth");
    cmd->add_option("--eps", c.eps, "solver angle-sum tolerance");
    cmd->add_option("--max-iter", c.max_iter, "solver sweep cap");
    cmd->add_option("--tol", c.tol, "classification tolerance");
    cmd->add_option("--out", c.out, "output path");
    cmd->add_option("--builtin", c.builtin, "built-in input (g1, g2; quad, cylindrical for rules)");
}

int level_or(const Common& c, int fallback) { return c.level >= 0 ? c.level : fallback; }
int depth_or(const Common& c, int fallback) { return c.depth >= 0 ? c.depth : fallback; }

PackOptions pack_options(const Common& c) {
    PackOptions opt;
    opt.solver.epsilon = c.eps;
    opt.solver.max_iterations = c.max_iter;
    return opt;
}

// ---- validate ----

int cmd_validate(const std::string& path, const Common& c, std::ostream& out) {
    SubdivisionRule rule;
    std::string name = path;
    if (!c.builtin.empty()) {
        if (c.builtin == "quad") rule = builtin().rule;
        else if (c.builtin == "cylindrical") rule = builtin().cylindrical_rule;
        else throw IoError("unknown builtin rule '" + c.builtin + "' (expected quad or cylindrical)");
        name = "builtin:" + c.builtin;
    } else {
        rule = parse_rule(load(path));
    }
    const int depth = depth_or(c, 3);
    ValidationReport v = validate_rule(rule);
    std::ostringstream kv;
    kv << "rule=" << name << "\nwell_formed=" << (v.ok ? 1 : 0) << "\n";
    for (const auto& s : v.violations) kv << "violation=" << s << "\n";
    if (!v.ok) {
        out << name << ": not a well-formed subdivision rule (" << v.violations.front() << ")\n" << kv.str();
        out << "verdict=fail\n";
        return kExitFailed;
    }
    PredicateReport simple = is_simple(rule, depth);
    PredicateReport irreducible = is_irreducible(rule, depth);
    AcylindricityReport acyl = is_acylindrical(rule, depth);
    StandingReport standing = check_standing_assumptions(rule, nullptr, depth);
    const bool ok = acyl.verdict == Acylindricity::certified;
    kv << "simple=" << (simple.violated ? 0 : 1) << "\n";
    if (simple.violated) kv << "simple_witness=" << simple.witness << "\n";
    kv << "irreducible=" << (irreducible.violated ? 0 : 1) << "\n";
    if (irreducible.violated) kv << "irreducible_witness=" << irreducible.witness << "\n";
    kv << "acylindrical=" << to_string(acyl.verdict) << "\n";
    if (acyl.verdict == Acylindricity::certified) kv << "acylindrical_depth=" << acyl.certified_depth << "\n";
    if (!acyl.witness.empty()) kv << "acylindrical_witness=" << acyl.witness << "\n";
    kv << "s1=" << (standing.s1 ? 1 : 0) << "\ns2=" << (standing.s2 ? 1 : 0) << "\ns2_power=" << standing.s2_power
       << "\ndepth=" << depth << "\nverdict=" << (ok ? "ok" : "fail") << "\n";
    out << name << ": well-formed, " << (simple.violated ? "not simple" : "simple") << ", "
        << (irreducible.violated ? "reducible" : "irreducible") << ", " << to_string(acyl.verdict) << "\n"
        << kv.str();
    return ok ? kExitOk : kExitFailed;
}

// ---- pack ----

int cmd_pack(const std::string& path, const std::string& rule_path, const Common& c, std::ostream& out,
             std::ostream& err) {
    PlanarComplex base;
    if (!c.builtin.empty()) base = builtin_or_throw(c.builtin);
    else base = parse_complex(load(path));
    SubdivisionRule rule = rule_path.empty() ? builtin().rule : parse_rule(load(rule_path));
    const int level = level_or(c, 0);
    PlanarComplex complex = level > 0 ? iterate_subdivision(base, rule, level) : base;
    Packing p = pack_complex(complex, pack_options(c));
    std::string text = format_packing(p);
    std::ostream& report = c.out.empty() ? err : out;
    if (c.out.empty()) out << text;
    else save(c.out, text);
    report << "circles=" << p.circles.size() << "\nedges=" << p.edges.size() << "\nlevel=" << level
           << "\ntangency_residual=" << num(p.tangency_residual) << "\nangle_residual=" << num(p.angle_residual)
           << "\nconverged=" << (p.converged ? 1 : 0) << "\n";
    return p.converged ? kExitOk : kExitFailed;
}

// ---- render ----

struct RenderFlags {
    double cx = 0.0, cy = 0.0;
    double half_width = 0.0;  // 0: fit to the input
    double stroke = 0.0, point_size = 0.0;
    bool fill = false;
    std::size_t max_elements = 200000;
    int pixels = 800;
    std::string cloud_out;
};

RenderSpec spec_for(const RenderFlags& f, RenderSpec fitted) {
    RenderSpec s = fitted;
    if (f.half_width > 0.0) {
        s.center = cplx(f.cx, f.cy);
        s.half_width = f.half_width;
        s.stroke = s.point_size = 0.002 * f.half_width;
    }
    if (f.stroke > 0.0) s.stroke = f.stroke;
    if (f.point_size > 0.0) s.point_size = f.point_size;
    s.fill = f.fill;
    s.max_elements = f.max_elements;
    s.pixels = f.pixels;
    return s;
}

RenderSpec fit_points(const std::vector<cplx>& pts) {
    RenderSpec s;
    if (pts.empty()) return s;
    double lx = 1e300, hx = -1e300, ly = 1e300, hy = -1e300;
    for (auto z : pts) {
        lx = std::min(lx, z.real());
        hx = std::max(hx, z.real());
        ly = std::min(ly, z.imag());
        hy = std::max(hy, z.imag());
    }
    s.center = cplx(0.5 * (lx + hx), 0.5 * (ly + hy));
    s.half_width = std::max(0.55 * std::max(hx - lx, hy - ly), 1e-9);
    s.stroke = s.point_size = 0.002 * s.half_width;
    return s;
}

int cmd_render(const std::string& path, const Common& c, const RenderFlags& f, std::ostream& out, std::ostream& err) {
    std::string svg;
    if (!c.builtin.empty()) {
        // Limit-set cloud of a built-in packing.
        const int level = level_or(c, 3);
        PlanarComplex complex = iterate_subdivision(builtin_or_throw(c.builtin), builtin().rule, level);
        Packing p = pack_complex(complex, pack_options(c));
        PointCloud cloud = limit_set_cloud(p, complex, level, depth_or(c, 2));
        if (!f.cloud_out.empty()) save(f.cloud_out, format_cloud(cloud));
        svg = render_cloud_svg(cloud, spec_for(f, fit_points(cloud.points)));
    } else {
        std::string text = load(path);
        std::istringstream head(text);
        std::string kind;
        head >> kind;
        if (kind == "packing") {
            Packing p = parse_packing(text);
            svg = render_packing_svg(p, spec_for(f, fit_viewport(p.circles)));
        } else if (kind == "cloud") {
            PointCloud cloud = parse_cloud(text);
            svg = render_cloud_svg(cloud, spec_for(f, fit_points(cloud.points)));
        } else {
            throw ParseError(path + ": line 1: expected a packing or cloud header");
        }
    }
    if (svg.find("<!-- truncated") != std::string::npos) err << "warning: element cap reached, output truncated\n";
    if (c.out.empty()) out << svg;
    else save(c.out, svg);
    return kExitOk;
}

// ---- stats ----

struct StatsFlags {
    bool asymptotics = false, tiles = false, contraction = false, symmetry = false;
    bool model = false;
    int count = 100;
    std::vector<std::string> inputs;
};

int stats_asymptotics(const Common& c, const StatsFlags& s, std::ostream& out) {
    if (s.model) {
        AsymptoticsFit fit = fit_asymptotics(model_parabolic_sequence(s.count), SpherePoint(0.0));
        out << format_asymptotics(fit);
        bool ok = std::abs(fit.s_d + 1.0) <= 1e-12 && std::abs(fit.s_g + 2.0) <= 1e-12;
        out << "s_d=" << num(fit.s_d) << "\ns_g=" << num(fit.s_g) << "\nbrackets=" << (ok ? 1 : 0) << "\n";
        return ok ? kExitOk : kExitFailed;
    }
    const auto& cat = builtin();
    InvariantCircleRun run = invariant_circle_asymptotics(cat.rule, cat.g1, cat.s_map, cat.period_two_vertex, 2, "B",
                                                          s.count, level_or(c, 8));
    out << format_asymptotics(run.fit);
    bool ok = run.fit.s_d >= -1.15 && run.fit.s_d <= -0.85 && run.fit.s_g >= -2.2 && run.fit.s_g <= -1.8;
    out << "vertices=" << run.vertices << "\ntangency_residual=" << num(run.tangency_residual)
        << "\ns_d=" << num(run.fit.s_d) << "\ns_g=" << num(run.fit.s_g) << "\nbrackets=" << (ok ? 1 : 0) << "\n";
    return ok ? kExitOk : kExitFailed;
}

int stats_tiles(const Common& c, const StatsFlags& s, std::ostream& out) {
    PlanarComplex complex;
    Packing p;
    if (!s.inputs.empty()) {
        if (s.inputs.size() != 2) throw IoError("--tiles takes a packing file and its complex file");
        p = parse_packing(load(s.inputs[0]));
        complex = parse_complex(load(s.inputs[1]));
    } else {
        const std::string name = c.builtin.empty() ? "g1" : c.builtin;
        complex = iterate_subdivision(builtin_or_throw(name), builtin().rule, level_or(c, 5));
        p = pack_complex(complex, pack_options(c));
    }
    if (complex.level < 1) throw GalleryError("tiles need a complex at level >= 1");
    const int depth = depth_or(c, 4);
    out << "# level tiles max_upper_diameter\n";
    bool ok = true;
    double prev = 0.0;
    for (int n = 1; n <= complex.level; ++n) {
        auto tiles = tiles_at_level(p, complex, n, depth);
        double m = max_upper_diameter(tiles);
        out << n << ' ' << tiles.size() << ' ' << num(m) << '\n';
        if (n > 1 && !(m < prev)) ok = false;
        prev = m;
    }
    out << "strictly_decreasing=" << (ok ? 1 : 0) << "\n";
    return ok ? kExitOk : kExitFailed;
}

int stats_contraction(const Common& c, std::ostream& out) {
    const auto& cat = builtin();
    const int level = level_or(c, 6);
    PlanarComplex c1 = iterate_subdivision(cat.g1, cat.rule, level);
    PlanarComplex c2 = iterate_subdivision(cat.g2, cat.rule, level);
    Packing p1 = pack_complex(c1, pack_options(c)), p2 = pack_complex(c2, pack_options(c));
    ContractionFit fit = contraction_fit(p1, c1, p2, c2, periodic_path("in", {1, 2}, level + 1));
    out << "# face proxy\n";
    for (const auto& [face, v] : fit.values) out << face << ' ' << num(v) << '\n';
    bool ok = fit.ratio > 0.0 && fit.ratio < 1.0;
    out << "slope=" << num(fit.slope) << "\nratio=" << num(fit.ratio) << "\nbrackets=" << (ok ? 1 : 0) << "\n";
    return ok ? kExitOk : kExitFailed;
}

int stats_symmetry(const Common& c, std::ostream& out) {
    const auto& cat = builtin();
    const int hi = level_or(c, 5);
    auto rows = symfit_table(cat, 3, hi);
    out << format_symfit(rows);
    // Parabolic sequence along the edge A-B of G2.
    out << "# level trace_defect residual kind\n";
    bool dec = true;
    double prev = 0.0;
    for (int n = 3; n <= hi; ++n) {
        PlanarComplex complex = iterate_subdivision(cat.g2, cat.rule, n);
        Packing p = pack_complex(complex, pack_options(c));
        auto seq = classify_periodic_faces(complex, periodic_path("in", {1, 2}, n + 1), 2);
        SymmetryEstimate e = estimate_mobius_symmetry(p, complex, cat.rule, seq, c.tol);
        out << n << ' ' << num(e.trace_defect) << ' ' << num(e.residual) << ' ' << to_string(e.kind) << '\n';
        if (n > 3 && !(e.trace_defect < prev)) dec = false;
        prev = e.trace_defect;
    }
    bool ok = dec;
    for (std::size_t i = 1; i < rows.size(); ++i) ok = ok && rows[i].m1 < rows[i - 1].m1 && rows[i].m2 < rows[i - 1].m2;
    out << "trace_defect_decreasing=" << (dec ? 1 : 0) << "\nbrackets=" << (ok ? 1 : 0) << "\n";
    return ok ? kExitOk : kExitFailed;
}

int cmd_stats(const Common& c, const StatsFlags& s, std::ostream& out) {
    int picked = s.asymptotics + s.tiles + s.contraction + s.symmetry;
    if (picked != 1) throw IoError("stats needs exactly one of --asymptotics, --tiles, --contraction, --symmetry");
    if (s.asymptotics) return stats_asymptotics(c, s, out);
    if (s.tiles) return stats_tiles(c, s, out);
    if (s.contraction) return stats_contraction(c, out);
    return stats_symmetry(c, out);
}

// ---- gallery ----

int cmd_gallery(const std::string& demo, const Common& c, std::ostream& out) {
    if (c.out.empty()) throw IoError("gallery needs --out <dir>");
    const auto& cat = builtin();
    DemoBundle bundle;
    if (demo == "snlo") {
        const int level = level_or(c, 4);
        PlanarComplex c1 = iterate_subdivision(cat.g1, cat.rule, level);
        PlanarComplex c2 = iterate_subdivision(cat.g2, cat.rule, level);
        Packing p1 = pack_complex(c1, pack_options(c)), p2 = pack_complex(c2, pack_options(c));
        bundle = local_equivalence_demo(p1, c1, p2, c2, cat.rule);
    } else if (demo == "qrsym") {
        CoverReport r = qr_symmetry_demo(cat, level_or(c, 2));
        bundle.files["cover.txt"] = format_cover(r);
        bundle.ok = r.faces_commute && r.levels_commute && r.inside && r.fiber_histogram.count(2) &&
                    r.source_faces.size() == 2 * r.target_faces.size();
        bundle.summary = "demo=qrsym\nlevel=" + std::to_string(r.level) + "\n";
    } else if (demo == "symfit") {
        const int level = level_or(c, 5);
        auto rows = symfit_table(cat, 3, level);
        bundle.files["symfit.txt"] = format_symfit(rows);
        bool dec = true;
        for (std::size_t i = 1; i < rows.size(); ++i) dec = dec && rows[i].m1 < rows[i - 1].m1 && rows[i].m2 < rows[i - 1].m2;

        PlanarComplex complex = iterate_subdivision(cat.g2, cat.rule, level);
        Packing p = pack_complex(complex, pack_options(c));
        GroupSymmetries s = fit_group_symmetries(p, complex, cat.rule);
        GroupOrbit orbit = group_limit_orbit(p, complex, cat.rule, s.m1.map, s.m2.map,
                                             {"A", "B", "C", "D", "in@x", "out@x"}, depth_or(c, 2));
        bundle.files["orbit.txt"] = format_orbit(orbit);
        SvgLayer packing{"packing", "#999999", p.circles, {}};
        SvgLayer orbit_layer{"orbit", "#c0392b", {}, {}};
        for (const auto& oc : orbit.circles) orbit_layer.circles.push_back(oc.circle);
        bundle.files["orbit.svg"] = render_svg({packing, orbit_layer}, fit_viewport(p.circles));
        bundle.ok = dec;
        bundle.summary = "demo=symfit\nlevel=" + std::to_string(level) + "\nstrictly_decreasing=" +
                         std::to_string(dec ? 1 : 0) + "\n";
    } else {
        throw IoError("unknown demo '" + demo + "' (expected snlo, qrsym or symfit)");
    }
    try {
        write_bundle(bundle, c.out);
    } catch (const std::exception& e) {
        throw IoError(e.what());
    }
    out << bundle.summary << "files=" << bundle.files.size() << "\nok=" << (bundle.ok ? 1 : 0) << "\n";
    return bundle.ok ? kExitOk : kExitFailed;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Circle packings of finite subdivision rules: solve, render, measure.", "gasket-forge"};
    app.require_subcommand(1);
    Common common;

    std::string rule_path;
    auto* validate = app.add_subcommand("validate", "check a subdivision rule");
    validate->add_option("rule", rule_path, "rule file");
    add_common(validate, common);

    std::string complex_path, pack_rule;
    auto* pack = app.add_subcommand("pack", "solve the circle packing of a complex");
    pack->add_option("complex", complex_path, "complex file");
    pack->add_option("--rule", pack_rule, "rule file used for --level > 0 (default: built-in quadrilateral rule)");
    add_common(pack, common);

    std::string render_path;
    RenderFlags rflags;
    auto* render = app.add_subcommand("render", "draw a packing or limit-set cloud as SVG");
    render->add_option("input", render_path, "packing or cloud file");
    render->add_option("--cx", rflags.cx, "viewport center x");
    render->add_option("--cy", rflags.cy, "viewport center y");
    render->add_option("--half-width", rflags.half_width, "viewport half-width (default: fit)");
    render->add_option("--stroke", rflags.stroke, "stroke width");
    render->add_option("--point-size", rflags.point_size, "cloud square size");
    render->add_flag("--fill", rflags.fill, "fill disks");
    render->add_option("--max-elements", rflags.max_elements, "element cap");
    render->add_option("--pixels", rflags.pixels, "image size");
    render->add_option("--cloud-out", rflags.cloud_out, "also save the generated cloud (with --builtin)");
    add_common(render, common);

    StatsFlags sflags;
    auto* stats = app.add_subcommand("stats", "asymptotics, tile, contraction and symmetry tables");
    stats->add_flag("--asymptotics", sflags.asymptotics);
    stats->add_flag("--tiles", sflags.tiles);
    stats->add_flag("--contraction", sflags.contraction);
    stats->add_flag("--symmetry", sflags.symmetry);
    stats->add_flag("--model", sflags.model, "asymptotics of the model sequence 1/n");
    stats->add_option("--count", sflags.count, "points in the asymptotics fit");
    stats->add_option("inputs", sflags.inputs, "packing and complex files (tiles)");
    add_common(stats, common);

    std::string demo;
    auto* gallery = app.add_subcommand("gallery", "built-in demos written to a directory");
    gallery->add_option("--demo", demo, "snlo, qrsym or symfit")->required();
    add_common(gallery, common);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitIo;
    }

    try {
        if (validate->parsed()) {
            if (rule_path.empty() && common.builtin.empty()) throw IoError("validate needs a rule file or --builtin");
            return cmd_validate(rule_path, common, out);
        }
        if (pack->parsed()) {
            if (complex_path.empty() && common.builtin.empty()) throw IoError("pack needs a complex file or --builtin");
            return cmd_pack(complex_path, pack_rule, common, out, err);
        }
        if (render->parsed()) {
            if (render_path.empty() && common.builtin.empty()) throw IoError("render needs an input file or --builtin");
            return cmd_render(render_path, common, rflags, out, err);
        }
        if (stats->parsed()) return cmd_stats(common, sflags, out);
        if (gallery->parsed()) return cmd_gallery(demo, common, out);
    } catch (const IoError& e) {
        err << "error: " << e.what() << "\n";
        return kExitIo;
    } catch (const ParseError& e) {
        err << "parse error: " << e.what() << "\n";
        return kExitIo;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kExitFailed;
    }
    return kExitIo;
}

CliResult run_cli(const std::vector<std::string>& args) {
    std::vector<const char*> argv{"gasket-forge"};
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream out, err;
    CliResult r;
    r.code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
    r.out = out.str();
    r.err = err.str();
    return r;
}

}  // namespace gf
