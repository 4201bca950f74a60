#include <doctest.h>

#include <cmath>
#include <filesystem>

#include "gasket_forge/cli.hpp"
#include "gasket_forge/formats.hpp"
#include "gasket_forge/packing.hpp"

using namespace gf;
namespace fs = std::filesystem;

namespace {

std::string fixture(const std::string& name) { return std::string(GF_FIXTURE_DIR) + "/" + name; }

fs::path scratch(const std::string& name) {
    fs::path p = fs::temp_directory_path() / ("gf_cli_" + name);
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

bool has(const std::string& text, const std::string& what) { return text.find(what) != std::string::npos; }

}  // namespace

TEST_CASE("validate") {
    CliResult ok = run_cli({"validate", "--builtin", "quad"});
    CHECK(ok.code == kExitOk);
    CHECK(has(ok.out, "acylindrical=certified-acylindrical"));
    CHECK(has(ok.out, "verdict=ok"));

    CliResult cyl = run_cli({"validate", "--builtin", "cylindrical"});
    CHECK(cyl.code == kExitFailed);
    CHECK(has(cyl.out, "acylindrical=suspected-cylindrical"));

    CliResult grid = run_cli({"validate", fixture("grid2x2.rule")});
    CHECK(grid.code == kExitFailed);
    CHECK(has(grid.out, "boundary edge subdivided"));

    fs::path dir = scratch("validate");
    write_file((dir / "empty.rule").string(), "");
    CliResult empty = run_cli({"validate", (dir / "empty.rule").string()});
    CHECK(empty.code == kExitIo);
    CHECK(has(empty.err, "parse error"));

    write_file((dir / "bad.rule").string(), "polygon P sides=4\ncell P.1 nonsense\n");
    CliResult bad = run_cli({"validate", (dir / "bad.rule").string()});
    CHECK(bad.code == kExitIo);
    CHECK(has(bad.err, "line 2"));

    CHECK(run_cli({"validate", (dir / "missing.rule").string()}).code == kExitIo);
    CHECK(run_cli({"validate"}).code == kExitIo);
    CHECK(run_cli({"frobnicate"}).code == kExitIo);
}

TEST_CASE("pack") {
    fs::path dir = scratch("pack");
    const std::string out = (dir / "g1.packing").string();
    CliResult r = run_cli({"pack", "--builtin", "g1", "--level", "1", "--out", out});
    REQUIRE(r.code == kExitOk);
    Packing p = parse_packing(read_file(out));
    CHECK(p.circles.size() == 6);
    CHECK(has(read_file(out), "residuals tangency="));
    CHECK(has(r.out, "converged=1"));
    // Round trip is byte-identical.
    CHECK(format_packing(p) == read_file(out));

    CliResult k4 = run_cli({"pack", fixture("k4.complex")});
    REQUIRE(k4.code == kExitOk);
    Packing q = parse_packing(k4.out);
    REQUIRE(q.circles.size() == 4);
    for (std::size_t u = 0; u < 4; ++u)
        for (std::size_t v = u + 1; v < 4; ++v) CHECK(inversive_product(q.circles[u], q.circles[v]) == doctest::Approx(1.0));

    CHECK(run_cli({"pack", (dir / "nope.complex").string()}).code == kExitIo);
    CHECK(run_cli({"pack", "--builtin", "g7"}).code == kExitIo);
    CliResult starved = run_cli({"pack", "--builtin", "g1", "--level", "3", "--eps", "1e-300", "--max-iter", "1", "--out", out});
    CHECK(starved.code == kExitFailed);
    CHECK(has(starved.out, "converged=0"));
}

TEST_CASE("render") {
    fs::path dir = scratch("render");
    const std::string pk = (dir / "g2.packing").string();
    REQUIRE(run_cli({"pack", "--builtin", "g2", "--level", "2", "--out", pk}).code == kExitOk);
    CliResult a = run_cli({"render", pk});
    CliResult b = run_cli({"render", pk});
    REQUIRE(a.code == kExitOk);
    CHECK(a.out == b.out);
    CHECK(has(a.out, "<circle"));

    write_file((dir / "empty.cloud").string(), "cloud level=0 depth=0\n");
    CliResult e = run_cli({"render", (dir / "empty.cloud").string()});
    CHECK(e.code == kExitOk);
    CHECK(has(e.out, "</svg>"));

    CliResult capped = run_cli({"render", pk, "--max-elements", "3"});
    CHECK(capped.code == kExitOk);
    CHECK(has(capped.out, "<!-- truncated"));
    CHECK(has(capped.err, "warning"));

    const std::string cloud = (dir / "g2.cloud").string();
    CliResult gen = run_cli({"render", "--builtin", "g2", "--level", "2", "--depth", "1", "--cloud-out", cloud,
                             "--out", (dir / "g2.svg").string()});
    CHECK(gen.code == kExitOk);
    CHECK(run_cli({"render", cloud}).code == kExitOk);

    write_file((dir / "junk.txt").string(), "hello\n");
    CHECK(run_cli({"render", (dir / "junk.txt").string()}).code == kExitIo);
}

TEST_CASE("stats") {
    CliResult model = run_cli({"stats", "--asymptotics", "--model"});
    CHECK(model.code == kExitOk);
    CHECK(has(model.out, "s_d=-1\n"));
    CHECK(has(model.out, "s_g=-2\n"));

    CliResult tiles = run_cli({"stats", "--tiles", "--level", "4"});
    CHECK(tiles.code == kExitOk);
    CHECK(has(tiles.out, "strictly_decreasing=1"));

    CHECK(run_cli({"stats", "--tiles", "missing.packing", "missing.complex"}).code == kExitIo);
    CHECK(run_cli({"stats"}).code == kExitIo);
    CHECK(run_cli({"stats", "--tiles", "--symmetry"}).code == kExitIo);
}

TEST_CASE("gallery") {
    fs::path dir = scratch("gallery");
    CliResult snlo = run_cli({"gallery", "--demo", "snlo", "--level", "3", "--out", (dir / "snlo").string()});
    CHECK(snlo.code == kExitOk);
    CHECK(fs::exists(dir / "snlo" / "cross_ratios.txt"));
    CHECK(fs::exists(dir / "snlo" / "g2_out.svg"));

    CliResult q0 = run_cli({"gallery", "--demo", "qrsym", "--level", "0", "--out", (dir / "q").string()});
    CHECK(q0.code == kExitFailed);
    CliResult q2 = run_cli({"gallery", "--demo", "qrsym", "--level", "2", "--out", (dir / "q").string()});
    CHECK(q2.code == kExitOk);
    CHECK(has(read_file((dir / "q" / "cover.txt").string()), "fiber_2=4"));

    CliResult sf = run_cli({"gallery", "--demo", "symfit", "--level", "4", "--out", (dir / "sf").string()});
    CHECK(sf.code == kExitOk);
    CHECK(has(read_file((dir / "sf" / "symfit.txt").string()), "strictly_decreasing=1"));

    CHECK(run_cli({"gallery", "--demo", "nope", "--out", (dir / "x").string()}).code == kExitIo);
    CHECK(run_cli({"gallery", "--demo", "snlo"}).code == kExitIo);
}
