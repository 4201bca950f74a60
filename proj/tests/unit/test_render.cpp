#include <doctest.h>

#include "gasket_forge/render.hpp"

using namespace gf;

namespace {

std::size_t count(const std::string& s, const std::string& what) {
    std::size_t n = 0;
    for (auto pos = s.find(what); pos != std::string::npos; pos = s.find(what, pos + 1)) ++n;
    return n;
}

}  // namespace

TEST_CASE("svg reals") {
    CHECK(svg_real(0.5) == "0.5");
    CHECK(svg_real(-0.0) == "0");
    CHECK(svg_real(1.0 / 3.0) == "0.333333333");
    CHECK(svg_real(123456789012.0) == "1.23456789e+11");
}

TEST_CASE("render spec validation") {
    RenderSpec s;
    s.half_width = 0.0;
    CHECK_THROWS_AS(s.check(), RenderError);
    s = RenderSpec{};
    s.max_elements = 0;
    CHECK_THROWS_AS(render_svg({}, s), RenderError);
}

TEST_CASE("empty cloud") {
    PointCloud cloud;
    std::string svg = render_cloud_svg(cloud, RenderSpec{});
    CHECK(svg.rfind("<?xml", 0) == 0);
    CHECK(svg.find("</svg>") != std::string::npos);
    CHECK(count(svg, "<rect") == 1);  // background only
    CHECK(count(svg, "<circle") == 0);
}

TEST_CASE("circles, lines and points") {
    Packing p;
    p.circles = {GenCircle::circle(cplx(0.5, 0.25), 0.25), GenCircle::line(cplx(0.0, -1.0), cplx(0.0, 1.0)),
                 GenCircle::circle(cplx(50.0, 0.0), 1.0)};
    std::string svg = render_packing_svg(p, RenderSpec{});
    CHECK(count(svg, "<circle") == 1);  // the far disk is culled
    CHECK(svg.find("cx=\"0.5\" cy=\"-0.25\" r=\"0.25\"") != std::string::npos);  // y flipped
    CHECK(count(svg, "<line") == 1);
    CHECK(svg.find("y1=\"1\"") != std::string::npos);
    CHECK(svg == render_packing_svg(p, RenderSpec{}));

    PointCloud cloud;
    cloud.points = {cplx(0.0, 0.0), cplx(0.1, 0.1), cplx(10.0, 0.0)};
    std::string cs = render_cloud_svg(cloud, RenderSpec{});
    CHECK(count(cs, "<rect") == 3);  // background + two visible points
}

TEST_CASE("element cap") {
    PointCloud cloud;
    for (int i = 0; i < 10; ++i) cloud.points.push_back(cplx(0.01 * i, 0.0));
    RenderSpec s;
    s.max_elements = 4;
    std::string svg = render_cloud_svg(cloud, s);
    CHECK(count(svg, "<rect") == 5);
    CHECK(svg.find("<!-- truncated: 6 elements over the cap of 4 -->") != std::string::npos);
}

TEST_CASE("viewport fit") {
    RenderSpec s = fit_viewport({GenCircle::circle(cplx(1.0, 1.0), 1.0), GenCircle::circle(cplx(3.0, 1.0), 1.0)});
    CHECK(s.center.real() == doctest::Approx(2.0));
    CHECK(s.center.imag() == doctest::Approx(1.0));
    CHECK(s.half_width == doctest::Approx(2.2));
}
