#pragma once

#include <string>
#include <vector>

#include "gasket_forge/mobius.hpp"
#include "gasket_forge/packing.hpp"
#include "gasket_forge/tiles.hpp"

namespace gf {

struct RenderError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct RenderSpec {
    cplx center{0.0, 0.0};
    double half_width = 2.0;    // chart units
    double stroke = 0.004;      // chart units
    double point_size = 0.004;  // side of a cloud square, chart units
    bool fill = false;
    std::size_t max_elements = 200000;
    int pixels = 800;

    void check() const;
};

// One drawing layer. Circles and lines are stroked in `color`; points are small squares.
struct SvgLayer {
    std::string name;
    std::string color = "#000000";
    std::vector<GenCircle> circles;
    std::vector<cplx> points;
};

// Reals in SVG output: 9 significant digits.
std::string svg_real(double x);

std::string render_svg(const std::vector<SvgLayer>& layers, const RenderSpec& spec);
std::string render_packing_svg(const Packing& p, const RenderSpec& spec);
std::string render_cloud_svg(const PointCloud& cloud, const RenderSpec& spec);

// Viewport that shows every bounded circle of the packing, with a small margin.
RenderSpec fit_viewport(const std::vector<GenCircle>& circles, RenderSpec spec = {});

}  // namespace gf
