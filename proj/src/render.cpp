#include "gasket_forge/render.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

namespace gf {

void RenderSpec::check() const {
    if (!(half_width > 0.0) || !std::isfinite(half_width)) throw RenderError("viewport half-width must be positive");
    if (max_elements == 0) throw RenderError("element cap must be positive");
    if (pixels <= 0) throw RenderError("pixel size must be positive");
    if (!(stroke > 0.0) || !(point_size > 0.0)) throw RenderError("stroke and point size must be positive");
}

std::string svg_real(double x) {
    if (x == 0.0) x = 0.0;  // no "-0"
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.9g", x);
    return buf;
}

namespace {

// Clips the line {z : Re((z - a) conj(n)) = 0} to the square viewport; false if it misses.
bool clip_line(const GenCircle& l, const RenderSpec& s, cplx& p, cplx& q) {
    cplx dir = l.normal * cplx(0.0, 1.0);
    // Closest point of the line to the viewport center, then a segment long enough to cross it.
    cplx foot = s.center + l.normal * std::real((l.anchor - s.center) * std::conj(l.normal));
    if (std::abs(foot - s.center) > std::sqrt(2.0) * s.half_width) return false;
    double reach = 2.0 * s.half_width;
    p = foot - reach * dir;
    q = foot + reach * dir;
    return true;
}

bool visible(const GenCircle& c, const RenderSpec& s) {
    double d = std::abs(c.center - s.center);
    double r = c.abs_radius();
    double corner = std::sqrt(2.0) * s.half_width;
    if (d - r > corner) return false;     // entirely outside
    if (r - d > corner) return false;     // viewport strictly inside, circle does not cross it
    return true;
}

}  // namespace

std::string render_svg(const std::vector<SvgLayer>& layers, const RenderSpec& spec) {
    spec.check();
    std::ostringstream os;
    const double x0 = spec.center.real() - spec.half_width;
    const double y0 = -spec.center.imag() - spec.half_width;
    const double w = 2.0 * spec.half_width;
    os << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << spec.pixels << "\" height=\"" << spec.pixels
       << "\" viewBox=\"" << svg_real(x0) << ' ' << svg_real(y0) << ' ' << svg_real(w) << ' ' << svg_real(w)
       << "\">\n";
    os << "<rect x=\"" << svg_real(x0) << "\" y=\"" << svg_real(y0) << "\" width=\"" << svg_real(w) << "\" height=\""
       << svg_real(w) << "\" fill=\"#ffffff\"/>\n";

    std::size_t emitted = 0, dropped = 0;
    for (const auto& layer : layers) {
        os << "<g id=\"" << layer.name << "\" stroke=\"" << layer.color << "\" stroke-width=\"" << svg_real(spec.stroke)
           << "\" fill=\"" << (spec.fill ? layer.color : std::string("none")) << "\""
           << (spec.fill ? " fill-opacity=\"0.25\"" : "") << ">\n";
        for (const auto& c : layer.circles) {
            if (emitted >= spec.max_elements) {
                ++dropped;
                continue;
            }
            if (c.is_line()) {
                cplx p, q;
                if (!clip_line(c, spec, p, q)) continue;
                os << "<line x1=\"" << svg_real(p.real()) << "\" y1=\"" << svg_real(-p.imag()) << "\" x2=\""
                   << svg_real(q.real()) << "\" y2=\"" << svg_real(-q.imag()) << "\"/>\n";
            } else {
                if (!visible(c, spec)) continue;
                os << "<circle cx=\"" << svg_real(c.center.real()) << "\" cy=\"" << svg_real(-c.center.imag())
                   << "\" r=\"" << svg_real(c.abs_radius()) << "\"/>\n";
            }
            ++emitted;
        }
        os << "</g>\n";
        if (!layer.points.empty()) {
            os << "<g id=\"" << layer.name << "-points\" fill=\"" << layer.color << "\" stroke=\"none\">\n";
            const double h = 0.5 * spec.point_size;
            for (const auto& z : layer.points) {
                if (emitted >= spec.max_elements) {
                    ++dropped;
                    continue;
                }
                if (std::abs(z.real() - spec.center.real()) > spec.half_width ||
                    std::abs(z.imag() - spec.center.imag()) > spec.half_width)
                    continue;
                os << "<rect x=\"" << svg_real(z.real() - h) << "\" y=\"" << svg_real(-z.imag() - h) << "\" width=\""
                   << svg_real(spec.point_size) << "\" height=\"" << svg_real(spec.point_size) << "\"/>\n";
                ++emitted;
            }
            os << "</g>\n";
        }
    }
    if (dropped > 0) os << "<!-- truncated: " << dropped << " elements over the cap of " << spec.max_elements << " -->\n";
    os << "</svg>\n";
    return os.str();
}

std::string render_packing_svg(const Packing& p, const RenderSpec& spec) {
    SvgLayer layer;
    layer.name = "circles";
    layer.circles = p.circles;
    return render_svg({layer}, spec);
}

std::string render_cloud_svg(const PointCloud& cloud, const RenderSpec& spec) {
    SvgLayer layer;
    layer.name = "cloud";
    layer.points = cloud.points;
    return render_svg({layer}, spec);
}

RenderSpec fit_viewport(const std::vector<GenCircle>& circles, RenderSpec spec) {
    double lo_x = 1e300, hi_x = -1e300, lo_y = 1e300, hi_y = -1e300;
    for (const auto& c : circles) {
        if (c.is_line() || c.radius < 0) continue;
        lo_x = std::min(lo_x, c.center.real() - c.radius);
        hi_x = std::max(hi_x, c.center.real() + c.radius);
        lo_y = std::min(lo_y, c.center.imag() - c.radius);
        hi_y = std::max(hi_y, c.center.imag() + c.radius);
    }
    if (lo_x > hi_x) return spec;
    spec.center = cplx(0.5 * (lo_x + hi_x), 0.5 * (lo_y + hi_y));
    spec.half_width = 0.55 * std::max(hi_x - lo_x, hi_y - lo_y);
    if (!(spec.half_width > 0.0)) spec.half_width = 1.0;
    spec.stroke = spec.half_width * 0.002;
    spec.point_size = spec.half_width * 0.002;
    return spec;
}

}  // namespace gf
