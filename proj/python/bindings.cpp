#include <pybind11/complex.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "gasket_forge/catalog.hpp"
#include "gasket_forge/cli.hpp"
#include "gasket_forge/formats.hpp"
#include "gasket_forge/gallery.hpp"
#include "gasket_forge/mobius.hpp"
#include "gasket_forge/packing.hpp"
#include "gasket_forge/subdivision.hpp"

namespace py = pybind11;
using namespace gf;

namespace {

py::object point_to_py(const SpherePoint& p) {
    if (p.inf) return py::none();
    return py::cast(p.z);
}

SpherePoint point_from_py(const py::object& o) {
    if (o.is_none()) return SpherePoint::infinity();
    return SpherePoint(o.cast<cplx>());
}

}  // namespace

PYBIND11_MODULE(_gasket_forge, m) {
    m.doc() = "Circle packings from finite subdivision rules.";

    py::register_exception<ParseError>(m, "ParseError", PyExc_ValueError);
    py::register_exception<ComplexError>(m, "ComplexError", PyExc_ValueError);
    py::register_exception<SolverError>(m, "SolverError", PyExc_RuntimeError);
    py::register_exception<DegenerateInput>(m, "DegenerateInput", PyExc_ValueError);
    py::register_exception<GalleryError>(m, "GalleryError", PyExc_ValueError);

    py::class_<GenCircle>(m, "GenCircle")
        .def_static("circle", &GenCircle::circle, py::arg("center"), py::arg("radius"),
                    py::arg("unbounded_disk") = false)
        .def_static("line", &GenCircle::line, py::arg("anchor"), py::arg("normal"))
        .def_property_readonly("is_line", &GenCircle::is_line)
        .def_readonly("center", &GenCircle::center)
        .def_readonly("radius", &GenCircle::radius)
        .def_readonly("anchor", &GenCircle::anchor)
        .def_readonly("normal", &GenCircle::normal)
        .def("__repr__", [](const GenCircle& c) {
            if (c.is_line()) return "GenCircle.line(" + py::repr(py::cast(c.anchor)).cast<std::string>() + ")";
            return "GenCircle.circle(" + py::repr(py::cast(c.center)).cast<std::string>() + ", " +
                   std::to_string(c.radius) + ")";
        });

    py::class_<MobiusMap>(m, "MobiusMap")
        .def(py::init([](cplx a, cplx b, cplx c, cplx d) { return MobiusMap{a, b, c, d}; }))
        .def_readonly("a", &MobiusMap::a)
        .def_readonly("b", &MobiusMap::b)
        .def_readonly("c", &MobiusMap::c)
        .def_readonly("d", &MobiusMap::d)
        .def("inverse", &MobiusMap::inverse)
        .def("trace_squared", &MobiusMap::trace_squared)
        .def("__matmul__", [](const MobiusMap& x, const MobiusMap& y) { return x * y; })
        .def("__call__", [](const MobiusMap& x, const py::object& z) { return point_to_py(apply(x, point_from_py(z))); })
        .def("map_circle", [](const MobiusMap& x, const GenCircle& c) { return map_circle(x, c); });

    m.def("mobius_from_triples",
          [](const std::array<py::object, 3>& src, const std::array<py::object, 3>& dst) {
              return mobius_from_triples(point_from_py(src[0]), point_from_py(src[1]), point_from_py(src[2]),
                                         point_from_py(dst[0]), point_from_py(dst[1]), point_from_py(dst[2]));
          },
          "Map sending three points to three points; None stands for infinity.");
    m.def("classify", [](const MobiusMap& x, double tol) { return to_string(classify(x, tol)); }, py::arg("map"),
          py::arg("tol") = 1e-6);
    m.def("inversive_product", py::overload_cast<const GenCircle&, const GenCircle&>(&inversive_product));

    py::class_<SubdivisionRule>(m, "SubdivisionRule");
    py::class_<PlanarComplex>(m, "PlanarComplex")
        .def_readonly("level", &PlanarComplex::level)
        .def_readonly("vertex_ids", &PlanarComplex::vertex_ids)
        .def_property_readonly("face_ids", [](const PlanarComplex& c) {
            std::vector<std::string> ids;
            for (const auto& f : c.faces) ids.push_back(f.id);
            return ids;
        })
        .def("edges", &PlanarComplex::edges)
        .def("euler_characteristic", &PlanarComplex::euler_characteristic);

    m.def("parse_rule", &parse_rule);
    m.def("format_rule", &format_rule);
    m.def("parse_complex", &parse_complex);
    m.def("format_complex", &format_complex);
    m.def("builtin_rule", [] { return builtin().rule; });
    m.def("builtin_complex", &builtin_complex, py::arg("name"));
    m.def("subdivide", &iterate_subdivision, py::arg("complex"), py::arg("rule"), py::arg("n") = 1);
    m.def("validate_rule", [](const SubdivisionRule& r) {
        ValidationReport v = validate_rule(r);
        return py::make_tuple(v.ok, v.violations);
    });

    py::class_<Packing>(m, "Packing")
        .def_readonly("ids", &Packing::ids)
        .def_readonly("circles", &Packing::circles)
        .def_readonly("edges", &Packing::edges)
        .def_readonly("outer", &Packing::outer)
        .def_readonly("tangency_residual", &Packing::tangency_residual)
        .def_readonly("angle_residual", &Packing::angle_residual)
        .def_readonly("converged", &Packing::converged)
        .def("circle", &Packing::circle, py::arg("id"))
        .def("tangency", [](const Packing& p, const std::string& u, const std::string& v) {
            return point_to_py(p.tangency(p.index(u), p.index(v)));
        });

    m.def("pack", [](const PlanarComplex& c, const std::string& outer) {
              PackOptions opt;
              opt.outer = outer;
              return pack_complex(c, opt);
          },
          py::arg("complex"), py::arg("outer") = "");
    m.def("format_packing", &format_packing);
    m.def("parse_packing", &parse_packing);

    m.def("run_cli", [](const std::vector<std::string>& args) {
              CliResult r = run_cli(args);
              return py::make_tuple(r.code, r.out, r.err);
          },
          "Run a gasket-forge command; returns (exit code, stdout, stderr).");
}
