#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "hyperbergman/bounds.hpp"
#include "hyperbergman/pipeline.hpp"

namespace py = pybind11;
using namespace hyperbergman;

namespace {

HPoint point(const std::pair<double, double>& p) { return HPoint(p.first, p.second); }

py::dict geometry_dict(const std::string& name, const SurfaceGeometry& g) {
    py::dict d;
    d["group"] = name;
    d["systole"] = g.systole;
    d["genus"] = g.genus;
    d["shortest_trace"] = g.shortest_trace;
    d["certified"] = g.certified;
    d["certificate"] = g.certificate;
    return d;
}

class Level {
public:
    explicit Level(int N, int order) {
        RunConfig c;
        c.levels = {N};
        c.quadrature_order = order;
        validate(c);
        ctx_ = load_level(N, c);
    }

    int level() const { return ctx_.level; }
    int genus() const { return ctx_.basis.genus; }
    double systole() const { return ctx_.geom.systole; }
    double bound() const { return ctx_.closed_form_B; }
    double bergman(double x, double y) const { return bergman_kernel(ctx_.basis, HPoint(x, y)); }
    double density_ratio(double x, double y) const {
        return canonical_density_ratio(ctx_.basis, ctx_.geom, HPoint(x, y));
    }
    double volume_ratio(const std::vector<std::pair<double, double>>& pts, const std::string& path) const {
        std::vector<HPoint> zs;
        for (const auto& p : pts) zs.push_back(point(p));
        const ProductPoint p(zs);
        return ratio_path_from_string(path) == RatioPath::Det ? canonical_volume_ratio_det(ctx_.basis, ctx_.geom, p)
                                                              : canonical_volume_ratio_perm(ctx_.basis, ctx_.geom, p);
    }
    double volume_bound(int d) const { return thm32_bound(d, ctx_.geom, ctx_.closed_form_B); }

private:
    LevelContext ctx_;
};

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Bergman kernel bounds on hyperbolic surfaces";

    static py::handle error_type = py::exception<Error>(m, "HyperbergmanError", PyExc_RuntimeError).release();
    py::register_exception_translator([](std::exception_ptr p) {
        try {
            if (p) std::rethrow_exception(p);
        } catch (const Error& e) {
            py::object exc = error_type(e.what());
            exc.attr("code") = e.code();
            PyErr_SetObject(error_type.ptr(), exc.ptr());
        }
    });

    m.def("bx_closed_form", &bx_closed_form, py::arg("r"));
    m.def("tail_integral_closed_form", &tail_integral_closed_form, py::arg("r"), py::arg("delta"));
    m.def("kernel_orbit_integral", &kernel_orbit_integral, py::arg("rho"));
    m.def(
        "hyp_distance", [](std::pair<double, double> a, std::pair<double, double> b) {
            return hyp_distance(point(a), point(b));
        },
        py::arg("z1"), py::arg("z2"));
    m.def(
        "systole",
        [](const std::string& name) { return geometry_dict(name, systole(builtin_group(name))); },
        py::arg("group"));
    m.def(
        "bound_report", [](double r) { return to_json(closed_form_report(r)).dump(); }, py::arg("r"),
        "JSON report of the assembled chain for a bare injectivity radius.");
    m.def(
        "sweep",
        [](const std::vector<int>& levels) {
            const auto s = sweep_levels(levels, RunConfig{});
            py::list rows;
            for (const auto& r : s.rows) {
                py::dict d;
                d["level"] = r.level;
                d["genus"] = r.genus;
                d["systole"] = r.systole;
                d["certified"] = r.certified;
                d["bound"] = r.bound;
                rows.append(d);
            }
            return py::make_tuple(rows, s.family_bound, s.min_systole);
        },
        py::arg("levels"));

    py::class_<Level>(m, "Level")
        .def(py::init<int, int>(), py::arg("level"), py::arg("order") = 20)
        .def_property_readonly("level", &Level::level)
        .def_property_readonly("genus", &Level::genus)
        .def_property_readonly("systole", &Level::systole)
        .def_property_readonly("bound", &Level::bound)
        .def("bergman", &Level::bergman, py::arg("x"), py::arg("y"))
        .def("density_ratio", &Level::density_ratio, py::arg("x"), py::arg("y"))
        .def("volume_ratio", &Level::volume_ratio, py::arg("points"), py::arg("path") = "det")
        .def("volume_bound", &Level::volume_bound, py::arg("d"));
}
