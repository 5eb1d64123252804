#include "membrane/assembly.hpp"
#include "membrane/convergence.hpp"
#include "membrane/element.hpp"
#include "membrane/io.hpp"
#include "membrane/material.hpp"
#include "membrane/mesh.hpp"
#include "membrane/scenarios.hpp"

#include <pybind11/eigen.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

namespace py = pybind11;
using namespace membrane;

using RowMatrixXd = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using RowMatrixXi = Eigen::Matrix<int, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

namespace {

RowMatrixXd mesh_nodes(const Mesh& m) {
    RowMatrixXd out(m.num_nodes(), 2);
    for (int i = 0; i < m.num_nodes(); ++i) out.row(i) = m.node(i).transpose();
    return out;
}

RowMatrixXi mesh_triangles(const Mesh& m) {
    RowMatrixXi out(m.num_triangles(), 3);
    for (int e = 0; e < m.num_triangles(); ++e) {
        for (int k = 0; k < 3; ++k) out(e, k) = m.triangle(e)[k];
    }
    return out;
}

Mesh mesh_from_arrays(const RowMatrixXd& nodes, const RowMatrixXi& tris) {
    if (nodes.cols() != 2 || tris.cols() != 3) throw py::value_error("expected nodes (N, 2) and triangles (E, 3)");
    std::vector<Vec2> ns(nodes.rows());
    for (Eigen::Index i = 0; i < nodes.rows(); ++i) ns[i] = nodes.row(i).transpose();
    std::vector<Triangle> ts(tris.rows());
    for (Eigen::Index e = 0; e < tris.rows(); ++e) ts[e] = {tris(e, 0), tris(e, 1), tris(e, 2)};
    return Mesh(std::move(ns), std::move(ts));
}

std::array<Vec2, 3> coords3(const RowMatrixXd& c) {
    if (c.rows() != 3 || c.cols() != 2) throw py::value_error("expected triangle coordinates of shape (3, 2)");
    return {Vec2(c(0, 0), c(0, 1)), Vec2(c(1, 0), c(1, 1)), Vec2(c(2, 0), c(2, 1))};
}

NormKind norm_kind(const std::string& name) {
    if (name == "L1") return NormKind::L1;
    if (name == "L2") return NormKind::L2;
    if (name == "Linf") return NormKind::Linf;
    throw py::value_error("norm must be 'L1', 'L2' or 'Linf'");
}

py::dict state_dict(const State& s) {
    py::dict d;
    d["t"] = s.t;
    d["step"] = s.step;
    d["a"] = s.a;
    d["adot"] = s.adot;
    d["addot"] = s.addot;
    return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Finite-element dynamics of thin anisotropic membranes";
    m.attr("__version__") = io::kVersion;

    py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
    py::register_exception<NumericalError>(m, "NumericalError", PyExc_ArithmeticError);
    py::register_exception<Error>(m, "MembraneError", PyExc_RuntimeError);

    py::class_<StructuredSpec>(m, "StructuredSpec")
        .def(py::init([](double Lx, double Ly, int nx, int ny) { return StructuredSpec{Lx, Ly, nx, ny}; }),
             py::arg("Lx") = 1.0, py::arg("Ly") = 1.0, py::arg("nx") = 1, py::arg("ny") = 1)
        .def_readwrite("Lx", &StructuredSpec::Lx)
        .def_readwrite("Ly", &StructuredSpec::Ly)
        .def_readwrite("nx", &StructuredSpec::nx)
        .def_readwrite("ny", &StructuredSpec::ny)
        .def("__repr__", [](const StructuredSpec& s) {
            std::ostringstream os;
            os << "StructuredSpec(Lx=" << s.Lx << ", Ly=" << s.Ly << ", nx=" << s.nx << ", ny=" << s.ny << ")";
            return os.str();
        });

    py::class_<Mesh>(m, "Mesh")
        .def(py::init(&mesh_from_arrays), py::arg("nodes"), py::arg("triangles"))
        .def_property_readonly("nodes", &mesh_nodes)
        .def_property_readonly("triangles", &mesh_triangles)
        .def_property_readonly("num_nodes", &Mesh::num_nodes)
        .def_property_readonly("num_triangles", &Mesh::num_triangles)
        .def_property_readonly("structure", &Mesh::structure)
        .def("signed_area", &Mesh::signed_area)
        .def("total_area", &Mesh::total_area);

    m.def("generate_structured", &generate_structured, py::arg("spec"));
    m.def("refine", &refine, py::arg("spec"));
    m.def("read_msh", [](const std::string& text) {
        std::istringstream in(text);
        return read_msh(in);
    }, py::arg("text"));
    m.def("nearest_node", [](const Mesh& mesh, double x, double y) { return nearest_node(mesh, Vec2(x, y)); },
          py::arg("mesh"), py::arg("x"), py::arg("y"));
    m.def("central_element_pair", &central_element_pair, py::arg("mesh"));
    m.def("boundary_nodes", &boundary_nodes, py::arg("mesh"));

    m.def("isotropic", [](double E, double nu) { return Mat6(isotropic(E, nu).matrix()); }, py::arg("E"),
          py::arg("nu"));
    m.def("anisotropic", [](const std::vector<double>& upper) {
        if (upper.size() != 21) throw py::value_error("expected 21 moduli");
        return Mat6(anisotropic(std::span<const double, 21>(upper.data(), 21)).matrix());
    }, py::arg("upper"));
    m.def("reference_composite", [] { return Mat6(reference_composite().matrix()); });

    py::class_<MaterialParams>(m, "MaterialParams")
        .def(py::init([](double rho, double h, const Mat6& D) {
            MaterialParams p;
            p.rho = rho;
            p.h = h;
            p.D = ElasticMatrix(D);
            p.validate();
            return p;
        }), py::arg("rho"), py::arg("h"), py::arg("D"))
        .def_readonly("rho", &MaterialParams::rho)
        .def_readonly("h", &MaterialParams::h)
        .def_property_readonly("D", [](const MaterialParams& p) { return Mat6(p.D.matrix()); });

    m.def("shape_coefficients", [](const RowMatrixXd& coords) {
        const ShapeCoeffs sc = shape_coefficients(coords3(coords));
        py::dict d;
        d["alpha"] = sc.alpha;
        d["beta"] = sc.beta;
        d["gamma"] = sc.gamma;
        d["Se"] = sc.Se;
        return d;
    }, py::arg("coords"));
    m.def("strain_displacement", [](const RowMatrixXd& coords) {
        return Mat69(strain_displacement(shape_coefficients(coords3(coords))));
    }, py::arg("coords"));
    m.def("element_stiffness", [](const RowMatrixXd& coords, const Mat6& D, double h) {
        const ShapeCoeffs sc = shape_coefficients(coords3(coords));
        return Mat9(element_stiffness(strain_displacement(sc), ElasticMatrix(D), h, sc.area()));
    }, py::arg("coords"), py::arg("D"), py::arg("h"));
    m.def("element_mass", [](double rho, double h, double area) { return Mat9(element_mass(rho, h, area)); },
          py::arg("rho"), py::arg("h"), py::arg("area"));
    m.def("element_load", [](const Vec3& b, double h, double area) { return Vec9(element_load(b, h, area)); },
          py::arg("b"), py::arg("h"), py::arg("area"));

    m.def("assemble", [](const Mesh& mesh, const MaterialParams& material) {
        const GlobalSystem sys = assemble(mesh, material);
        return py::make_tuple(sys.K, sys.M);
    }, py::arg("mesh"), py::arg("material"), "Unconstrained global (K, M) as scipy.sparse matrices.");

    m.def("distributed_b", py::overload_cast<double, double, double, double>(&distributed_b), py::arg("x"),
          py::arg("y"), py::arg("b0"), py::arg("L"));
    m.def("norm", [](const std::vector<double>& d, const std::string& which) {
        return norm(std::span<const double>(d), norm_kind(which));
    }, py::arg("d"), py::arg("which"));
    m.def("fit_rate", [](const std::vector<double>& norms) { return fit_rate(norms).rate; }, py::arg("norms"));

    m.def("run_config", [](const std::string& config_json) {
        const io::RunConfig rc = io::parse_run_config(io::json::parse(config_json));
        RunResult r;
        {
            py::gil_scoped_release release;
            r = run(rc.scenario);
        }
        py::dict out;
        out["tau"] = r.tau;
        out["steps"] = r.steps;
        out["final"] = state_dict(r.final_state);
        py::list snaps;
        for (const Snapshot& s : r.snapshots) {
            py::dict d;
            d["t"] = s.t;
            d["step"] = s.step;
            d["a"] = s.a;
            d["adot"] = s.adot;
            snaps.append(d);
        }
        out["snapshots"] = snaps;
        return out;
    }, py::arg("config_json"), "Run a scenario given as a JSON string.");

    m.def("run_study", [](const std::string& study_json) {
        const io::StudyConfig sc = io::parse_study_config(io::json::parse(study_json));
        StudyResult r;
        {
            py::gil_scoped_release release;
            r = run_study(sc.spec);
        }
        std::ostringstream csv;
        write_study_csv(csv, r);
        py::dict out;
        out["csv"] = csv.str();
        out["rates"] = py::dict(py::arg("L1") = r.joint_rates[0].rate, py::arg("L2") = r.joint_rates[1].rate,
                                py::arg("Linf") = r.joint_rates[2].rate);
        py::list levels;
        for (const LevelNorms& ln : r.levels) {
            levels.append(py::dict(py::arg("level") = ln.level, py::arg("n_nodes") = ln.n_nodes,
                                   py::arg("tau") = ln.tau, py::arg("L1") = ln.joint[0],
                                   py::arg("L2") = ln.joint[1], py::arg("Linf") = ln.joint[2]));
        }
        out["levels"] = levels;
        return out;
    }, py::arg("study_json"), "Run a convergence study given as a JSON string.");
}
