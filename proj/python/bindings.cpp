#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "subriemann/cli.hpp"
#include "subriemann/config.hpp"
#include "subriemann/connection.hpp"
#include "subriemann/steering.hpp"

namespace py = pybind11;
using namespace subriemann;

namespace {

// pybind11 holders must be non-const; the library only ever sees const views.
using ManifoldPtr = std::shared_ptr<Manifold>;
using SurfacePtr = std::shared_ptr<Hypersurface>;

ManifoldPtr holder(std::shared_ptr<const Manifold> p) { return std::const_pointer_cast<Manifold>(std::move(p)); }
SurfacePtr holder(std::shared_ptr<const Hypersurface> p) { return std::const_pointer_cast<Hypersurface>(std::move(p)); }

ExprSection make_section(const Manifold& M, const std::vector<std::string>& comps) {
  if (comps.size() != M.rank()) throw ConfigError("section needs one expression per horizontal field");
  std::vector<Expr> e;
  for (const auto& s : comps) e.push_back(parse(s, M.variables()));
  return ExprSection(std::move(e));
}

Mat samples_matrix(const HorizontalCurve& c) {
  const auto m = c.samples.empty() ? 0 : c.samples.front().x.size();
  Mat out(static_cast<Eigen::Index>(c.samples.size()), m + 1);
  for (std::size_t i = 0; i < c.samples.size(); ++i) {
    out(static_cast<Eigen::Index>(i), 0) = c.samples[i].t;
    out.row(static_cast<Eigen::Index>(i)).tail(m) = c.samples[i].x.transpose();
  }
  return out;
}

py::dict curve_dict(const HorizontalCurve& c) {
  py::dict d;
  d["samples"] = samples_matrix(c);
  d["length"] = c.length;
  d["max_phi_drift"] = c.diagnostics.max_phi_drift;
  d["max_horizontality_residual"] = c.diagnostics.max_horizontality_residual;
  d["endpoint_error"] = c.diagnostics.endpoint_error;
  d["energy_drift"] = c.diagnostics.energy_drift;
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Sub-Riemannian frames, nonholonomic connection, hypersurfaces and steering.";

  auto base = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
  py::register_exception<ConfigError>(m, "ConfigError", base.ptr());
  py::register_exception<CharacteristicPoint>(m, "CharacteristicPoint", base.ptr());
  py::register_exception<NotOnSurface>(m, "NotOnSurface", base.ptr());

  py::class_<Manifold, ManifoldPtr>(m, "Manifold")
      .def_property_readonly("name", &Manifold::name)
      .def_property_readonly("dim", &Manifold::dim)
      .def_property_readonly("rank", &Manifold::rank)
      .def_property_readonly("variables", &Manifold::variables)
      .def_property_readonly("is_carnot", &Manifold::is_carnot)
      .def("frame_matrix", &Manifold::frame_matrix, py::arg("p"), "chart vectors of the frame, one per column")
      .def("growth_vector",
           [](const Manifold& M, const Vec& p, std::size_t depth) { return growth_vector(M, p, depth).dims; },
           py::arg("p"), py::arg("max_depth") = kMaxGrowthDepth)
      .def("bracket",
           [](const Manifold& M, std::size_t a, std::size_t b, const Vec& p) {
             if (a >= M.dim() || b >= M.dim()) throw Error("frame index out of range");
             auto fa = [&](auto x, auto o) { M.eval_field(a, x, o); };
             auto fb = [&](auto x, auto o) { M.eval_field(b, x, o); };
             return bracket_at(fa, fb, M.dim(), p);
           },
           py::arg("a"), py::arg("b"), py::arg("p"), "chart vector of [X_a, X_b](p), 0-based");

  m.def("heisenberg", [](std::size_t n) { return std::make_shared<Manifold>(make_heisenberg(n)); },
        py::arg("n"));
  m.def("load_manifold", [](const std::string& spec) { return holder(load_manifold(spec)); }, py::arg("spec"),
        "built-in name (heisenberg:<n>, engel, carnot:<file>) or JSON config path");
  m.def("load_hypersurface", [](const std::string& path) { return holder(load_hypersurface(path)); }, py::arg("path"));

  py::class_<ExprSection>(m, "Section")
      .def(py::init([](const Manifold& M, const std::vector<std::string>& comps) { return make_section(M, comps); }),
           py::arg("manifold"), py::arg("components"));

  py::class_<Connection>(m, "Connection")
      .def(py::init<ManifoldPtr>(), py::arg("manifold"))
      .def("gamma",
           [](const Connection& D, const Vec& p) {
             const GammaTensor G = D.gamma(p);
             py::list out;
             for (std::size_t i = 0; i < G.k; ++i) {
               Mat s(static_cast<Eigen::Index>(G.k), static_cast<Eigen::Index>(G.k));
               for (std::size_t j = 0; j < G.k; ++j)
                 for (std::size_t l = 0; l < G.k; ++l) s(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(l)) = G(i, j, l);
               out.append(s);
             }
             return out;
           },
           py::arg("p"), "list over i of matrices Gamma_ij^l")
      .def("covariant_derivative",
           [](const Connection& D, const ExprSection& U, const ExprSection& V, const Vec& p) {
             return D.covariant_derivative(U, V, p);
           },
           py::arg("U"), py::arg("V"), py::arg("p"))
      .def("verify_axioms",
           [](const Connection& D, const ExprSection& U, const ExprSection& V, const ExprSection& W, const Vec& p) {
             const AxiomResiduals r = D.verify_axioms(U, V, W, p);
             return py::dict(py::arg("compatibility") = r.compatibility, py::arg("symmetry") = r.symmetry,
                             py::arg("leibniz") = r.leibniz, py::arg("linearity") = r.linearity);
           },
           py::arg("U"), py::arg("V"), py::arg("W"), py::arg("p"))
      .def("geodesic",
           [](const Connection& D, const Vec& p0, const Vec& c0, double duration, double dt) {
             return curve_dict(D.geodesic(p0, c0, duration, dt));
           },
           py::arg("p0"), py::arg("c0"), py::arg("duration") = 1.0, py::arg("dt") = 1e-3);

  py::class_<Hypersurface, SurfacePtr>(m, "Hypersurface")
      .def(py::init([](ManifoldPtr M, const std::string& phi) {
             Expr e = parse(phi, M->variables());
             return std::make_shared<Hypersurface>(std::move(M), std::move(e));
           }),
           py::arg("manifold"), py::arg("phi"))
      .def_property_readonly("manifold", [](const Hypersurface& S) { return holder(S.manifold_ptr()); })
      .def("value", &Hypersurface::value, py::arg("p"))
      .def("project", &Hypersurface::project_to_surface, py::arg("p"), py::arg("max_iter") = 50)
      .def("horizontal_normal",
           [](const Hypersurface& S, const Vec& p) {
             const HorizontalNormal n = S.horizontal_normal(p);
             return py::dict(py::arg("ratio") = n.ratio, py::arg("normal") = n.normal, py::arg("unit") = n.unit);
           },
           py::arg("p"))
      .def("is_characteristic", &Hypersurface::is_characteristic, py::arg("p"), py::arg("tol") = 1e-8,
           py::arg("surface_tol") = 1e-6)
      .def("find_characteristic_points",
           [](const Hypersurface& S, double lo, double hi, std::vector<std::size_t> counts, double tol) {
             GridSpec g{std::vector<Interval>(S.manifold().dim(), Interval{lo, hi}), std::move(counts)};
             py::list out;
             for (const auto& c : S.find_characteristic_points(g, tol))
               out.append(py::dict(py::arg("point") = c.point, py::arg("ratio") = c.ratio, py::arg("members") = c.members));
             return out;
           },
           py::arg("lo"), py::arg("hi"), py::arg("counts"), py::arg("tol") = 1e-6)
      .def("second_fundamental_form",
           [](const Hypersurface& S, const Vec& p) {
             const CurvatureReport r = S.second_fundamental_form(p);
             return py::dict(py::arg("h") = r.h, py::arg("kappa") = r.kappa, py::arg("mean") = r.mean,
                             py::arg("gaussian") = r.gaussian, py::arg("asymmetry") = r.asymmetry);
           },
           py::arg("p"))
      .def("mean_curvature", &Hypersurface::mean_curvature_divergence_form, py::arg("p"), "sum X_i(V^i)");

  m.def("steer",
        [](SurfacePtr S, const Vec& p, const Vec& q, std::uint64_t seed, double dt, double tol, double horizon) {
          SteerParams params;
          params.seed = seed;
          params.dt = dt;
          params.tol_endpoint = tol;
          params.horizon = horizon;
          const SteerResult r = steer(ControlSystem(std::move(S)), p, q, params);
          py::dict d = curve_dict(r.curve);
          d["success"] = r.success;
          d["status"] = r.status;
          d["reason"] = r.reason;
          d["witness"] = r.witness;
          d["distance"] = r.distance;
          d["maneuvers"] = r.maneuvers;
          return d;
        },
        py::arg("surface"), py::arg("p"), py::arg("q"), py::arg("seed") = 1, py::arg("dt") = 1e-3,
        py::arg("tol") = 1e-3, py::arg("horizon") = 40.0);

  m.def("commutator_maneuver",
        [](ManifoldPtr M, const Vec& p, std::size_t a, std::size_t b, double eps) {
          return curve_dict(commutator_maneuver(ControlSystem(std::move(M)), p, a, b, eps));
        },
        py::arg("manifold"), py::arg("p"), py::arg("a"), py::arg("b"), py::arg("eps"));

  m.def("run_cli",
        [](const std::vector<std::string>& args) {
          std::ostringstream out, err;
          const int code = run_cli(args, out, err);
          return py::make_tuple(code, out.str(), err.str());
        },
        py::arg("args"), "run one command of the command line tool; returns (exit code, stdout, stderr)");
}
