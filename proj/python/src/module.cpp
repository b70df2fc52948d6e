#include <pybind11/complex.h>
#include <pybind11/functional.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "beltrami/conditions.hpp"
#include "beltrami/diagnostics.hpp"
#include "beltrami/example_family.hpp"
#include "beltrami/field_io.hpp"
#include "beltrami/grid.hpp"
#include "beltrami/solver.hpp"
#include "beltrami/spectral.hpp"

namespace py = pybind11;
using namespace beltrami;
using namespace beltrami::examples;

namespace {

using ComplexArray = py::array_t<cplx, py::array::c_style | py::array::forcecast>;

template <class T>
py::array_t<T> to_numpy(const Field<T>& f) {
  const auto n = static_cast<py::ssize_t>(f.grid().n_side());
  py::array_t<T> out({n, n});
  std::copy(f.samples().begin(), f.samples().end(), out.mutable_data());
  return out;
}

ComplexField from_numpy(const ComplexArray& a, double half_width) {
  if (a.ndim() != 2 || a.shape(0) != a.shape(1)) throw std::invalid_argument("field must be a square 2-D array");
  const GridSpec grid(static_cast<std::size_t>(a.shape(0)), half_width);
  return ComplexField(grid, std::vector<cplx>(a.data(), a.data() + a.size()));
}

py::array_t<std::uint8_t> mask_to_numpy(const std::vector<std::uint8_t>& mask, std::size_t n) {
  py::array_t<std::uint8_t> out({static_cast<py::ssize_t>(n), static_cast<py::ssize_t>(n)});
  std::copy(mask.begin(), mask.end(), out.mutable_data());
  return out;
}

SolverOptions options(double tol, std::size_t max_iter, std::size_t outer_max) {
  SolverOptions opt;
  opt.tol = tol;
  opt.max_iter = max_iter;
  opt.outer_max = outer_max;
  return opt;
}

ExampleParams make_params(double alpha, double p, double k) {
  ExampleParams params;
  params.alpha = alpha;
  params.p = p;
  params.k = k;
  params.validate();
  return params;
}

CoefficientOracle example_oracle(int example, const ExampleParams& params) {
  if (example == 1) return example1_oracle(params);
  if (example == 2) return example2_oracle(params);
  throw std::invalid_argument("example must be 1 or 2");
}

py::dict verdict_dict(const FmoResult& r) {
  py::dict d;
  d["eps"] = r.eps;
  d["estimates"] = r.estimates;
  d["verdict"] = to_string(r.verdict);
  return d;
}

py::dict verdict_dict(const DivergenceResult& r) {
  py::dict d;
  d["eps"] = r.eps;
  d["values"] = r.values;
  d["slopes"] = r.slopes;
  d["verdict"] = to_string(r.verdict);
  return d;
}

template <class Fn>
py::object pointwise(const ComplexArray& z, Fn fn) {
  return py::vectorize([&fn](cplx v) { return fn(v); })(z);
}

constexpr double kInf = std::numeric_limits<double>::infinity();

}  // namespace

PYBIND11_MODULE(_beltrami, m) {
  m.doc() = "Degenerate quasilinear Beltrami equations on the unit disk";

  py::register_exception<NumericalError>(m, "NumericalError", PyExc_ArithmeticError);
  py::register_exception<FormatError>(m, "FormatError", PyExc_ValueError);

  py::class_<GridSpec>(m, "GridSpec")
      .def(py::init<std::size_t, double>(), py::arg("n_side"), py::arg("half_width") = 1.25)
      .def_property_readonly("n_side", &GridSpec::n_side)
      .def_property_readonly("half_width", &GridSpec::half_width)
      .def_property_readonly("spacing", &GridSpec::spacing)
      .def("node", py::overload_cast<std::size_t, std::size_t>(&GridSpec::node, py::const_), py::arg("row"),
           py::arg("col"))
      .def("__repr__", [](const GridSpec& g) {
        return "GridSpec(n_side=" + std::to_string(g.n_side()) + ", half_width=" + std::to_string(g.half_width()) +
               ")";
      });

  m.def(
      "nodes", [](const GridSpec& g) { return to_numpy(sample_function([](cplx z) { return z; }, g)); },
      py::arg("grid"), "Complex node coordinates as an (n, n) array.");

  m.def(
      "beurling_transform",
      [](const ComplexArray& omega, double half_width) {
        const ComplexField w = from_numpy(omega, half_width);
        SpectralWorkspace ws(w.grid());
        return to_numpy(beurling_transform(w, ws));
      },
      py::arg("omega"), py::arg("half_width") = 1.25, "Periodic (torus) Beurling transform.");
  m.def(
      "cauchy_transform",
      [](const ComplexArray& omega, double half_width) {
        const ComplexField w = from_numpy(omega, half_width);
        SpectralWorkspace ws(w.grid());
        return to_numpy(cauchy_transform(w, ws));
      },
      py::arg("omega"), py::arg("half_width") = 1.25, "Periodic (torus) Cauchy transform.");
  m.def(
      "planar_beurling",
      [](const ComplexArray& omega, double half_width) {
        const ComplexField w = from_numpy(omega, half_width);
        PlanarOperators ops(w.grid());
        return to_numpy(ops.beurling(w));
      },
      py::arg("omega"), py::arg("half_width") = 1.25, "Whole-plane Beurling transform (used by the solver).");
  m.def(
      "planar_cauchy",
      [](const ComplexArray& omega, double half_width) {
        const ComplexField w = from_numpy(omega, half_width);
        PlanarOperators ops(w.grid());
        return to_numpy(ops.cauchy(w));
      },
      py::arg("omega"), py::arg("half_width") = 1.25, "Whole-plane Cauchy transform (used by the solver).");

  py::class_<MappingSolution>(m, "Solution")
      .def_property_readonly("f", [](const MappingSolution& s) { return to_numpy(s.f); })
      .def_property_readonly("fz", [](const MappingSolution& s) { return to_numpy(s.fz); })
      .def_property_readonly("fzbar", [](const MappingSolution& s) { return to_numpy(s.fzbar); })
      .def_property_readonly("omega", [](const MappingSolution& s) { return to_numpy(s.omega); })
      .def_property_readonly("grid", [](const MappingSolution& s) { return s.f.grid(); })
      .def_readonly("residual_linf", &MappingSolution::residual_linf)
      .def_readonly("iterations", &MappingSolution::iterations)
      .def_readonly("outer_iterations", &MappingSolution::outer_iterations)
      .def_property_readonly("status", [](const MappingSolution& s) { return to_string(s.status); })
      .def_property_readonly("converged", &MappingSolution::converged)
      .def_property_readonly("f_at_one", [](const MappingSolution& s) { return s.normalization.f_at_one; })
      .def("rescaled", [](const MappingSolution& s) -> py::object {
        const auto f = real_positive_rescaled(s);
        if (!f) return py::none();
        return to_numpy(*f);
      });

  m.def(
      "solve_constant",
      [](cplx mu, cplx nu, std::size_t n_side, double half_width, double tol, std::size_t max_iter,
         std::size_t outer_max) {
        BeltramiSolver solver(GridSpec(n_side, half_width));
        return solver.solve_quasilinear(constant_oracle(mu, nu), options(tol, max_iter, outer_max));
      },
      py::arg("mu"), py::arg("nu") = cplx{}, py::arg("n_side") = 256, py::arg("half_width") = 1.25,
      py::arg("tol") = 1e-8, py::arg("max_iter") = 5000, py::arg("outer_max") = 60,
      "Solve with constant mu, nu on the unit disk (zero outside).");

  m.def(
      "solve_example",
      [](int example, double alpha, double k, std::size_t n_side, double half_width, double tol,
         std::size_t max_iter, std::size_t outer_max) {
        const ExampleParams params = make_params(alpha, 1.0, k);
        ExampleParams base = params;
        base.k = kInf;
        CoefficientOracle oracle = example_oracle(example, base);
        if (std::isfinite(k)) oracle = truncate(oracle, example1_truncation_q(base), k);
        BeltramiSolver solver(GridSpec(n_side, half_width));
        return solver.solve_quasilinear(oracle, options(tol, max_iter, outer_max));
      },
      py::arg("example") = 1, py::arg("alpha") = 1.0, py::arg("k") = 4.0, py::arg("n_side") = 256,
      py::arg("half_width") = 1.25, py::arg("tol") = 1e-8, py::arg("max_iter") = 5000, py::arg("outer_max") = 60,
      "Solve the example equation truncated at level k.");

  py::class_<LadderRun>(m, "LadderResult")
      .def_readonly("levels", &LadderRun::levels)
      .def_readonly("sup_diffs", &LadderRun::sup_diffs)
      .def_readonly("converged", &LadderRun::converged)
      .def_readonly("aborted", &LadderRun::aborted)
      .def_readonly("abort_reason", &LadderRun::abort_reason)
      .def_readonly("solutions", &LadderRun::solutions);

  m.def(
      "run_ladder_example",
      [](std::vector<double> levels, int example, double alpha, std::size_t n_side, double half_width, double tol,
         double compact_radius, double convergence_tol) {
        const ExampleParams params = make_params(alpha, 1.0, kInf);
        LadderOptions opt;
        opt.solver.tol = tol;
        opt.compact_radius = compact_radius;
        opt.convergence_tol = convergence_tol;
        return run_ladder(example_oracle(example, params), example1_truncation_q(params), levels,
                          GridSpec(n_side, half_width), opt);
      },
      py::arg("levels") = std::vector<double>{2, 4, 8, 16, 32}, py::arg("example") = 1, py::arg("alpha") = 1.0,
      py::arg("n_side") = 256, py::arg("half_width") = 1.25, py::arg("tol") = 1e-8,
      py::arg("compact_radius") = 0.9, py::arg("convergence_tol") = 1e-2);

  py::class_<ExampleParams>(m, "ExampleParams")
      .def(py::init(&make_params), py::arg("alpha") = 1.0, py::arg("p") = 1.0, py::arg("k") = kInf)
      .def_readonly("alpha", &ExampleParams::alpha)
      .def_readonly("p", &ExampleParams::p)
      .def_readonly("k", &ExampleParams::k)
      .def("threshold_radius", &ExampleParams::threshold_radius)
      .def("inner_image_radius", &ExampleParams::inner_image_radius);

  py::enum_<Dilatation>(m, "Dilatation")
      .value("Kmu", Dilatation::Kmu)
      .value("Kmuk", Dilatation::Kmuk)
      .value("Kmugk", Dilatation::Kmugk)
      .value("Q", Dilatation::Q);

  m.def(
      "ex1_mu",
      [](const ComplexArray& z, const ComplexArray& w, const ExampleParams& p) {
        return py::vectorize([&p](cplx zz, cplx ww) { return ex1_mu(zz, ww, p); })(z, w);
      },
      py::arg("z"), py::arg("w"), py::arg("params"));
  m.def(
      "ex1_f", [](const ComplexArray& z, const ExampleParams& p) { return pointwise(z, [&p](cplx v) { return ex1_f(v, p); }); },
      py::arg("z"), py::arg("params"));
  m.def(
      "ex1_fk", [](const ComplexArray& z, const ExampleParams& p) { return pointwise(z, [&p](cplx v) { return ex1_fk(v, p); }); },
      py::arg("z"), py::arg("params"));
  m.def(
      "ex1_gk", [](const ComplexArray& y, const ExampleParams& p) { return pointwise(y, [&p](cplx v) { return ex1_gk(v, p); }); },
      py::arg("y"), py::arg("params"));
  m.def(
      "ex1_dilatation",
      [](const ComplexArray& z, const ExampleParams& p, Dilatation which) {
        return pointwise(z, [&](cplx v) { return ex1_dilatation(v, p, which); });
      },
      py::arg("z"), py::arg("params"), py::arg("which"));

  m.def(
      "dilatation_report",
      [](const ComplexArray& f, double half_width, double p) {
        const DilatationReport r = dilatation_report(from_numpy(f, half_width), p);
        py::dict d;
        d["K_mu_f"] = to_numpy(r.K_mu_f);
        d["K_I_p"] = to_numpy(r.K_I_p);
        d["jacobian"] = to_numpy(r.jacobian);
        d["degenerate_fraction"] = r.degenerate_fraction;
        return d;
      },
      py::arg("f"), py::arg("half_width") = 1.25, py::arg("p") = 2.0);

  m.def(
      "invert_mapping",
      [](const ComplexArray& f, double half_width, double p) {
        const ComplexField field = from_numpy(f, half_width);
        const InverseMap g = invert_mapping(field, field.grid());
        py::dict d;
        d["g"] = to_numpy(g.g);
        d["mapped"] = mask_to_numpy(g.mapped, field.grid().n_side());
        d["roundtrip_max"] = g.roundtrip_max;
        d["mapped_fraction"] = g.mapped_fraction();
        if (g.mapped_fraction() >= 0.99) d["K_I_p_integral"] = inverse_dilatation_integral(g, p).integral;
        return d;
      },
      py::arg("f"), py::arg("half_width") = 1.25, py::arg("p") = 2.0,
      "Geometric inverse on the same grid, with the integral of K_{I,p}(w, g) when 99% of the disk is mapped.");

  py::class_<HolderReport>(m, "HolderReport")
      .def_readonly("fitted_C", &HolderReport::fitted_C)
      .def_readonly("r0", &HolderReport::r0)
      .def_readonly("q_l1", &HolderReport::q_l1)
      .def_readonly("scale_max", &HolderReport::scale_max)
      .def_readonly("decade_ratio", &HolderReport::decade_ratio)
      .def_readonly("bounded", &HolderReport::bounded)
      .def_readonly("pairs", &HolderReport::pairs);

  m.def(
      "log_holder_check",
      [](const ComplexArray& f, double half_width, double q_l1, double compact_radius, std::size_t n_pairs,
         std::uint64_t seed) {
        return log_holder_check(from_numpy(f, half_width), q_l1, compact_radius, n_pairs, seed);
      },
      py::arg("f"), py::arg("half_width") = 1.25, py::arg("q_l1") = 1.0, py::arg("compact_radius") = 0.9,
      py::arg("n_pairs") = 4000, py::arg("seed") = 0x5eed);

  m.def(
      "fmo_test",
      [](const RealPointFunction& Q, cplx z0, const std::vector<double>& eps) {
        return verdict_dict(fmo_test(Q, z0, eps));
      },
      py::arg("Q"), py::arg("z0"), py::arg("eps") = std::vector<double>{1e-1, 1e-2, 1e-3, 1e-4});
  m.def(
      "divergence_integral",
      [](const RealPointFunction& Q, cplx z0, double delta, const std::vector<double>& eps) {
        return verdict_dict(divergence_integral(Q, z0, delta, eps));
      },
      py::arg("Q"), py::arg("z0"), py::arg("delta"), py::arg("eps") = std::vector<double>{1e-1, 1e-2, 1e-3, 1e-4});
  m.def(
      "check_conditions",
      [](const RealPointFunction& Q, cplx z0, const std::vector<double>& singular_radii) {
        ConditionSettings settings;
        settings.singular_radii = singular_radii;
        const ConditionReport r = check_conditions(Q, z0, settings);
        py::dict d;
        d["fmo"] = to_string(r.fmo_verdict);
        d["divergence"] = to_string(r.divergence_verdict);
        d["ring"] = to_string(r.ring_verdict);
        d["integrability"] = to_string(r.integrability_verdict);
        d["fmo_limsup_estimate"] = r.fmo_limsup_estimate;
        d["q_l1_norm"] = r.q_l1_norm;
        d["q_l1_finite"] = r.q_l1_finite;
        return d;
      },
      py::arg("Q"), py::arg("z0") = cplx{}, py::arg("singular_radii") = std::vector<double>{});

  m.def(
      "save_bfld", [](const std::string& path, const ComplexArray& f, double half_width) {
        save_bfld(path, from_numpy(f, half_width));
      },
      py::arg("path"), py::arg("field"), py::arg("half_width") = 1.25);
  m.def(
      "load_bfld",
      [](const std::string& path) {
        const ComplexField f = load_bfld(path);
        return py::make_tuple(to_numpy(f), f.grid().half_width());
      },
      py::arg("path"), "Returns (array, half_width).");
}
