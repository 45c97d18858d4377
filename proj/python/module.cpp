#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "multisym/acceptance.hpp"
#include "multisym/perturbation.hpp"

namespace py = pybind11;
using namespace multisym;

namespace {

std::vector<double> to_vector(const py::array_t<double>& a) {
  auto buf = a.request();
  const double* p = static_cast<const double*>(buf.ptr);
  return std::vector<double>(p, p + buf.size);
}

py::array_t<double> grid_to_array(const Grid2& g) {
  py::array_t<double> out({g.nt(), g.nx()});
  std::copy(g.data().begin(), g.data().end(), out.mutable_data());
  return out;
}

Grid2 array_to_grid(const py::array_t<double>& a) {
  auto buf = a.request();
  if (buf.ndim != 2) throw std::invalid_argument("expected a 2d array (nt, nx)");
  Grid2 g(static_cast<int>(buf.shape[0]), static_cast<int>(buf.shape[1]));
  const double* p = static_cast<const double*>(buf.ptr);
  std::copy(p, p + buf.size, g.data().begin());
  return g;
}

LagrangianDensity named_problem(const std::string& name) {
  if (name == "flat") return LagrangianDensity::trivial22();
  if (name == "quadratic") return LagrangianDensity::harmonic_map22();
  if (name == "curl") return LagrangianDensity::maxwell22();
  throw std::invalid_argument("unknown problem '" + name + "' (flat | quadratic | curl)");
}

double named_closed_form(const std::string& name, const LepagePoint& P) {
  if (name == "flat") return trivial_hamiltonian(P);
  if (name == "quadratic") return harmonic_hamiltonian(P);
  return maxwell_hamiltonian(P);
}

LepagePoint point_from(double e, const py::array_t<double>& p, double r) {
  auto buf = p.request();
  if (buf.ndim != 2 || buf.shape[0] != 2 || buf.shape[1] != 2)
    throw std::invalid_argument("momentum block must be 2x2");
  const double* d = static_cast<const double*>(buf.ptr);
  LepagePoint P;
  P.e = e;
  P.p << d[0], d[1], d[2], d[3];
  P.r = r;
  return P;
}

}  // namespace

PYBIND11_MODULE(_multisym, m) {
  m.doc() = "lattice multisymplectic field-theory core";

  m.def(
      "evolve_scalar",
      [](const py::array_t<double>& phi0, const py::array_t<double>& phidot0, double mass,
         double lambda, int nt, double dt, double dx) {
        auto f0 = to_vector(phi0);
        Lattice1p1 lat(nt, static_cast<int>(f0.size()), dt, dx);
        return grid_to_array(evolve_scalar(f0, to_vector(phidot0), mass, lambda, lat));
      },
      py::arg("phi0"), py::arg("phidot0"), py::arg("m"), py::arg("lam"), py::arg("nt"),
      py::arg("dt"), py::arg("dx"),
      "Explicit three-level evolution of phi_tt = phi_xx - m^2 phi - lam phi^2 on a periodic "
      "grid.");

  m.def(
      "lift",
      [](const py::array_t<double>& phi, double mass, double lambda, double h0, double dt,
         double dx) {
        Grid2 g = array_to_grid(phi);
        Lattice1p1 lat(g.nt(), g.nx(), dt, dx);
        HamiltonianCurve c = lift_to_curve(g, mass, lambda, h0, lat);
        py::dict out;
        out["phi"] = grid_to_array(c.phi);
        out["p0"] = grid_to_array(c.p0);
        out["p1"] = grid_to_array(c.p1);
        out["e"] = grid_to_array(c.e);
        return out;
      },
      py::arg("phi"), py::arg("m"), py::arg("lam"), py::arg("h0"), py::arg("dt"), py::arg("dx"));

  m.def(
      "hamilton_flow_residual",
      [](const py::array_t<double>& phi, double mass, double lambda, double dt, double dx) {
        Grid2 g = array_to_grid(phi);
        Lattice1p1 lat(g.nt(), g.nx(), dt, dx);
        HamiltonianCurve c = lift_to_curve(g, mass, lambda, 0.0, lat);
        DWChart dw(2, 1);
        HamiltonianDensity H = HamiltonianDensity::scalar_cubic(
            dw, MetricSignature::minkowski_1p1(), mass, lambda);
        return verify_hamilton_flow(c, H, dw);
      },
      py::arg("phi"), py::arg("m"), py::arg("lam"), py::arg("dt"), py::arg("dx"),
      "Max residual of the canonical flow equation over interior sites.");

  m.def(
      "lepage_hamiltonian",
      [](const std::string& problem, double e, const py::array_t<double>& p, double r) {
        LagrangianDensity L = named_problem(problem);
        LepagePoint P = point_from(e, p, r);
        Vec x = Vec::Zero(2), y = Vec::Zero(2);
        LepageSolveResult res = lepage_hamiltonian(L, x, y, P);
        py::dict out;
        out["h"] = res.hamiltonian;
        out["closed_form"] = named_closed_form(problem, P);
        out["residual"] = res.residual;
        out["iterations"] = res.iterations;
        return out;
      },
      py::arg("problem"), py::arg("e"), py::arg("p"), py::arg("r"),
      "Stationary-point Hamiltonian on the full fiber chart, with its closed form.");

  m.def(
      "retarded_green",
      [](double mass, int nt, int nx, double dt, double dx, int ts, int xs) {
        Lattice1p1 lat(nt, nx, dt, dx);
        return grid_to_array(LatticeGreen(mass, lat).response(ts, xs));
      },
      py::arg("m"), py::arg("nt"), py::arg("nx"), py::arg("dt"), py::arg("dx"), py::arg("ts"),
      py::arg("xs"), "Unit-cell impulse response of D_tt - D_xx + m^2, vanishing for t <= ts.");

  m.def(
      "lambda_scaling",
      [](const py::array_t<double>& phi0, const py::array_t<double>& phi1, double mass, int t0,
         int t1, double dt, double dx, const std::vector<double>& lambdas) {
        ScalingConfig config;
        Grid2 kernel = array_to_grid(phi1);
        config.lattice = Lattice1p1(kernel.nt(), kernel.nx(), dt, dx);
        config.m = mass;
        config.slab = {t0, t1};
        config.phi0 = to_vector(phi0);
        config.phidot0 = std::vector<double>(config.lattice.nx, 0.0);
        config.phi1 = kernel;
        config.lambdas = lambdas;
        ScalingReport rep = lambda_scaling_study(config);
        py::list rows;
        for (const auto& row : rep.rows) {
          py::dict d;
          d["lam"] = row.lambda;
          d["r1"] = row.r1;
          d["r2"] = row.r2;
          rows.append(d);
        }
        py::dict out;
        out["rows"] = rows;
        if (rep.slopes_defined) {
          out["slope1"] = rep.slope_r1;
          out["slope2"] = rep.slope_r2;
        } else {
          out["slope1"] = py::none();
          out["slope2"] = py::none();
        }
        return out;
      },
      py::arg("phi0"), py::arg("phi1"), py::arg("m"), py::arg("t0"), py::arg("t1"), py::arg("dt"),
      py::arg("dx"), py::arg("lambdas"),
      "First-order and corrected boundary functionals per coupling, with fitted slopes.");

  m.def(
      "run_criterion",
      [](int id, bool quick) {
        auto r = acceptance::run_criterion(id, quick);
        py::dict out;
        out["id"] = r.id;
        out["name"] = r.name;
        out["pass"] = r.pass();
        out["details"] = py::module_::import("json").attr("loads")(r.details.dump());
        return out;
      },
      py::arg("id"), py::arg("quick") = true, "Run one acceptance criterion (1..11).");
}
