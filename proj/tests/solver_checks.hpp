#pragma once

// Reference problems for the field solver, shared by the unit tests and the
// acceptance runner.

#include <algorithm>
#include <cmath>
#include <memory>
#include <vector>

#include "fibertrap/grid.hpp"
#include "fibertrap/solver.hpp"
#include "fibertrap/units.hpp"

namespace fibertrap::checks {

using electrostatics::DirichletProblem;
using electrostatics::Grid3D;
using electrostatics::SolverOptions;

inline std::vector<double> dual_widths(const std::vector<double>& c) {
  std::vector<double> d(c.size(), 0.0);
  for (std::size_t i = 0; i + 1 < c.size(); ++i) {
    d[i] += 0.5 * (c[i + 1] - c[i]);
    d[i + 1] += 0.5 * (c[i + 1] - c[i]);
  }
  return d;
}

/// Max nodal error for u = sin(pi x) sin(pi y) sin(pi z) on the unit cube
/// with n nodes per axis. With stretch > 0 the axes are smoothly graded.
inline double manufactured_error(int n, double stretch = 0.0, const SolverOptions& opt = {}) {
  const double pi = constants::pi;
  std::vector<double> c(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    const double s = static_cast<double>(i) / (n - 1);
    c[static_cast<std::size_t>(i)] = s + stretch * std::sin(pi * s) / pi;
  }
  auto g = std::make_shared<Grid3D>(c, c, c);
  auto p = DirichletProblem::vacuum(g);
  p.fix_box(0.0);
  p.charge.assign(g->size(), 0.0);
  const auto d = dual_widths(c);
  auto exact = [&](int i, int j, int k) {
    return std::sin(pi * c[i]) * std::sin(pi * c[j]) * std::sin(pi * c[k]);
  };
  for (int k = 0; k < n; ++k)
    for (int j = 0; j < n; ++j)
      for (int i = 0; i < n; ++i)
        p.charge[g->index(i, j, k)] = constants::epsilon0 * 3 * pi * pi * exact(i, j, k) * d[i] * d[j] * d[k];
  const auto sol = electrostatics::solve(p, opt);
  double err = 0.0;
  for (int k = 0; k < n; ++k)
    for (int j = 0; j < n; ++j)
      for (int i = 0; i < n; ++i)
        err = std::max(err, std::abs(sol.values[g->index(i, j, k)] - exact(i, j, k)));
  return err;
}

/// Observed orders between successive refinements (n -> 2n - 1).
inline std::vector<double> manufactured_orders(const std::vector<int>& sizes, double stretch = 0.0) {
  std::vector<double> e, orders;
  for (int n : sizes) e.push_back(manufactured_error(n, stretch));
  for (std::size_t i = 1; i < e.size(); ++i) {
    const double ratio = static_cast<double>(sizes[i] - 1) / (sizes[i - 1] - 1);
    orders.push_back(std::log(e[i - 1] / e[i]) / std::log(ratio));
  }
  return orders;
}

/// Two-layer capacitor: plates at z = 0 (0 V) and z = 1 (1 V), relative
/// permittivity eps_low below z = 0.5, vacuum above, insulating side walls.
/// Returns the max error against the piecewise-linear exact solution,
/// relative to the 1 V plate voltage.
inline double layered_capacitor_error(int n, double eps_low = 4.0) {
  std::vector<double> xy(16);
  for (int i = 0; i < 16; ++i) xy[static_cast<std::size_t>(i)] = i / 15.0;
  std::vector<double> z(static_cast<std::size_t>(n));
  for (int k = 0; k < n; ++k) z[static_cast<std::size_t>(k)] = static_cast<double>(k) / (n - 1);
  auto g = std::make_shared<Grid3D>(xy, xy, z);
  auto p = DirichletProblem::vacuum(g);
  for (int k = 0; k < n; ++k)
    for (int j = 0; j < 16; ++j)
      for (int i = 0; i < 16; ++i) {
        const auto m = g->index(i, j, k);
        if (z[k] < 0.5) p.permittivity[m] = eps_low;
        if (k == 0 || k == n - 1) {
          p.fixed[m] = 1;
          p.fixed_value[m] = k == 0 ? 0.0 : 1.0;
        }
      }
  SolverOptions opt;
  opt.tolerance = 1e-12;
  const auto sol = electrostatics::solve(p, opt);
  // Series layers: eps_low E1 = E2, 0.5 (E1 + E2) = 1.
  const double e1 = 2.0 / (1.0 + eps_low), e2 = eps_low * e1;
  double err = 0.0;
  for (int k = 0; k < n; ++k) {
    const double exact = z[k] < 0.5 ? e1 * z[k] : 0.5 * e1 + e2 * (z[k] - 0.5);
    for (int j = 0; j < 16; ++j)
      for (int i = 0; i < 16; ++i) err = std::max(err, std::abs(sol.values[g->index(i, j, k)] - exact));
  }
  return err;
}

/// Electrode patch problem used by the invariant checks: a box grounded on
/// its faces with two plates on the floor at +-x and a dielectric block.
struct PatchProblem {
  std::shared_ptr<const Grid3D> grid;
  DirichletProblem left, right;  // unit volts on one plate each
};

inline PatchProblem patch_problem(int n = 33) {
  std::vector<double> xy(static_cast<std::size_t>(n)), z(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    const double s = -1.0 + 2.0 * i / (n - 1);
    xy[static_cast<std::size_t>(i)] = s * std::abs(s) * 0.5 + s * 0.5;
    z[static_cast<std::size_t>(i)] = (1.0 + xy[static_cast<std::size_t>(i)]) * 0.5;
  }
  auto g = std::make_shared<Grid3D>(xy, xy, z);
  PatchProblem out{g, DirichletProblem::vacuum(g), DirichletProblem::vacuum(g)};
  for (auto* p : {&out.left, &out.right}) {
    p->fix_box(0.0);
    for (int k = 0; k < n; ++k)
      for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i) {
          const double x = xy[i], y = xy[j], zz = z[k];
          if (std::abs(x) < 0.3 && std::abs(y) < 0.4 && zz > 0.2 && zz < 0.45) {
            p->permittivity[g->index(i, j, k)] = 3.8;
          }
        }
  }
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) {
      const double x = xy[i], y = xy[j];
      if (std::abs(y) > 0.5) continue;
      const auto m = g->index(i, j, 0);
      if (x > 0.1 && x < 0.6) out.right.fixed_value[m] = 1.0;
      if (x < -0.1 && x > -0.6) out.left.fixed_value[m] = 1.0;
    }
  return out;
}

/// Max |u(a + b) - u(a) - u(b)| relative to max |u(a + b)|.
inline double superposition_error() {
  const auto pp = patch_problem();
  SolverOptions opt;
  opt.tolerance = 1e-13;
  opt.max_iterations = 2000;
  auto both = pp.left;
  for (std::size_t n = 0; n < both.fixed_value.size(); ++n) {
    both.fixed_value[n] = 2.0 * pp.left.fixed_value[n] - 0.5 * pp.right.fixed_value[n];
  }
  const auto a = electrostatics::solve(pp.left, opt).values;
  const auto b = electrostatics::solve(pp.right, opt).values;
  const auto c = electrostatics::solve(both, opt).values;
  double err = 0.0, scale = 0.0;
  for (std::size_t n = 0; n < c.size(); ++n) {
    err = std::max(err, std::abs(c[n] - 2.0 * a[n] + 0.5 * b[n]));
    scale = std::max(scale, std::abs(c[n]));
  }
  return err / scale;
}

/// Max |u_left(x) - u_right(-x)| relative to max |u_right|.
inline double mirror_error() {
  const auto pp = patch_problem();
  SolverOptions opt;
  opt.tolerance = 1e-13;
  opt.max_iterations = 2000;
  const auto a = electrostatics::solve(pp.left, opt).values;
  const auto b = electrostatics::solve(pp.right, opt).values;
  const Grid3D& g = *pp.grid;
  double err = 0.0, scale = 0.0;
  for (int k = 0; k < g.nz(); ++k)
    for (int j = 0; j < g.ny(); ++j)
      for (int i = 0; i < g.nx(); ++i) {
        const double u = a[g.index(i, j, k)], v = b[g.index(g.nx() - 1 - i, j, k)];
        err = std::max(err, std::abs(u - v));
        scale = std::max(scale, std::abs(v));
      }
  return err / scale;
}

}  // namespace fibertrap::checks
