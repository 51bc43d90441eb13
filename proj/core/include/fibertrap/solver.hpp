#pragma once

#include <cstdint>
#include <memory>
#include <vector>

#include "fibertrap/grid.hpp"

namespace fibertrap::electrostatics {

/// Variable-permittivity Poisson problem -div(eps_r grad u) = rho / eps0 on a
/// node-centred finite-volume discretisation. Fixed nodes carry Dirichlet
/// values; every other node whose dual cell touches the grid boundary has a
/// zero-flux condition there.
struct DirichletProblem {
  std::shared_ptr<const Grid3D> grid;
  std::vector<double> permittivity;   // relative, per node
  std::vector<std::uint8_t> fixed;    // nonzero = Dirichlet
  std::vector<double> fixed_value;    // volts, read where fixed
  std::vector<double> charge;         // coulomb per node; empty = none

  /// All nodes free, vacuum, no charge.
  [[nodiscard]] static DirichletProblem vacuum(std::shared_ptr<const Grid3D> grid);
  /// Fix every node on the six faces of the grid to `value`.
  void fix_box(double value);
  void validate() const;
};

struct SolverOptions {
  double tolerance = 1e-8;       // relative residual ||b - A u|| / ||b||
  int max_iterations = 500;
  int smoothing_steps = 1;       // alternating line-relaxation sweeps before and after
  int coarsest_sweeps = 60;
  bool multigrid = true;         // false: Jacobi-preconditioned CG
};

struct SolveStats {
  int iterations = 0;
  double relative_residual = 0.0;
  std::vector<double> history;
  int levels = 0;
};

struct Solution {
  std::vector<double> values;   // potential at every node
  SolveStats stats;
};

/// Preconditioned conjugate gradients with a geometric multigrid V-cycle.
/// Throws SolverError with the residual history when it does not converge.
[[nodiscard]] Solution solve(const DirichletProblem& problem, const SolverOptions& options = {});

/// Applies the assembled operator to u including Dirichlet couplings and
/// returns the residual rhs - A u on free nodes (zero on fixed nodes).
[[nodiscard]] std::vector<double> residual(const DirichletProblem& problem,
                                           const std::vector<double>& u);

}  // namespace fibertrap::electrostatics
