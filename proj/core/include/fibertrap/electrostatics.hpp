#pragma once

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "fibertrap/field.hpp"
#include "fibertrap/model.hpp"
#include "fibertrap/solver.hpp"

namespace fibertrap::electrostatics {

/// Electrode group ids. Outer DC groups are per quadrant: "A+x+y", "A+x-y",
/// "A-x+y", "A-x-y", "B+x", "B-x".
inline const std::string group_rf = "RF";
inline const std::string group_inner = "INNER";
inline const std::string group_coating = "COATING";

[[nodiscard]] std::string group_of(const model::Electrode& e);

/// Groups that can be solved for this geometry (COATING only with a coated fiber).
[[nodiscard]] std::vector<std::string> electrode_groups(const model::TrapGeometry& geometry);

/// Graded grid resolving electrode edges, fiber surfaces and the region
/// around the expected trapping height.
[[nodiscard]] std::shared_ptr<const Grid3D> build_grid(const model::TrapGeometry& geometry,
                                                       const model::GridSettings& settings,
                                                       double trap_height);

/// Throws ValidationError("grid.gap_resolution") when a gap of the layout
/// contains no free node.
void check_gap_resolution(const model::TrapGeometry& geometry, const Grid3D& grid);

/// Node classification of a geometry on a grid.
struct Rasterization {
  std::shared_ptr<const Grid3D> grid;
  std::vector<double> permittivity;
  std::vector<int> owner;            // -1 free, 0 grounded, >0 index into groups + 1
  std::vector<std::string> groups;   // owner - 1 -> group id
  std::vector<double> facet_area;    // dual area of facet nodes (m^2), 0 elsewhere
};

[[nodiscard]] Rasterization rasterize(const model::TrapGeometry& geometry,
                                      std::shared_ptr<const Grid3D> grid);

/// Unit-volt solution for one electrode group; every other conductor at 0 V.
[[nodiscard]] ScalarField3D solve_basis(const model::TrapGeometry& geometry,
                                        std::shared_ptr<const Grid3D> grid, const std::string& group,
                                        const SolverOptions& options = {});
[[nodiscard]] ScalarField3D solve_basis(const Rasterization& raster, const std::string& group,
                                        const SolverOptions& options = {},
                                        SolveStats* stats = nullptr);

/// Potential of the fiber facet charge with all conductors grounded.
[[nodiscard]] ScalarField3D solve_charge(const model::TrapGeometry& geometry,
                                         std::shared_ptr<const Grid3D> grid,
                                         const SolverOptions& options = {});
[[nodiscard]] ScalarField3D solve_charge(const model::TrapGeometry& geometry,
                                         const Rasterization& raster,
                                         const SolverOptions& options = {},
                                         SolveStats* stats = nullptr);

/// Unit-volt fields per electrode group plus the optional charge field.
class BasisSet {
 public:
  BasisSet() = default;

  /// Solves the requested groups (all groups when empty) and the charge field
  /// when the fiber is charged. Mirror-image groups are obtained by reflection
  /// when the grid and geometry allow it. `jobs` bounds concurrent solves.
  [[nodiscard]] static BasisSet solve(const model::TrapGeometry& geometry,
                                      std::shared_ptr<const Grid3D> grid,
                                      std::vector<std::string> groups = {},
                                      const SolverOptions& options = {}, int jobs = 1,
                                      bool use_symmetry = true);

  void insert(const std::string& group, ScalarField3D field);
  void set_charge(ScalarField3D field);

  [[nodiscard]] bool has(const std::string& group) const { return fields_.count(group) != 0; }
  [[nodiscard]] const ScalarField3D& at(const std::string& group) const;
  [[nodiscard]] const std::optional<ScalarField3D>& charge() const noexcept { return charge_; }
  [[nodiscard]] const std::map<std::string, ScalarField3D>& fields() const noexcept { return fields_; }
  [[nodiscard]] std::shared_ptr<const Grid3D> grid() const;

  /// Total CG iterations spent in the solves (for diagnostics).
  int iterations = 0;

 private:
  std::map<std::string, ScalarField3D> fields_;
  std::optional<ScalarField3D> charge_;
};

/// Voltage applied to each group by a voltage set.
[[nodiscard]] std::map<std::string, double> group_voltages(const model::VoltageSet& volts,
                                                           double coating_voltage = 0.0);

/// DC potential: sum of group voltages times basis fields, plus the charge
/// field. Groups with zero voltage may be absent from the basis.
[[nodiscard]] ScalarField3D compose(const BasisSet& basis, const model::VoltageSet& volts,
                                    double coating_voltage = 0.0, bool include_charge = true);

}  // namespace fibertrap::electrostatics
