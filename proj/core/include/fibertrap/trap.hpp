#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "fibertrap/electrostatics.hpp"
#include "fibertrap/field.hpp"
#include "fibertrap/model.hpp"

namespace fibertrap::trap {

using electrostatics::ScalarField3D;
using electrostatics::Vec3;

/// Ray directions, in order +x, -x, +y, -y, +z, -z.
enum class Direction { plus_x, minus_x, plus_y, minus_y, plus_z, minus_z };

[[nodiscard]] std::string_view to_string(Direction d) noexcept;

/// Depth along one ray from the minimum.
struct RayDepth {
  double depth = 0.0;         // eV
  double distance = 0.0;      // m, from the minimum to the maximum (or edge)
  bool edge_limited = false;  // no local maximum before the grid boundary
};

struct DepthReport {
  std::array<RayDepth, 6> rays{};

  /// Smaller of the two ray depths on each axis.
  [[nodiscard]] Vec3 per_axis() const noexcept;
  [[nodiscard]] Direction shallowest() const noexcept;
  [[nodiscard]] double minimum() const noexcept;
};

/// Fit windows relative to the minimum, in metres.
struct FitRanges {
  std::array<std::array<double, 2>, 3> window{{{-70e-6, 70e-6}, {-100e-6, 100e-6}, {-18e-6, 6e-6}}};
  double sample_step = 0.5e-6;
  double harmonic_tolerance = 0.05;
  double residual_tolerance = 0.05;
};

struct TrapReport {
  std::string tag;
  Vec3 position{};                 // m
  double energy_at_minimum = 0.0;  // eV
  Vec3 curvature{};                // fitted a_i in eV/m^2
  Vec3 frequency{};                // omega_i / 2 pi in Hz
  Vec3 fit_residual{};             // rms misfit over the fitted energy span
  std::array<std::array<double, 2>, 3> harmonic_range{};  // offsets from the minimum, m
  DepthReport depth;
  double v_offset = 0.0;           // V, as applied

  [[nodiscard]] double height() const noexcept { return position[2]; }
};

/// Energy along an axis-aligned line through a point, integrated from the
/// interpolated directional derivative. Exact for quadratic fields.
class AxisProfile {
 public:
  AxisProfile(const ScalarField3D& field, const Vec3& origin, int axis);

  [[nodiscard]] int axis() const noexcept { return axis_; }
  /// Offsets reachable inside the grid.
  [[nodiscard]] double lower() const noexcept { return s_.front(); }
  [[nodiscard]] double upper() const noexcept { return s_.back(); }

  /// Value relative to the origin, and slope, at offset s.
  [[nodiscard]] double delta(double s) const;
  [[nodiscard]] double slope(double s) const;

  /// Breakpoints (grid nodes crossed) and the origin, ascending.
  [[nodiscard]] const std::vector<double>& breakpoints() const noexcept { return s_; }

 private:
  int axis_;
  std::vector<double> s_, v_, d_;
  [[nodiscard]] std::size_t segment(double s) const;
};

/// Nodewise q^2 A^2 |grad psi|^2 / (4 m Omega^2) in eV for the unit-volt RF
/// solution psi. Throws ValidationError for a zero drive frequency.
[[nodiscard]] ScalarField3D pseudopotential(const ScalarField3D& rf_basis, const model::RFDrive& drive,
                                            const model::IonSpecies& species);

/// Total energy in eV: pseudopotential plus q * DC potential.
[[nodiscard]] ScalarField3D total_energy(const ScalarField3D& pseudo, const ScalarField3D& dc,
                                         const model::IonSpecies& species);

struct MinimumOptions {
  double gradient_tolerance = 1.0;  // eV/m (1e-3 eV/mm)
  double max_step = 20e-6;
  int max_iterations = 200;
  std::array<bool, 3> free_axes{true, true, true};
};

/// Local minimiser by safeguarded Newton descent on the interpolated field.
/// Throws AnalysisError (with the trajectory) on escape or non-convergence.
[[nodiscard]] Vec3 find_minimum(const ScalarField3D& energy, const Vec3& seed,
                                const MinimumOptions& options = {});

struct AxisFit {
  double curvature = 0.0;       // eV/m^2
  double frequency = 0.0;       // Hz
  double residual = 0.0;
  std::array<double, 2> harmonic_range{};
};

/// Quadratic fit along one axis through a point over [lo, hi] (offsets).
/// Throws AnalysisError on non-positive curvature or a window off the grid.
[[nodiscard]] AxisFit fit_axis(const ScalarField3D& energy, const Vec3& point, int axis,
                               const model::IonSpecies& species, const FitRanges& ranges = {});

/// Quadratic fits along each axis through the minimum. Throws AnalysisError
/// on non-positive curvature.
[[nodiscard]] TrapReport fit_frequencies(const ScalarField3D& energy, const Vec3& minimum,
                                         const model::IonSpecies& species,
                                         const FitRanges& ranges = {});

/// Angular frequency for a curvature a (eV/m^2): sqrt(2 a e_q / m).
[[nodiscard]] double secular_angular_frequency(double curvature, const model::IonSpecies& species);

/// First local maximum along each ray from the minimum.
[[nodiscard]] DepthReport trap_depth(const ScalarField3D& energy, const Vec3& minimum);

/// Minimum, fits and depths in one call.
[[nodiscard]] TrapReport analyze(const ScalarField3D& energy, const Vec3& seed,
                                 const model::IonSpecies& species, const FitRanges& ranges = {});

/// RF null near the seed: minimum of the pseudopotential in the x-z plane.
[[nodiscard]] Vec3 rf_null(const ScalarField3D& pseudo, const Vec3& seed);

struct OffsetResult {
  double v_offset = 0.0;
  Vec3 rf_null{};
  double dc_height = 0.0;  // height where the DC z-derivative vanishes on the null line
};

/// Offset voltage that puts the DC stationary point along z on the RF null.
/// The DC potential is affine in the offset, so the root is found from two
/// compositions. Throws AnalysisError when it lies outside [-50, 50] V.
[[nodiscard]] OffsetResult tune_offset(const electrostatics::BasisSet& basis,
                                       const ScalarField3D& pseudo, const model::VoltageSet& volts,
                                       double coating_voltage, const Vec3& seed,
                                       double bracket = 50.0);

/// Everything needed to compute one trapping configuration.
struct TrapSetup {
  std::string tag;
  model::TrapGeometry geometry;
  model::VoltageSet voltages;
  model::RFDrive drive;
  model::IonSpecies species;
  model::GridSettings grid;
  double expected_height = 160e-6;
  bool tune_offset = false;
  FitRanges ranges;
};

/// Solved fields for a setup. The basis holds the groups the voltages use.
struct TrapFields {
  electrostatics::BasisSet basis;
  std::optional<ScalarField3D> pseudo;
  int iterations = 0;
};

[[nodiscard]] TrapFields solve_fields(const TrapSetup& setup, int jobs = 1);

/// Analysis of solved fields (offset tuning when requested).
[[nodiscard]] TrapReport analyze_setup(const TrapSetup& setup, const TrapFields& fields);

/// solve_fields followed by analyze_setup.
[[nodiscard]] TrapReport solve_trap(const TrapSetup& setup, int jobs = 1);

struct SweepRow {
  double cavity_length = 0.0;  // m
  model::FiberCase fiber_case = model::FiberCase::bare;
  bool ok = false;
  std::string error;
  TrapReport report;
};

/// Setup for a fiber case at one cavity length, derived from a base setup:
/// case fiber height, Table voltages, offset tuning for the charged case.
[[nodiscard]] TrapSetup case_setup(const TrapSetup& base, model::FiberCase fiber_case,
                                   double cavity_length);

/// One row per length, fields re-solved per geometry. Rows are computed
/// concurrently up to `jobs`; failed rows are recorded and the sweep goes on.
[[nodiscard]] std::vector<SweepRow> sweep_cavity_length(const TrapSetup& base,
                                                        model::FiberCase fiber_case,
                                                        const std::vector<double>& lengths,
                                                        int jobs = 1);

struct CompensationPoint {
  Vec3 delta{};         // (dU_x, dU_y, dU_z) in V
  Vec3 displacement{};  // m, relative to the uncompensated minimum
};

struct CompensationFit {
  Vec3 sensitivity{};  // m/V, displacement along axis i per dU_i
  Vec3 r_squared{};
};

/// Minimum displacement for each set of compensation deltas, using solved
/// fields. Throws AnalysisError when the minimum is lost.
[[nodiscard]] std::vector<CompensationPoint> compensation_response(
    const TrapSetup& setup, const TrapFields& fields, const std::vector<Vec3>& deltas);

/// Single-axis scans: each axis in turn over the given voltages, with linear
/// fits of the displacement along that axis.
[[nodiscard]] CompensationFit fit_compensation(const std::vector<CompensationPoint>& points);

}  // namespace fibertrap::trap
