#pragma once

#include <array>
#include <string>
#include <vector>

#include "fibertrap/actuators.hpp"

namespace fibertrap::mechanics {

struct BeamSpec {
  double width = 5e-6;
  double thickness = 20e-6;
  double length = 390e-6;
  double youngs_modulus = 169e9;
  double yield_stress = 7e9;
  double density = 2570.0;

  void validate() const;
  bool operator==(const BeamSpec&) const = default;
};

enum class Axis { in_plane, vertical };

/// Beams of one axis: parallel_chains chains, each of series_segments beams
/// in series. parallel_chains may be fractional when it stands for an
/// effective beam count fitted to a measured stiffness.
struct AxisTopology {
  double parallel_chains = 160.0;
  int series_segments = 1;

  [[nodiscard]] double effective_count() const noexcept { return parallel_chains / series_segments; }
};

struct SuspensionSpec {
  BeamSpec beam;
  int beams_per_actuator = 40;
  int actuators = 4;
  AxisTopology in_plane{160.0, 1};
  AxisTopology vertical{160.0, 1};

  [[nodiscard]] int total_beams() const noexcept { return beams_per_actuator * actuators; }
  [[nodiscard]] const AxisTopology& topology(Axis a) const noexcept {
    return a == Axis::in_plane ? in_plane : vertical;
  }
  void validate() const;

  /// Stage suspension for a given beam width with the calibrated length and
  /// topologies. Material and thickness come from `base`; the in-plane
  /// calibration uses `comb`.
  [[nodiscard]] static SuspensionSpec reference(double width, const BeamSpec& base = {},
                                                const actuators::CombSpec& comb = {});
};

/// Stage, stage+bench, stage+bench+fiber.
struct LoadSpec {
  std::array<double, 3> masses{235e-9, 806e-9, 1806e-9};

  [[nodiscard]] double stage() const noexcept { return masses[0]; }
  [[nodiscard]] double without_fiber() const noexcept { return masses[1]; }
  [[nodiscard]] double full() const noexcept { return masses[2]; }
  void validate() const;
};

/// Fixed-guided beam: 12 E I / L^3.
[[nodiscard]] double beam_stiffness(const BeamSpec& beam, Axis axis);

[[nodiscard]] double suspension_stiffness(const SuspensionSpec& susp, Axis axis);

/// D = m g / k_vertical with the full load.
[[nodiscard]] double gravity_sag(const SuspensionSpec& susp, const LoadSpec& load);

/// Root stress of one beam when the stage moves by `deflection`; each beam in
/// a chain takes deflection / series_segments.
[[nodiscard]] double max_bending_stress(const SuspensionSpec& susp, double deflection, Axis axis);

struct SafetyFactor {
  double value = 0.0;
  bool infinite = false;
  bool unsafe = false;  // below 3
};

[[nodiscard]] SafetyFactor factor_of_safety(double stress, double yield_stress);

struct Mode {
  std::string axis;   // "x", "y" or "z"
  double frequency = 0.0;
};

/// Three translational modes, ascending in frequency.
[[nodiscard]] std::vector<Mode> modal_frequencies(const SuspensionSpec& susp, const LoadSpec& load,
                                                  bool with_fiber);

/// Beam length for which gravity_sag equals target_sag, in [100 um, 5 mm].
[[nodiscard]] double calibrate_beam_length(const SuspensionSpec& susp, double target_sag,
                                           const LoadSpec& load);

/// Parallel chain count that gives the requested axis stiffness.
[[nodiscard]] double calibrate_parallel_chains(const SuspensionSpec& susp, Axis axis,
                                               double target_stiffness);

}  // namespace fibertrap::mechanics
