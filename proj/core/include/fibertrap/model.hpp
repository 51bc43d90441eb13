#pragma once

#include <array>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "fibertrap/units.hpp"

namespace fibertrap::model {

/// A trapped ion. Mass in kg, charge in C.
struct IonSpecies {
  std::string name;
  double mass = 0.0;
  double charge = 0.0;

  /// Known isotopes: Yb171, Yb174, Ca40 (singly charged).
  [[nodiscard]] static IonSpecies from_name(std::string_view name);
  void validate() const;
  bool operator==(const IonSpecies&) const = default;
};

/// RF drive of the trap rails. The pseudopotential uses the angular frequency
/// directly: U = q^2 |E|^2 / (4 m omega^2).
struct RFDrive {
  double amplitude = 150.0;           // V
  double angular_frequency = 2.0e7;   // rad/s

  void validate() const;
  bool operator==(const RFDrive&) const = default;
};

struct Rect {
  double x0 = 0.0, x1 = 0.0, y0 = 0.0, y1 = 0.0;

  [[nodiscard]] bool contains(double x, double y) const noexcept {
    return x >= x0 && x <= x1 && y >= y0 && y <= y1;
  }
  [[nodiscard]] bool overlaps(const Rect& o) const noexcept {
    return x0 < o.x1 && o.x0 < x1 && y0 < o.y1 && o.y0 < y1;
  }
  bool operator==(const Rect&) const = default;
};

enum class ElectrodeRole { rf, inner_dc, outer_dc, slot };

/// Outer DC electrodes carry a voltage group (A or B) per the chip's wiring;
/// side_x/side_y give the quadrant used by the compensation deltas.
struct Electrode {
  std::string name;
  ElectrodeRole role = ElectrodeRole::slot;
  Rect region;
  char group = '-';
  int side_x = 0;
  int side_y = 0;
  bool operator==(const Electrode&) const = default;
};

/// Dimensions of the planar chip. All lengths in metres, measured in the
/// chip plane (x lateral, y along the trap and cavity axis).
struct LayoutParams {
  double gap = 8e-6;
  double slot_width = 151e-6;
  double inner_rail_width = 40e-6;
  double rf_rail_width = 69e-6;
  double outer_width = 124e-6;
  double b_length = 125e-6;     // centre B segment, along y
  double a_length = 296e-6;     // each A segment, along y
  int a_count = 1;              // A segments per side of B, per x side
  double rail_half_length = 1.5e-3;

  void validate() const;
  bool operator==(const LayoutParams&) const = default;
};

/// Named electrode regions generated from LayoutParams. Everything on the
/// chip plane outside the listed regions and their gaps is grounded.
class ElectrodeLayout {
 public:
  ElectrodeLayout() : ElectrodeLayout(reference_params()) {}
  explicit ElectrodeLayout(LayoutParams params);

  /// Reference dimensions, calibrated so the bare-chip trap sits near 169 um.
  [[nodiscard]] static LayoutParams reference_params();

  [[nodiscard]] const LayoutParams& params() const noexcept { return params_; }
  [[nodiscard]] const std::vector<Electrode>& electrodes() const noexcept { return electrodes_; }
  [[nodiscard]] const Electrode* find(std::string_view name) const;

  /// Half-extent of the patterned region (x, y).
  [[nodiscard]] std::array<double, 2> half_extent() const noexcept;

  /// Open intervals of inter-electrode gaps along x (at y = 0) and along y
  /// (within the outer DC column). Used to check grid resolution.
  [[nodiscard]] std::vector<std::array<double, 2>> x_gaps() const;
  [[nodiscard]] std::vector<std::array<double, 2>> y_gaps() const;

  /// All electrode edges, useful as grid breakpoints.
  [[nodiscard]] std::vector<double> x_edges() const;
  [[nodiscard]] std::vector<double> y_edges() const;

  /// Layout reflected across the trap axis (x -> -x), names re-sorted.
  [[nodiscard]] ElectrodeLayout mirrored_x() const;

  bool operator==(const ElectrodeLayout& o) const { return params_ == o.params_; }

 private:
  LayoutParams params_;
  std::vector<Electrode> electrodes_;
};

enum class Coating { bare, grounded_metal, biased_metal };

[[nodiscard]] std::string_view to_string(Coating c) noexcept;
[[nodiscard]] Coating coating_from_string(std::string_view s);

/// Two fibers on the trap axis, tips facing each other across the ion.
struct FiberAssembly {
  double diameter = 250e-6;
  double height = 169e-6;          // axis height above the chip plane
  double tip_minus_y = -500e-6;    // tip of the fiber on the -y side
  double tip_plus_y = 500e-6;      // tip of the fiber on the +y side
  double permittivity = 3.8;
  Coating coating = Coating::bare;
  double coating_voltage = 0.0;     // used when biased_metal
  double facet_charge_density = 0.0;  // C/m^2, signed

  [[nodiscard]] double radius() const noexcept { return 0.5 * diameter; }
  [[nodiscard]] double cavity_length() const noexcept { return tip_plus_y - tip_minus_y; }
  [[nodiscard]] bool coated() const noexcept { return coating != Coating::bare; }

  /// Symmetric pair with separation L at the given height.
  [[nodiscard]] static FiberAssembly centred(double cavity_length, double height);
  void validate() const;
  bool operator==(const FiberAssembly&) const = default;
};

/// Electrode voltages. Outer A electrodes sit at V_A + V_offset and B at
/// V_B + V_offset, plus the compensation deltas: -dU_x on the +x side and
/// +dU_x on the -x side, so a positive dU_x pushes a positive ion towards +x;
/// likewise dU_y for the A segments at +y/-y; dU_z on every outer electrode.
struct VoltageSet {
  double v_a = 0.0;
  double v_b = 0.0;
  double v_offset = 0.0;
  double du_x = 0.0;
  double du_y = 0.0;
  double du_z = 0.0;
  double inner_rail = 0.0;

  [[nodiscard]] double electrode_voltage(const Electrode& e) const noexcept;
  void validate() const;
  bool operator==(const VoltageSet&) const = default;
};

/// Half-widths of the simulation box; the chip plane is z = 0.
struct DomainBox {
  double half_x = 3.0e-3;
  double half_y = 3.0e-3;
  double top_z = 3.0e-3;
  bool operator==(const DomainBox&) const = default;
};

/// Discretisation and solver settings for the field solves.
struct GridSettings {
  double fine_spacing = 2e-6;     // at electrode edges and fiber surfaces
  double trap_spacing = 5e-6;     // inside the box around the trapping site
  double max_spacing = 150e-6;
  double growth = 0.5;            // spacing increase per unit distance from a feature
  double tolerance = 1e-8;        // relative residual
  int max_iterations = 500;

  void validate() const;
  bool operator==(const GridSettings&) const = default;
};

/// Immutable aggregate of chip, fibers, and domain.
class TrapGeometry {
 public:
  TrapGeometry(ElectrodeLayout layout, std::optional<FiberAssembly> fiber, DomainBox domain);

  [[nodiscard]] const ElectrodeLayout& layout() const noexcept { return layout_; }
  [[nodiscard]] const std::optional<FiberAssembly>& fiber() const noexcept { return fiber_; }
  [[nodiscard]] const DomainBox& domain() const noexcept { return domain_; }

  /// Copy with a different fiber assembly (or none).
  [[nodiscard]] TrapGeometry with_fiber(std::optional<FiberAssembly> fiber) const;

  bool operator==(const TrapGeometry&) const = default;

 private:
  ElectrodeLayout layout_;
  std::optional<FiberAssembly> fiber_;
  DomainBox domain_;
};

/// Fiber configurations studied for the trapping potential.
enum class FiberCase { none, bare, coated, charged };

[[nodiscard]] std::string_view to_string(FiberCase c) noexcept;
[[nodiscard]] FiberCase fiber_case_from_string(std::string_view s);

/// Fiber axis height used for each case.
[[nodiscard]] double default_fiber_height(FiberCase c) noexcept;

/// Electrode voltages used for each case (offset 0; tuned separately for the
/// charged case).
[[nodiscard]] VoltageSet default_voltages(FiberCase c) noexcept;

/// Facet charge used for the charged case: 5 e per square micrometre.
[[nodiscard]] constexpr double default_facet_charge_density() noexcept {
  return 5.0 * constants::elementary_charge / 1e-12;
}

/// Fiber assembly for a case at cavity length L (nullopt for FiberCase::none).
[[nodiscard]] std::optional<FiberAssembly> fiber_for_case(FiberCase c, double cavity_length);

}  // namespace fibertrap::model
