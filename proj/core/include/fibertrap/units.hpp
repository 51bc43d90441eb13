#pragma once

#include <numbers>
#include <string>
#include <string_view>

namespace fibertrap {

namespace constants {
inline constexpr double pi = std::numbers::pi;
inline constexpr double epsilon0 = 8.8541878128e-12;      // F/m
inline constexpr double elementary_charge = 1.602176634e-19;  // C
inline constexpr double atomic_mass_unit = 1.66053906660e-27;  // kg
inline constexpr double speed_of_light = 299792458.0;     // m/s
inline constexpr double standard_gravity = 9.80665;       // m/s^2
}  // namespace constants

/// Physical dimension of a configuration quantity.
enum class Dimension {
  dimensionless,
  length,
  area,
  voltage,
  frequency,
  angular_frequency,
  mass,
  charge,
  surface_charge_density,
  pressure,
  stiffness,
  density,
};

[[nodiscard]] std::string_view to_string(Dimension d) noexcept;

/// Parses "<number> [unit]" into SI. A bare number is accepted for any
/// dimension and taken to be SI already. Throws std::invalid_argument with a
/// message naming the offending unit.
[[nodiscard]] double parse_quantity(std::string_view text, Dimension expected);

/// Formats an SI value with the canonical unit used when writing configs.
[[nodiscard]] std::string format_quantity(double value, Dimension d);

}  // namespace fibertrap
