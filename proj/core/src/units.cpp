#include "fibertrap/units.hpp"

#include <array>
#include <cctype>
#include <charconv>
#include <cstdio>
#include <stdexcept>
#include <utility>

namespace fibertrap {
namespace {

struct UnitEntry {
  std::string_view symbol;
  Dimension dimension;
  double factor;
};

constexpr double kE = constants::elementary_charge;

// Symbols are matched exactly after whitespace trimming.
constexpr std::array kUnits = {
    UnitEntry{"m", Dimension::length, 1.0},
    UnitEntry{"mm", Dimension::length, 1e-3},
    UnitEntry{"um", Dimension::length, 1e-6},
    UnitEntry{"\xC2\xB5m", Dimension::length, 1e-6},  // micro sign
    UnitEntry{"\xCE\xBCm", Dimension::length, 1e-6},  // greek mu
    UnitEntry{"nm", Dimension::length, 1e-9},
    UnitEntry{"cm", Dimension::length, 1e-2},
    UnitEntry{"m2", Dimension::area, 1.0},
    UnitEntry{"mm2", Dimension::area, 1e-6},
    UnitEntry{"um2", Dimension::area, 1e-12},
    UnitEntry{"V", Dimension::voltage, 1.0},
    UnitEntry{"mV", Dimension::voltage, 1e-3},
    UnitEntry{"kV", Dimension::voltage, 1e3},
    UnitEntry{"Hz", Dimension::frequency, 1.0},
    UnitEntry{"kHz", Dimension::frequency, 1e3},
    UnitEntry{"MHz", Dimension::frequency, 1e6},
    UnitEntry{"GHz", Dimension::frequency, 1e9},
    UnitEntry{"rad/s", Dimension::angular_frequency, 1.0},
    UnitEntry{"krad/s", Dimension::angular_frequency, 1e3},
    UnitEntry{"Mrad/s", Dimension::angular_frequency, 1e6},
    UnitEntry{"kg", Dimension::mass, 1.0},
    UnitEntry{"g", Dimension::mass, 1e-3},
    UnitEntry{"mg", Dimension::mass, 1e-6},
    UnitEntry{"ug", Dimension::mass, 1e-9},
    UnitEntry{"u", Dimension::mass, constants::atomic_mass_unit},
    UnitEntry{"C", Dimension::charge, 1.0},
    UnitEntry{"e", Dimension::charge, kE},
    UnitEntry{"C/m2", Dimension::surface_charge_density, 1.0},
    UnitEntry{"e/um2", Dimension::surface_charge_density, kE / 1e-12},
    UnitEntry{"Pa", Dimension::pressure, 1.0},
    UnitEntry{"kPa", Dimension::pressure, 1e3},
    UnitEntry{"MPa", Dimension::pressure, 1e6},
    UnitEntry{"GPa", Dimension::pressure, 1e9},
    UnitEntry{"N/m", Dimension::stiffness, 1.0},
    UnitEntry{"kg/m3", Dimension::density, 1.0},
    UnitEntry{"g/cm3", Dimension::density, 1e3},
};

std::string_view canonical_symbol(Dimension d) {
  switch (d) {
    case Dimension::dimensionless: return "";
    case Dimension::length: return "m";
    case Dimension::area: return "m2";
    case Dimension::voltage: return "V";
    case Dimension::frequency: return "Hz";
    case Dimension::angular_frequency: return "rad/s";
    case Dimension::mass: return "kg";
    case Dimension::charge: return "C";
    case Dimension::surface_charge_density: return "C/m2";
    case Dimension::pressure: return "Pa";
    case Dimension::stiffness: return "N/m";
    case Dimension::density: return "kg/m3";
  }
  return "";
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

}  // namespace

std::string_view to_string(Dimension d) noexcept {
  switch (d) {
    case Dimension::dimensionless: return "dimensionless";
    case Dimension::length: return "length";
    case Dimension::area: return "area";
    case Dimension::voltage: return "voltage";
    case Dimension::frequency: return "frequency";
    case Dimension::angular_frequency: return "angular frequency";
    case Dimension::mass: return "mass";
    case Dimension::charge: return "charge";
    case Dimension::surface_charge_density: return "surface charge density";
    case Dimension::pressure: return "pressure";
    case Dimension::stiffness: return "stiffness";
    case Dimension::density: return "density";
  }
  return "unknown";
}

double parse_quantity(std::string_view text, Dimension expected) {
  text = trim(text);
  if (text.empty()) throw std::invalid_argument("empty quantity");
  double value = 0.0;
  const auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{}) throw std::invalid_argument("expected a number, got '" + std::string(text) + "'");
  const std::string_view unit = trim(text.substr(static_cast<std::size_t>(end - text.data())));
  if (unit.empty()) return value;
  for (const auto& entry : kUnits) {
    if (entry.symbol != unit) continue;
    if (entry.dimension != expected) {
      throw std::invalid_argument("unit '" + std::string(unit) + "' is a " + std::string(to_string(entry.dimension)) +
                                  ", expected a " + std::string(to_string(expected)));
    }
    return value * entry.factor;
  }
  throw std::invalid_argument("unknown unit '" + std::string(unit) + "'");
}

std::string format_quantity(double value, Dimension d) {
  std::array<char, 64> buf{};
  std::snprintf(buf.data(), buf.size(), "%.17g", value);
  std::string out(buf.data());
  const auto sym = canonical_symbol(d);
  if (!sym.empty()) {
    out += ' ';
    out += sym;
  }
  return out;
}

}  // namespace fibertrap
