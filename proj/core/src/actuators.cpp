#include "fibertrap/actuators.hpp"

#include <cmath>

#include "fibertrap/errors.hpp"
#include "fibertrap/units.hpp"

namespace fibertrap::actuators {

using constants::epsilon0;

void CombSpec::validate() const {
  if (count < 1) throw ValidationError("comb.count", "at least one comb unit");
  if (!(thickness > 0.0 && gap > 0.0 && overlap > 0.0)) {
    throw ValidationError("comb.positive", "thickness, gap and overlap must be positive");
  }
}

void PlateSpec::validate() const {
  if (!(area > 0.0 && rest_gap > 0.0)) {
    throw ValidationError("plate.positive", "area and rest gap must be positive");
  }
}

double comb_capacitance(const CombSpec& spec, double x) {
  spec.validate();
  if (!(x + spec.overlap > 0.0)) {
    throw DomainError("comb engagement x + x0 must be positive");
  }
  return 2.0 * spec.count * epsilon0 * spec.thickness * (x + spec.overlap) / spec.gap;
}

double comb_force(const CombSpec& spec, double voltage) {
  spec.validate();
  return spec.count * epsilon0 * spec.thickness / spec.gap * voltage * voltage;
}

double comb_displacement(const CombSpec& spec, double stiffness, double voltage) {
  if (!(stiffness > 0.0)) throw DomainError("stiffness must be positive");
  return comb_force(spec, voltage) / stiffness;
}

double pull_in_voltage(const PlateSpec& spec, double stiffness) {
  spec.validate();
  if (!(stiffness > 0.0)) throw DomainError("stiffness must be positive");
  const double d = spec.rest_gap;
  return std::sqrt(8.0 * stiffness * d * d * d / (27.0 * epsilon0 * spec.area));
}

PlateEquilibrium zplate_equilibrium(const PlateSpec& spec, double stiffness, double voltage) {
  spec.validate();
  if (!(stiffness > 0.0)) throw DomainError("stiffness must be positive");
  if (voltage == 0.0) return {0.0, false};
  const double d = spec.rest_gap;
  const double c = epsilon0 * spec.area * voltage * voltage / 2.0;
  // f(z) = k z (d - z)^2 - c. On [0, d/3] f is increasing; a stable root
  // exists iff f(d/3) >= 0.
  auto f = [&](double z) { return stiffness * z * (d - z) * (d - z) - c; };
  auto df = [&](double z) { return stiffness * (d - z) * (d - 3.0 * z); };
  double lo = 0.0, hi = d / 3.0;
  if (f(hi) < 0.0) return {hi, true};
  for (int i = 0; i < 200 && hi - lo > 1e-12; ++i) {
    const double mid = 0.5 * (lo + hi);
    (f(mid) < 0.0 ? lo : hi) = mid;
    if (hi - lo < 1e-3 * d) break;
  }
  double z = 0.5 * (lo + hi);
  for (int i = 0; i < 60; ++i) {
    const double slope = df(z);
    double next = slope > 0.0 ? z - f(z) / slope : 0.5 * (lo + hi);
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    (f(next) < 0.0 ? lo : hi) = next;
    const bool done = std::abs(next - z) < 1e-15;
    z = next;
    if (done || hi - lo < 1e-15) break;
  }
  return {z, false};
}

namespace {

double through_origin_fit(const ActuatorCurve& c, std::size_t n) {
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double v2 = c.voltage[i] * c.voltage[i];
    num += v2 * c.displacement[i];
    den += v2 * v2;
  }
  return den > 0.0 ? num / den : 0.0;
}

void finish_curve(ActuatorCurve& c, std::size_t fit_points) {
  c.fit_coefficient = through_origin_fit(c, fit_points);
  c.fit_max_voltage = fit_points ? c.voltage[fit_points - 1] : 0.0;
  double ss = 0.0, norm = 0.0;
  for (std::size_t i = 0; i < c.voltage.size(); ++i) {
    const double r = c.displacement[i] - c.fit_coefficient * c.voltage[i] * c.voltage[i];
    ss += r * r;
    norm += c.displacement[i] * c.displacement[i];
  }
  c.fit_residual = norm > 0.0 ? std::sqrt(ss / norm) : 0.0;
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int n = 0;
  for (std::size_t i = 0; i < c.voltage.size(); ++i) {
    if (c.voltage[i] <= 0.0 || c.displacement[i] <= 0.0) continue;
    const double x = std::log(c.voltage[i]), y = std::log(c.displacement[i]);
    sx += x; sy += y; sxx += x * x; sxy += x * y;
    ++n;
  }
  if (n >= 2) c.loglog_exponent = (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

std::vector<double> voltage_grid(double v_max, int steps) {
  if (!(v_max > 0.0)) throw DomainError("maximum voltage must be positive");
  if (steps < 2) throw DomainError("a stroke curve needs at least two steps");
  std::vector<double> v(static_cast<std::size_t>(steps) + 1);
  for (int i = 0; i <= steps; ++i) v[static_cast<std::size_t>(i)] = v_max * i / steps;
  return v;
}

}  // namespace

ActuatorCurve comb_stroke_curve(const CombSpec& spec, double stiffness, double v_max, int steps) {
  ActuatorCurve c;
  c.voltage = voltage_grid(v_max, steps);
  for (double v : c.voltage) c.displacement.push_back(comb_displacement(spec, stiffness, v));
  c.exceeds_rated = v_max > spec.rated_voltage;
  finish_curve(c, c.voltage.size());
  return c;
}

ActuatorCurve plate_stroke_curve(const PlateSpec& spec, double stiffness, double v_max, int steps) {
  ActuatorCurve c;
  c.exceeds_rated = v_max > spec.rated_voltage;
  const double d = spec.rest_gap;
  const double small_signal = epsilon0 * spec.area / (2.0 * stiffness * d * d);
  std::size_t fit_points = 0;
  for (double v : voltage_grid(v_max, steps)) {
    const auto eq = zplate_equilibrium(spec, stiffness, v);
    if (eq.pulled_in) {
      c.pulled_in = true;
      break;
    }
    c.voltage.push_back(v);
    c.displacement.push_back(eq.z);
    const double law = small_signal * v * v;
    if (c.deviation_onset == 0.0 && v > 0.0 && (eq.z - law) > 0.01 * law) {
      c.deviation_onset = v;
    }
    if (c.deviation_onset == 0.0) fit_points = c.voltage.size();
  }
  finish_curve(c, fit_points);
  return c;
}

}  // namespace fibertrap::actuators
