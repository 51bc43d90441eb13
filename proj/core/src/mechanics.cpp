#include "fibertrap/mechanics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "fibertrap/actuators.hpp"
#include "fibertrap/errors.hpp"
#include "fibertrap/units.hpp"

namespace fibertrap::mechanics {

void BeamSpec::validate() const {
  for (double v : {width, thickness, length, youngs_modulus, yield_stress, density}) {
    if (!(v > 0.0) || !std::isfinite(v)) {
      throw ValidationError("beam.positive", "beam parameters must be positive");
    }
  }
}

void SuspensionSpec::validate() const {
  beam.validate();
  if (beams_per_actuator < 1 || actuators < 1) {
    throw ValidationError("suspension.counts", "beam and actuator counts must be >= 1");
  }
  for (const auto* t : {&in_plane, &vertical}) {
    if (!(t->parallel_chains > 0.0) || t->series_segments < 1) {
      throw ValidationError("suspension.topology", "chains must be positive and series segments >= 1");
    }
  }
}

void LoadSpec::validate() const {
  if (!(masses[0] > 0.0 && masses[1] > masses[0] && masses[2] > masses[1])) {
    throw ValidationError("load.increasing", "masses must be positive and increasing");
  }
}

double beam_stiffness(const BeamSpec& beam, Axis axis) {
  beam.validate();
  const double w = beam.width, t = beam.thickness, L = beam.length;
  const double inertia = axis == Axis::in_plane ? t * w * w * w / 12.0 : w * t * t * t / 12.0;
  return 12.0 * beam.youngs_modulus * inertia / (L * L * L);
}

double suspension_stiffness(const SuspensionSpec& susp, Axis axis) {
  susp.validate();
  const auto& topo = susp.topology(axis);
  return beam_stiffness(susp.beam, axis) * topo.effective_count();
}

double gravity_sag(const SuspensionSpec& susp, const LoadSpec& load) {
  load.validate();
  return load.full() * constants::standard_gravity / suspension_stiffness(susp, Axis::vertical);
}

double max_bending_stress(const SuspensionSpec& susp, double deflection, Axis axis) {
  susp.validate();
  const auto& b = susp.beam;
  const double c = 0.5 * (axis == Axis::in_plane ? b.width : b.thickness);
  const double per_beam = deflection / susp.topology(axis).series_segments;
  return 3.0 * b.youngs_modulus * c * std::abs(per_beam) / (b.length * b.length);
}

SafetyFactor factor_of_safety(double stress, double yield_stress) {
  if (!(yield_stress > 0.0)) throw DomainError("yield stress must be positive");
  if (stress == 0.0) return {std::numeric_limits<double>::infinity(), true, false};
  if (!(stress > 0.0)) throw DomainError("stress must be positive");
  const double v = yield_stress / stress;
  return {v, false, v < 3.0};
}

std::vector<Mode> modal_frequencies(const SuspensionSpec& susp, const LoadSpec& load,
                                    bool with_fiber) {
  load.validate();
  const double m = with_fiber ? load.full() : load.without_fiber();
  const double kip = suspension_stiffness(susp, Axis::in_plane);
  const double kv = suspension_stiffness(susp, Axis::vertical);
  auto f = [m](double k) { return std::sqrt(k / m) / (2.0 * constants::pi); };
  std::vector<Mode> modes{{"z", f(kv)}, {"x", f(kip)}, {"y", f(kip)}};
  std::stable_sort(modes.begin(), modes.end(),
                   [](const Mode& a, const Mode& b) { return a.frequency < b.frequency; });
  return modes;
}

double calibrate_beam_length(const SuspensionSpec& susp, double target_sag, const LoadSpec& load) {
  if (!(target_sag > 0.0)) throw DomainError("target sag must be positive");
  constexpr double lo = 100e-6, hi = 5e-3;
  // Sag scales as L^3 for every topology, so one evaluation fixes L.
  SuspensionSpec s = susp;
  s.beam.length = 1e-3;
  const double sag_ref = gravity_sag(s, load);
  const double L = 1e-3 * std::cbrt(target_sag / sag_ref);
  if (L < lo || L > hi) {
    throw DomainError("no beam length in [100 um, 5 mm] gives sag " + std::to_string(target_sag) +
                      " m (needs " + std::to_string(L) + " m)");
  }
  return L;
}

double calibrate_parallel_chains(const SuspensionSpec& susp, Axis axis, double target_stiffness) {
  if (!(target_stiffness > 0.0)) throw DomainError("target stiffness must be positive");
  const double per_chain = beam_stiffness(susp.beam, axis) / susp.topology(axis).series_segments;
  const double chains = target_stiffness / per_chain;
  return chains;
}

SuspensionSpec SuspensionSpec::reference(double width, const BeamSpec& base,
                                         const actuators::CombSpec& comb) {
  // Calibration chain, each step fixed by one published number:
  //  1. in-plane stiffness at w = 4 um: 400 nm stroke at 20 V;
  //  2. beam length: in-plane FOS of 13 at w = 4 um and the rated comb voltage;
  //  3. vertical stiffness at w = 5 um: 0.97 um sag under the full load.
  // In-plane chains are single beams; vertical chains have 3 segments.
  SuspensionSpec s;
  s.beam = base;
  s.in_plane = {1.0, 1};
  s.vertical = {1.0, 3};
  const double w4 = 4e-6;
  const double k_in_plane = actuators::comb_force(comb, 20.0) / 400e-9;
  const double stroke = actuators::comb_force(comb, comb.rated_voltage) / k_in_plane;
  const double fos_target = 13.0;
  s.beam.length = std::sqrt(3.0 * s.beam.youngs_modulus * 0.5 * w4 * stroke * fos_target /
                            s.beam.yield_stress);
  s.beam.width = w4;
  s.in_plane.parallel_chains = calibrate_parallel_chains(s, Axis::in_plane, k_in_plane);
  s.beam.width = 5e-6;
  const LoadSpec load;
  s.vertical.parallel_chains =
      calibrate_parallel_chains(s, Axis::vertical, load.full() * constants::standard_gravity / 0.97e-6);
  s.beam.width = width;
  s.validate();
  return s;
}

}  // namespace fibertrap::mechanics
