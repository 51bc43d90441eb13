#include "fibertrap/cavity.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "fibertrap/errors.hpp"
#include "fibertrap/units.hpp"

namespace fibertrap::cavity {

using constants::pi;
using constants::speed_of_light;

void CavitySpec::validate() const {
  if (!(length > 0.0) || !(radius1 > 0.0) || !(radius2 > 0.0) || !(finesse > 0.0)) {
    throw ValidationError("cavity.positive", "length, radii and finesse must be positive");
  }
  if (!(mirror_diameter > 0.0)) {
    throw ValidationError("cavity.mirror_diameter", "effective mirror diameter must be positive");
  }
}

void TransitionSpec::validate() const {
  if (!(wavelength > 0.0)) throw ValidationError("transition.wavelength", "must be positive");
  if (!(gamma_hz > 0.0)) throw ValidationError("transition.gamma", "must be positive");
  if (!(branching > 0.0 && branching <= 1.0)) {
    throw ValidationError("transition.branching", "beta must lie in (0, 1]");
  }
  if (!(eta > 0.0 && eta <= 1.0)) throw ValidationError("transition.eta", "eta must lie in (0, 1]");
}

Stability stability(double length, double r1, double r2) {
  const double g = (1.0 - length / r1) * (1.0 - length / r2);
  return {g, g >= 0.0 && g <= 1.0};
}

ModeGeometry mode_waist(const CavitySpec& spec, double wavelength) {
  spec.validate();
  const double g1 = 1.0 - spec.length / spec.radius1;
  const double g2 = 1.0 - spec.length / spec.radius2;
  const double p = g1 * g2;
  // Strictly inside the stability region; the boundaries have no finite waist.
  if (!(p > 0.0 && p < 1.0)) {
    throw DomainError("unstable cavity: g1*g2 = " + std::to_string(p) + " at L = " +
                      std::to_string(spec.length) + " m");
  }
  const double s = spec.length * wavelength / pi;
  const double denom = g1 + g2 - 2.0 * p;
  ModeGeometry m;
  m.waist = std::sqrt(s * std::sqrt(p * (1.0 - p) / (denom * denom)));
  m.spot1 = std::sqrt(s * std::sqrt(g2 / (g1 * (1.0 - p))));
  m.spot2 = std::sqrt(s * std::sqrt(g1 / (g2 * (1.0 - p))));
  m.waist_position = spec.length * g2 * (1.0 - g1) / denom;
  return m;
}

double mode_volume(const CavitySpec& spec, double wavelength) {
  const double w0 = mode_waist(spec, wavelength).waist;
  return pi * w0 * w0 * spec.length / 4.0;
}

double kappa(const CavitySpec& spec) {
  spec.validate();
  return speed_of_light / (4.0 * spec.length * spec.finesse);
}

double coupling_g(const CavitySpec& spec, const TransitionSpec& t) {
  t.validate();
  const double w0 = mode_waist(spec, t.wavelength).waist;
  const double gamma = 2.0 * pi * t.gamma_hz;
  const double lam = t.wavelength;
  const double g =
      t.eta * std::sqrt(3.0 * speed_of_light * lam * lam * t.branching * gamma /
                        (pi * pi * w0 * w0 * spec.length));
  return g / (2.0 * pi);
}

double clipping_margin(const CavitySpec& spec, double wavelength) {
  const auto m = mode_waist(spec, wavelength);
  return 0.5 * spec.mirror_diameter / std::max(m.spot1, m.spot2);
}

std::vector<CavityPoint> sweep_length(const CavitySpec& spec, const TransitionSpec& t,
                                      const std::vector<double>& lengths) {
  t.validate();
  std::vector<CavityPoint> out;
  out.reserve(lengths.size());
  for (double L : lengths) {
    CavitySpec s = spec;
    s.length = L;
    CavityPoint pt;
    pt.length = L;
    pt.gamma_hz = t.gamma_hz;
    const auto st = stability(L, s.radius1, s.radius2);
    pt.stable = st.g1g2 > 0.0 && st.g1g2 < 1.0;
    if (pt.stable) {
      const auto m = mode_waist(s, t.wavelength);
      pt.waist = m.waist;
      pt.spot1 = m.spot1;
      pt.spot2 = m.spot2;
      pt.g_hz = coupling_g(s, t);
      pt.kappa_hz = kappa(s);
      pt.strong_coupling = strong_coupling(pt.g_hz, pt.kappa_hz, pt.gamma_hz);
      pt.clipping_margin = clipping_margin(s, t.wavelength);
      pt.clipping_warning = pt.clipping_margin < 2.0;
    }
    out.push_back(pt);
  }
  return out;
}

double calibrate_eta(const CavitySpec& spec, TransitionSpec t, double target_g_hz) {
  t.eta = 1.0;
  const double base = coupling_g(spec, t);
  const double eta = target_g_hz / base;
  if (!(eta > 0.0) || eta > 1.0) {
    throw DomainError("target g needs eta = " + std::to_string(eta) + ", outside (0, 1]");
  }
  return eta;
}

const std::vector<TransitionPreset>& transition_presets() {
  // eta for 935 nm was obtained with calibrate_eta against g/2pi = 3.0 MHz at
  // L = 500 um; 369 nm would need eta slightly above 1 and is left at 1.
  static const std::vector<TransitionPreset> presets = {
      {"7a", "174Yb+", {"Yb+ 935 nm", 935.2e-9, 1.5e6, 0.018, 0.7864}, 97000.0, 3.0e6, 1.0e6},
      {"7b", "174Yb+", {"Yb+ 369 nm", 369.5e-9, 9.9e6, 0.995, 1.0}, 10000.0, 46e6, 25e6},
      {"7c", "40Ca+", {"Ca+ 854 nm", 854.2e-9, 11.5e6, 0.0587, 1.0}, 97000.0, 18e6, 1.5e6},
  };
  return presets;
}

const TransitionPreset& transition_preset(std::string_view id) {
  for (const auto& p : transition_presets()) {
    if (p.id == id) return p;
  }
  throw DomainError("unknown transition preset '" + std::string(id) + "' (7a, 7b, 7c)");
}

}  // namespace fibertrap::cavity
