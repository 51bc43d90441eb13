#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace fibertrap::cavity {

struct CavitySpec {
  double length = 500e-6;
  double radius1 = 350e-6;
  double radius2 = 350e-6;
  double finesse = 97000.0;
  double mirror_diameter = 100e-6;  // effective diameter used by the mode

  void validate() const;
  bool operator==(const CavitySpec&) const = default;
};

/// Atomic transition coupled to the cavity. gamma_hz is gamma/2pi, the
/// amplitude (half-width) decay rate.
struct TransitionSpec {
  std::string name;
  double wavelength = 0.0;
  double gamma_hz = 0.0;
  double branching = 1.0;  // beta
  double eta = 1.0;        // dipole/polarization factor

  void validate() const;
};

struct Stability {
  double g1g2 = 0.0;
  bool stable = false;
};

struct ModeGeometry {
  double waist = 0.0;       // w0
  double waist_position = 0.0;  // distance of the waist from mirror 1
  double spot1 = 0.0;       // spot radius on mirror 1
  double spot2 = 0.0;
};

struct CavityPoint {
  double length = 0.0;
  bool stable = false;
  double waist = 0.0;
  double spot1 = 0.0;
  double spot2 = 0.0;
  double g_hz = 0.0;
  double kappa_hz = 0.0;
  double gamma_hz = 0.0;
  bool strong_coupling = false;
  double clipping_margin = 0.0;
  bool clipping_warning = false;
};

[[nodiscard]] Stability stability(double length, double r1, double r2);

/// Gaussian mode of a two-mirror resonator. Throws DomainError when unstable.
[[nodiscard]] ModeGeometry mode_waist(const CavitySpec& spec, double wavelength);

/// Effective mode volume pi w0^2 L / 4.
[[nodiscard]] double mode_volume(const CavitySpec& spec, double wavelength);

/// kappa/2pi = c / (4 L F).
[[nodiscard]] double kappa(const CavitySpec& spec);

/// g/2pi = eta sqrt(3 c lambda^2 beta gamma / (pi^2 w0^2 L)) / 2pi, gamma angular.
[[nodiscard]] double coupling_g(const CavitySpec& spec, const TransitionSpec& t);

/// Effective mirror radius over the larger spot radius.
[[nodiscard]] double clipping_margin(const CavitySpec& spec, double wavelength);

[[nodiscard]] inline bool strong_coupling(double g, double kappa, double gamma) noexcept {
  return g > kappa && g > gamma;
}

/// One point per length. Unstable lengths are returned with stable = false.
[[nodiscard]] std::vector<CavityPoint> sweep_length(const CavitySpec& spec, const TransitionSpec& t,
                                                    const std::vector<double>& lengths);

/// Solves for eta so that g/2pi equals target_g_hz at the given cavity.
[[nodiscard]] double calibrate_eta(const CavitySpec& spec, TransitionSpec t, double target_g_hz);

/// Cavity transitions studied for the three ion species.
struct TransitionPreset {
  std::string id;          // figure panel: 7a, 7b, 7c
  std::string ion;
  TransitionSpec transition;
  double finesse = 0.0;
  double published_g_hz = 0.0;
  double published_kappa_hz = 0.0;
};

/// 174Yb+ 935 nm, 174Yb+ 369 nm, 40Ca+ 854 nm with frozen eta values.
[[nodiscard]] const std::vector<TransitionPreset>& transition_presets();
[[nodiscard]] const TransitionPreset& transition_preset(std::string_view id);

}  // namespace fibertrap::cavity
