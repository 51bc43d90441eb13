#pragma once

#include <vector>

namespace fibertrap::actuators {

/// Interdigitated comb: N units, finger thickness h, finger gap d, overlap x0.
struct CombSpec {
  int count = 240;
  double thickness = 30e-6;
  double gap = 3e-6;
  double overlap = 20e-6;
  double rated_voltage = 300.0;

  void validate() const;
  bool operator==(const CombSpec&) const = default;
};

/// Parallel-plate z actuator: overlap area A and rest gap d0.
struct PlateSpec {
  double area = 0.40e-6;
  double rest_gap = 30e-6;
  double rated_voltage = 240.0;

  void validate() const;
  bool operator==(const PlateSpec&) const = default;
};

/// C(x) = 2 N eps0 h (x + x0) / d.
[[nodiscard]] double comb_capacitance(const CombSpec& spec, double x);

/// F = N eps0 h V^2 / d, independent of x.
[[nodiscard]] double comb_force(const CombSpec& spec, double voltage);

/// x = N eps0 h V^2 / (k d).
[[nodiscard]] double comb_displacement(const CombSpec& spec, double stiffness, double voltage);

struct PlateEquilibrium {
  double z = 0.0;
  bool pulled_in = false;
};

/// Smallest root of k z = eps0 A V^2 / (2 (d0 - z)^2); pulled_in when none
/// exists below d0/3.
[[nodiscard]] PlateEquilibrium zplate_equilibrium(const PlateSpec& spec, double stiffness,
                                                  double voltage);

/// V_pi = sqrt(8 k d0^3 / (27 eps0 A)).
[[nodiscard]] double pull_in_voltage(const PlateSpec& spec, double stiffness);

enum class ActuatorKind { comb, plate };

struct ActuatorCurve {
  std::vector<double> voltage;
  std::vector<double> displacement;
  double fit_coefficient = 0.0;   // a in x = a V^2, m/V^2
  double fit_residual = 0.0;      // relative RMS residual over the whole curve
  double fit_max_voltage = 0.0;   // upper end of the points used by the fit
  double loglog_exponent = 0.0;   // slope of log x vs log V
  double deviation_onset = 0.0;   // first V with >1% departure from V^2 (0 if none)
  bool pulled_in = false;         // curve truncated at pull-in
  bool exceeds_rated = false;     // V_max above the rated voltage
};

[[nodiscard]] ActuatorCurve comb_stroke_curve(const CombSpec& spec, double stiffness,
                                              double v_max, int steps);
[[nodiscard]] ActuatorCurve plate_stroke_curve(const PlateSpec& spec, double stiffness,
                                               double v_max, int steps);

}  // namespace fibertrap::actuators
