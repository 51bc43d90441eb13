#include <gtest/gtest.h>

#include <cmath>
#include <optional>

#include "fibertrap/actuators.hpp"
#include "fibertrap/errors.hpp"
#include "fibertrap/units.hpp"

using namespace fibertrap;
using namespace fibertrap::actuators;

namespace {

// Smallest z in (0, d0) with k z >= eps0 A V^2 / (2 (d0 - z)^2), by a plain
// scan with n steps followed by bisection.
std::optional<double> scan_root(const PlateSpec& p, double k, double v, int n = 20000) {
  const double c = constants::epsilon0 * p.area * v * v / 2.0;
  auto f = [&](double z) { return k * z - c / ((p.rest_gap - z) * (p.rest_gap - z)); };
  double prev = 0.0;
  for (int i = 1; i < n; ++i) {
    const double z = p.rest_gap * i / n;
    if (f(z) >= 0.0) {
      double lo = prev, hi = z;
      for (int it = 0; it < 100; ++it) {
        const double m = 0.5 * (lo + hi);
        (f(m) < 0.0 ? lo : hi) = m;
      }
      return 0.5 * (lo + hi);
    }
    prev = z;
  }
  return std::nullopt;
}

}  // namespace

TEST(Comb, ForceIsIndependentOfPositionAndQuadratic) {
  const CombSpec s;
  const double f1 = comb_force(s, 10.0), f2 = comb_force(s, 20.0);
  EXPECT_NEAR(f2 / f1, 4.0, 1e-12);
  // Force is the derivative of the co-energy C V^2 / 2.
  const double h = 1e-9;
  const double dc = (comb_capacitance(s, h) - comb_capacitance(s, -h)) / (2 * h);
  EXPECT_NEAR(0.5 * dc * 100.0, f1, 1e-9 * f1);
}

TEST(Comb, StrokeCurveIsExactlyQuadratic) {
  const auto c = comb_stroke_curve(CombSpec{}, 20.0, 300.0, 60);
  EXPECT_LT(c.fit_residual, 1e-9);
  EXPECT_NEAR(c.loglog_exponent, 2.0, 1e-9);
  EXPECT_FALSE(c.exceeds_rated);
  EXPECT_TRUE(comb_stroke_curve(CombSpec{}, 20.0, 350.0, 10).exceeds_rated);
}

TEST(Comb, DisplacementInverseInStiffness) {
  const CombSpec s;
  EXPECT_NEAR(comb_displacement(s, 10.0, 50.0) / comb_displacement(s, 40.0, 50.0), 4.0, 1e-12);
  EXPECT_THROW((void)comb_displacement(s, 0.0, 50.0), DomainError);
}

TEST(Comb, RejectsInvalidSpec) {
  CombSpec s;
  s.gap = 0.0;
  EXPECT_THROW((void)comb_force(s, 1.0), ValidationError);
}

TEST(Plate, EquilibriumMatchesRootScan) {
  const PlateSpec p;
  const double k = 5.0;
  const double vpi = pull_in_voltage(p, k);
  for (double frac : {0.1, 0.5, 0.8, 0.95, 0.999}) {
    const auto eq = zplate_equilibrium(p, k, frac * vpi);
    const auto oracle = scan_root(p, k, frac * vpi);
    ASSERT_TRUE(oracle.has_value());
    ASSERT_FALSE(eq.pulled_in);
    EXPECT_NEAR(eq.z, *oracle, 1e-6 * p.rest_gap) << frac;
  }
}

TEST(Plate, PullInAtOneThirdGap) {
  const PlateSpec p;
  const double k = 5.0;
  const double vpi = pull_in_voltage(p, k);
  EXPECT_FALSE(scan_root(p, k, 1.001 * vpi).has_value());
  const auto below = scan_root(p, k, 0.99999 * vpi);
  ASSERT_TRUE(below.has_value());
  EXPECT_NEAR(*below / p.rest_gap, 1.0 / 3.0, 0.01 / 3.0);
  EXPECT_TRUE(zplate_equilibrium(p, k, 1.001 * vpi).pulled_in);
}

TEST(Plate, PullInVoltageScaling) {
  PlateSpec p;
  const double v1 = pull_in_voltage(p, 2.0);
  EXPECT_NEAR(pull_in_voltage(p, 8.0) / v1, 2.0, 1e-12);
  p.rest_gap *= 4.0;
  EXPECT_NEAR(pull_in_voltage(p, 2.0) / v1, 8.0, 1e-12);
}

TEST(Plate, StrokeCurveSteepensBeyondQuadratic) {
  const PlateSpec p;
  const double k = 5.0;
  const auto c = plate_stroke_curve(p, k, 0.9 * pull_in_voltage(p, k), 40);
  EXPECT_FALSE(c.pulled_in);
  EXPECT_GT(c.loglog_exponent, 2.0);
  EXPECT_GT(c.deviation_onset, 0.0);
  for (std::size_t i = 1; i < c.displacement.size(); ++i) {
    EXPECT_GT(c.displacement[i], c.displacement[i - 1]);
  }
}

TEST(Plate, CurveTruncatesAtPullIn) {
  const PlateSpec p;
  const double k = 5.0;
  const auto c = plate_stroke_curve(p, k, 1.5 * pull_in_voltage(p, k), 30);
  EXPECT_TRUE(c.pulled_in);
  EXPECT_LT(c.voltage.back(), pull_in_voltage(p, k) * (1 + 1e-12));
}
