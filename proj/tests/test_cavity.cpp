#include <gtest/gtest.h>

#include <cmath>

#include "fibertrap/cavity.hpp"
#include "fibertrap/errors.hpp"
#include "fibertrap/units.hpp"

using namespace fibertrap;
using namespace fibertrap::cavity;

namespace {

constexpr double c0 = constants::speed_of_light;
constexpr double pi = constants::pi;

// Symmetric two-mirror resonator: w0^2 = (lambda / 2 pi) sqrt(L (2R - L)).
double symmetric_waist(double L, double R, double lambda) {
  return std::sqrt(lambda / (2 * pi) * std::sqrt(L * (2 * R - L)));
}

}  // namespace

TEST(Cavity, KappaClosedForm) {
  CavitySpec s;
  s.length = 500e-6;
  s.finesse = 97000;
  EXPECT_NEAR(kappa(s), c0 / (4 * 500e-6 * 97000), 1e-9);
  EXPECT_NEAR(kappa(s) / 1e6, 1.5453, 1e-3);
}

TEST(Cavity, KappaScalesInverselyWithLength) {
  CavitySpec a, b;
  a.length = 200e-6;
  b.length = 600e-6;
  EXPECT_NEAR(kappa(a) / kappa(b), 3.0, 1e-12);
}

TEST(Cavity, StabilityBoundaries) {
  EXPECT_TRUE(stability(500e-6, 350e-6, 350e-6).stable);
  EXPECT_FALSE(stability(710e-6, 350e-6, 350e-6).stable);
  EXPECT_NEAR(stability(350e-6, 350e-6, 350e-6).g1g2, 0.0, 1e-15);
}

TEST(Cavity, WaistMatchesSymmetricOracle) {
  for (double L : {50e-6, 200e-6, 500e-6, 690e-6}) {
    CavitySpec s;
    s.length = L;
    const auto m = mode_waist(s, 854e-9);
    EXPECT_NEAR(m.waist, symmetric_waist(L, 350e-6, 854e-9), 1e-12 * 1e6) << L;
    EXPECT_NEAR(m.waist_position, L / 2, 1e-12);
    EXPECT_NEAR(m.spot1, m.spot2, 1e-15);
  }
}

TEST(Cavity, UnstableLengthThrows) {
  CavitySpec s;
  s.length = 800e-6;
  EXPECT_THROW((void)mode_waist(s, 854e-9), DomainError);
}

TEST(Cavity, CouplingClosedForm) {
  CavitySpec s;
  s.length = 500e-6;
  const TransitionSpec t{"Ca+ 854 nm", 854.2e-9, 11.5e6, 0.0587, 1.0};
  const double w0 = symmetric_waist(500e-6, 350e-6, 854.2e-9);
  const double gamma = 2 * pi * 11.5e6;
  const double g = std::sqrt(3 * c0 * std::pow(854.2e-9, 2) * 0.0587 * gamma / (pi * pi * w0 * w0 * 500e-6));
  EXPECT_NEAR(coupling_g(s, t), g / (2 * pi), 1e-6 * g);
}

TEST(Cavity, CouplingScalesWithEta) {
  CavitySpec s;
  TransitionSpec t{"x", 935e-9, 1.5e6, 0.018, 1.0};
  const double g1 = coupling_g(s, t);
  t.eta = 0.5;
  EXPECT_NEAR(coupling_g(s, t), 0.5 * g1, 1e-12 * g1);
}

TEST(Cavity, CalibrateEtaRoundTrip) {
  CavitySpec s;
  TransitionSpec t{"x", 935e-9, 1.5e6, 0.018, 1.0};
  const double eta = calibrate_eta(s, t, 2.0e6);
  t.eta = eta;
  EXPECT_NEAR(coupling_g(s, t), 2.0e6, 1e-3);
  EXPECT_THROW((void)calibrate_eta(s, t, 1e12), DomainError);
}

TEST(Cavity, SweepMarksUnstableLengths) {
  const auto& p = transition_preset("7c");
  CavitySpec s;
  s.finesse = p.finesse;
  const auto pts = sweep_length(s, p.transition, {100e-6, 500e-6, 750e-6});
  ASSERT_EQ(pts.size(), 3u);
  EXPECT_TRUE(pts[0].stable);
  EXPECT_TRUE(pts[1].stable);
  EXPECT_FALSE(pts[2].stable);
  EXPECT_GT(pts[0].g_hz, pts[1].g_hz);
}

TEST(Cavity, StrongCouplingRule) {
  EXPECT_TRUE(strong_coupling(3.0, 2.0, 1.0));
  EXPECT_FALSE(strong_coupling(3.0, 4.0, 1.0));
  EXPECT_FALSE(strong_coupling(3.0, 1.0, 3.5));
}

TEST(Cavity, PresetsAreKnown) {
  EXPECT_EQ(transition_presets().size(), 3u);
  EXPECT_EQ(transition_preset("7c").ion, "40Ca+");
  EXPECT_THROW((void)transition_preset("7d"), DomainError);
}
