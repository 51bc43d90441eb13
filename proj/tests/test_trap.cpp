#include <gtest/gtest.h>

#include <cmath>
#include <memory>

#include "fibertrap/errors.hpp"
#include "fibertrap/trap.hpp"
#include "fibertrap/units.hpp"

using namespace fibertrap;
using namespace fibertrap::trap;
using electrostatics::FieldKind;
using electrostatics::Grid3D;

namespace {

constexpr double um = 1e-6;
const Vec3 centre{3 * um, -7 * um, 152 * um};

std::shared_ptr<const Grid3D> box() {
  return std::make_shared<Grid3D>(Grid3D::uniform({-200 * um, -250 * um, 0.0}, {200 * um, 250 * um, 320 * um},
                                                  {81, 51, 65}));
}

template <class Fn>
ScalarField3D sample(const std::shared_ptr<const Grid3D>& g, Fn fn, FieldKind kind = FieldKind::energy) {
  std::vector<double> v(g->size());
  for (int k = 0; k < g->nz(); ++k)
    for (int j = 0; j < g->ny(); ++j)
      for (int i = 0; i < g->nx(); ++i)
        v[g->index(i, j, k)] = fn(g->coords(0)[i], g->coords(1)[j], g->coords(2)[k]);
  return ScalarField3D(g, std::move(v), kind);
}

// Bowl with curvatures a (eV/m^2) about `centre`.
ScalarField3D bowl(const Vec3& a) {
  return sample(box(), [a](double x, double y, double z) {
    const double dx = x - centre[0], dy = y - centre[1], dz = z - centre[2];
    return 0.25 + a[0] * dx * dx + a[1] * dy * dy + a[2] * dz * dz;
  });
}

const model::IonSpecies yb = model::IonSpecies::from_name("Yb171");

double omega_of(double a) { return std::sqrt(2 * a * yb.charge / yb.mass); }

// Linear quadrupole of radius r0 centred at height zn: psi = (x^2 - (z - zn)^2) / (2 r0^2).
ScalarField3D quadrupole(double r0, double zn) {
  return sample(
      box(),
      [=](double x, double, double z) { return (x * x - (z - zn) * (z - zn)) / (2 * r0 * r0); },
      FieldKind::potential);
}

}  // namespace

TEST(Fit, QuadraticFieldGivesClosedFormFrequencies) {
  const Vec3 a{4.0e8, 6.0e7, 9.0e8};
  const auto e = bowl(a);
  const auto r = fit_frequencies(e, centre, yb);
  for (int i = 0; i < 3; ++i) {
    EXPECT_NEAR(r.curvature[i], a[i], 1e-10 * a[i]);
    EXPECT_NEAR(r.frequency[i], omega_of(a[i]) / (2 * constants::pi), 1e-10 * r.frequency[i]);
    EXPECT_LT(r.fit_residual[i], 1e-10);
  }
  EXPECT_NEAR(r.harmonic_range[0][0], -(centre[0] + 200 * um), 0.5 * um);
}

TEST(Fit, SecularFrequencyFormula) {
  EXPECT_NEAR(secular_angular_frequency(1e9, yb), omega_of(1e9), 1e-6);
}

TEST(Fit, RejectsNegativeCurvature) {
  const auto e = sample(box(), [](double x, double y, double z) {
    return 1e8 * x * x - 1e7 * y * y + 1e8 * (z - 150 * um) * (z - 150 * um);
  });
  EXPECT_THROW((void)fit_frequencies(e, {0, 0, 150 * um}, yb), AnalysisError);
}

TEST(Fit, HarmonicRangeStopsWhereQuarticTermReachesFivePercent) {
  // U = a x^2 (1 - x^2 / s^2): relative deviation x^2 / s^2 reaches 5% at
  // x = s sqrt(0.05). The fit curvature differs from a by the quartic bias, so
  // compare against a fit on a narrow window.
  const double a = 5e8, s = 600 * um;
  const auto e = sample(box(), [=](double x, double y, double z) {
    const double dz = z - 150 * um;
    return a * x * x * (1 - x * x / (s * s)) + a * y * y + a * dz * dz;
  });
  FitRanges narrow;
  narrow.window[0] = {-10 * um, 10 * um};
  const auto r = fit_frequencies(e, {0, 0, 150 * um}, yb, narrow);
  EXPECT_NEAR(r.harmonic_range[0][1], s * std::sqrt(0.05), 2 * um);
  EXPECT_NEAR(r.harmonic_range[0][0], -s * std::sqrt(0.05), 2 * um);
}

TEST(Minimum, FindsBowlCentreFromOffsetSeed) {
  const auto e = bowl({4.0e8, 6.0e7, 9.0e8});
  const auto m = find_minimum(e, {60 * um, 80 * um, 120 * um});
  for (int i = 0; i < 3; ++i) EXPECT_NEAR(m[i], centre[i], 1e-3 * um);
}

TEST(Minimum, EscapeRaisesWithTrajectory) {
  const auto e = sample(box(), [](double x, double, double) { return -1e8 * x * x; });
  try {
    (void)find_minimum(e, {5 * um, 0, 150 * um});
    FAIL() << "expected AnalysisError";
  } catch (const AnalysisError& err) {
    EXPECT_FALSE(err.trajectory().empty());
  }
}

TEST(Minimum, FreeAxesRestrictSearch) {
  const auto e = bowl({4.0e8, 6.0e7, 9.0e8});
  MinimumOptions opt;
  opt.free_axes = {true, false, true};
  const auto m = find_minimum(e, {0, 50 * um, 140 * um}, opt);
  EXPECT_DOUBLE_EQ(m[1], 50 * um);
  EXPECT_NEAR(m[0], centre[0], 1e-3 * um);
}

TEST(Depth, BowlIsEdgeLimited) {
  const auto d = trap_depth(bowl({4.0e8, 6.0e7, 9.0e8}), centre);
  for (const auto& r : d.rays) EXPECT_TRUE(r.edge_limited);
  // -y reaches the edge after 243 um: a s^2 = 3.5 eV, the smallest of the six rays.
  EXPECT_EQ(d.shallowest(), Direction::minus_y);
}

TEST(Depth, QuarticBarrierHeight) {
  // U = a r^2 - b r^4 along x has its maximum a^2 / (4 b) at r = sqrt(a / 2b).
  const double a = 4e8, b = 4e16;
  const auto e = sample(box(), [=](double x, double y, double z) {
    const double dz = z - 150 * um;
    return a * x * x - b * x * x * x * x + 1e9 * y * y + 1e9 * dz * dz;
  });
  const auto d = trap_depth(e, {0, 0, 150 * um});
  const auto& px = d.rays[static_cast<int>(Direction::plus_x)];
  EXPECT_FALSE(px.edge_limited);
  EXPECT_NEAR(px.distance, std::sqrt(a / (2 * b)), 5 * um);
  EXPECT_NEAR(px.depth, a * a / (4 * b), 0.02 * a * a / (4 * b));
  EXPECT_EQ(d.shallowest(), Direction::plus_x);
  EXPECT_NEAR(d.minimum(), px.depth, 1e-12);
}

TEST(Pseudo, QuadrupoleSecularFrequency) {
  const double r0 = 150 * um, zn = 140 * um;
  model::RFDrive drive{150.0, 2e7};
  const auto u = pseudopotential(quadrupole(r0, zn), drive, yb);
  EXPECT_EQ(u.kind(), FieldKind::energy);
  const auto n = rf_null(u, {20 * um, 0, 170 * um});
  EXPECT_NEAR(n[0], 0.0, 1e-3 * um);
  EXPECT_NEAR(n[2], zn, 1e-3 * um);
  // omega = q A / (sqrt(2) m Omega r0^2) on both radial axes.
  const double expected = yb.charge * drive.amplitude / (std::sqrt(2.0) * yb.mass * drive.angular_frequency * r0 * r0);
  for (int ax : {0, 2}) {
    const auto f = fit_axis(u, n, ax, yb);
    EXPECT_NEAR(2 * constants::pi * f.frequency, expected, 1e-9 * expected);
  }
}

TEST(Pseudo, ScalesWithAmplitudeAndDriveFrequency) {
  const auto psi = quadrupole(150 * um, 140 * um);
  const Vec3 n{0, 0, 140 * um};
  auto freq = [&](double amp, double omega) {
    return fit_axis(pseudopotential(psi, {amp, omega}, yb), n, 0, yb).frequency;
  };
  const double f0 = freq(100.0, 2e7);
  EXPECT_NEAR(freq(200.0, 2e7) / f0, 2.0, 1e-10);
  EXPECT_NEAR(freq(100.0, 4e7) / f0, 0.5, 1e-10);
  EXPECT_THROW((void)pseudopotential(psi, {100.0, 0.0}, yb), ValidationError);
}

TEST(Offset, PutsDcStationaryPointOnRfNull) {
  const double zn = 140 * um, z0 = 100 * um, c = 2e7, g = 3e3, vb = -30.0;
  const auto grid = box();
  electrostatics::BasisSet basis;
  const auto zero = ScalarField3D::zeros(grid);
  for (const char* a : {"A+x+y", "A+x-y", "A-x+y", "A-x-y"}) basis.insert(a, zero);
  const auto b = sample(grid, [=](double, double, double z) { return c * (z - z0) * (z - z0); },
                        FieldKind::potential);
  basis.insert("B+x", b);
  basis.insert("B-x", b);
  basis.set_charge(sample(grid, [=](double, double, double z) { return g * z; }, FieldKind::potential));
  const auto u = pseudopotential(quadrupole(150 * um, zn), {150.0, 2e7}, yb);
  model::VoltageSet v{.v_a = 0.0, .v_b = vb};
  const auto r = tune_offset(basis, u, v, 0.0, {0, 0, 150 * um});
  const double oracle = -vb - g / (4 * c * (zn - z0));
  EXPECT_NEAR(r.v_offset, oracle, 1e-9);
  EXPECT_NEAR(r.dc_height, zn, 1e-3 * um);
  EXPECT_THROW((void)tune_offset(basis, u, v, 0.0, {0, 0, 150 * um}, 1e-3), AnalysisError);
}

TEST(Analyze, ReportsEverything) {
  const Vec3 a{4.0e8, 6.0e7, 9.0e8};
  const auto r = analyze(bowl(a), {10 * um, 10 * um, 160 * um}, yb);
  EXPECT_NEAR(r.height(), centre[2], 1e-3 * um);
  // Trilinear value between nodes: error up to sum(a_i h_i^2) / 4.
  EXPECT_NEAR(r.energy_at_minimum, 0.25, 0.01);
  EXPECT_NEAR(r.curvature[1], a[1], 1e-10 * a[1]);
}

TEST(Compensation, LinearFitOfSyntheticResponse) {
  std::vector<CompensationPoint> pts;
  for (int a = 0; a < 3; ++a)
    for (double v : {-2.0, -1.0, 0.0, 1.0, 2.0}) {
      CompensationPoint p;
      p.delta[a] = v;
      p.displacement[a] = (a + 1) * 1e-6 * v;
      pts.push_back(p);
    }
  const auto fit = fit_compensation(pts);
  for (int a = 0; a < 3; ++a) {
    EXPECT_NEAR(fit.sensitivity[a], (a + 1) * 1e-6, 1e-18);
    EXPECT_NEAR(fit.r_squared[a], 1.0, 1e-12);
  }
}

TEST(Profile, ExactForQuadratic) {
  const auto e = bowl({4.0e8, 6.0e7, 9.0e8});
  const AxisProfile p(e, centre, 2);
  for (double s : {-100 * um, -13.7 * um, 2.1 * um, 40 * um}) {
    EXPECT_NEAR(p.delta(s), 9.0e8 * s * s, 1e-12);
    EXPECT_NEAR(p.slope(s), 2 * 9.0e8 * s, 1e-6);
  }
  EXPECT_NEAR(p.lower(), -centre[2], 1e-15);
}
