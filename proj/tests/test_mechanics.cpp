#include <gtest/gtest.h>

#include <cmath>

#include "fibertrap/actuators.hpp"
#include "fibertrap/errors.hpp"
#include "fibertrap/mechanics.hpp"
#include "fibertrap/units.hpp"

using namespace fibertrap;
using namespace fibertrap::mechanics;

namespace {

double in_plane_fos(double w) {
  const actuators::CombSpec comb;
  const auto s = SuspensionSpec::reference(w);
  const double x = actuators::comb_displacement(comb, suspension_stiffness(s, Axis::in_plane), 300.0);
  return factor_of_safety(max_bending_stress(s, x, Axis::in_plane), s.beam.yield_stress).value;
}

}  // namespace

TEST(Beam, FixedGuidedStiffness) {
  BeamSpec b;
  b.width = 5e-6;
  b.thickness = 20e-6;
  b.length = 400e-6;
  const double k = 12 * b.youngs_modulus * (b.thickness * std::pow(b.width, 3) / 12) / std::pow(b.length, 3);
  EXPECT_NEAR(beam_stiffness(b, Axis::in_plane), k, 1e-12 * k);
  EXPECT_NEAR(beam_stiffness(b, Axis::vertical) / beam_stiffness(b, Axis::in_plane), 16.0, 1e-12);
}

TEST(Beam, StiffnessScalesWithLengthCubed) {
  BeamSpec a, b;
  b.length = 2 * a.length;
  EXPECT_NEAR(beam_stiffness(a, Axis::vertical) / beam_stiffness(b, Axis::vertical), 8.0, 1e-12);
}

TEST(Suspension, SeriesAndParallelCombination) {
  SuspensionSpec s;
  s.vertical = {12.0, 3};
  EXPECT_NEAR(suspension_stiffness(s, Axis::vertical), 4.0 * beam_stiffness(s.beam, Axis::vertical),
              1e-9);
}

TEST(Suspension, CalibrationRoundTrips) {
  SuspensionSpec s;
  s.vertical = {1.0, 3};
  const double chains = calibrate_parallel_chains(s, Axis::vertical, 250.0);
  s.vertical.parallel_chains = chains;
  EXPECT_NEAR(suspension_stiffness(s, Axis::vertical), 250.0, 1e-9);

  const LoadSpec load;
  const double L = calibrate_beam_length(s, 1e-6, load);
  s.beam.length = L;
  EXPECT_NEAR(gravity_sag(s, load), 1e-6, 1e-15);
  EXPECT_THROW((void)calibrate_beam_length(s, 1e3, load), DomainError);
}

TEST(Reference, ReproducesCalibrationAnchors) {
  const actuators::CombSpec comb;
  const LoadSpec load;
  EXPECT_NEAR(gravity_sag(SuspensionSpec::reference(5e-6), load), 0.97e-6, 1e-12);
  const auto s4 = SuspensionSpec::reference(4e-6);
  EXPECT_NEAR(actuators::comb_displacement(comb, suspension_stiffness(s4, Axis::in_plane), 20.0),
              400e-9, 1e-15);
  EXPECT_NEAR(in_plane_fos(4e-6), 13.0, 1e-9);
}

TEST(Reference, SagInverseInWidth) {
  const LoadSpec load;
  const double ref = gravity_sag(SuspensionSpec::reference(5e-6), load) * 5e-6;
  for (double w : {4e-6, 6e-6, 7e-6, 8e-6}) {
    EXPECT_NEAR(gravity_sag(SuspensionSpec::reference(w), load) * w, ref, 1e-12 * ref) << w;
  }
}

TEST(Reference, InPlaneFosIncreasesWithWidth) {
  const double f4 = in_plane_fos(4e-6), f5 = in_plane_fos(5e-6), f6 = in_plane_fos(6e-6),
               f8 = in_plane_fos(8e-6);
  EXPECT_LT(f4, f5);
  EXPECT_LT(f5, f6);
  EXPECT_LT(f6, f8);
  // Stroke falls as w^-3 and root stress per unit stroke grows as w: FOS ~ w^2.
  EXPECT_NEAR(f8 / f4, 4.0, 1e-9);
}

TEST(Safety, FactorAndFlags) {
  const auto f = factor_of_safety(1e9, 7e9);
  EXPECT_DOUBLE_EQ(f.value, 7.0);
  EXPECT_FALSE(f.unsafe);
  EXPECT_TRUE(factor_of_safety(3e9, 7e9).unsafe);
  EXPECT_TRUE(factor_of_safety(0.0, 7e9).infinite);
  EXPECT_THROW((void)factor_of_safety(-1.0, 7e9), DomainError);
}

TEST(Modes, MassLoadingRatio) {
  const auto s = SuspensionSpec::reference(8e-6);
  const LoadSpec load;
  const auto a = modal_frequencies(s, load, false);
  const auto b = modal_frequencies(s, load, true);
  ASSERT_EQ(a.size(), 3u);
  const double expected = std::sqrt(load.without_fiber() / load.full());
  for (std::size_t i = 0; i < 3; ++i) {
    EXPECT_EQ(a[i].axis, b[i].axis);
    EXPECT_NEAR(b[i].frequency / a[i].frequency, expected, 1e-12);
  }
  EXPECT_LE(a[0].frequency, a[1].frequency);
  EXPECT_LE(a[1].frequency, a[2].frequency);
}

TEST(Validation, RejectsBadInputs) {
  SuspensionSpec s;
  s.in_plane.parallel_chains = 0.0;
  EXPECT_THROW((void)suspension_stiffness(s, Axis::in_plane), ValidationError);
  LoadSpec load;
  load.masses = {1.0, 0.5, 2.0};
  EXPECT_THROW((void)gravity_sag(SuspensionSpec{}, load), ValidationError);
}
