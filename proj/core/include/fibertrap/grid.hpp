#pragma once

#include <array>
#include <cstddef>
#include <vector>

namespace fibertrap::electrostatics {

/// A point of required resolution on one axis.
struct AxisFeature {
  double position = 0.0;
  double spacing = 0.0;
};

/// An interval that must be sampled at no more than `spacing`.
struct AxisRegion {
  double lo = 0.0;
  double hi = 0.0;
  double spacing = 0.0;
};

struct AxisSpec {
  double lo = 0.0;
  double hi = 0.0;
  std::vector<AxisFeature> features;
  std::vector<AxisRegion> regions;
  double max_spacing = 0.0;
  double growth = 0.3;
  int min_nodes = 16;
};

/// Node coordinates: every feature is a node; spacing follows
/// min(max, feature spacing + growth * distance) and is equidistributed
/// between consecutive features.
[[nodiscard]] std::vector<double> graded_axis(const AxisSpec& spec);

/// Same as graded_axis on [-hi, hi] but exactly mirror symmetric about 0.
/// Features are used by absolute value.
[[nodiscard]] std::vector<double> symmetric_axis(const AxisSpec& spec);

/// Tensor-product grid with arbitrary monotone node coordinates per axis.
/// Node (i, j, k) has linear index i + nx (j + ny k).
class Grid3D {
 public:
  Grid3D(std::vector<double> x, std::vector<double> y, std::vector<double> z);

  /// Uniform grid with n nodes per axis spanning [lo, hi].
  [[nodiscard]] static Grid3D uniform(std::array<double, 3> lo, std::array<double, 3> hi,
                                      std::array<int, 3> n);

  [[nodiscard]] const std::vector<double>& coords(int axis) const noexcept { return c_[axis]; }
  [[nodiscard]] int n(int axis) const noexcept { return static_cast<int>(c_[axis].size()); }
  [[nodiscard]] int nx() const noexcept { return n(0); }
  [[nodiscard]] int ny() const noexcept { return n(1); }
  [[nodiscard]] int nz() const noexcept { return n(2); }
  [[nodiscard]] std::size_t size() const noexcept {
    return static_cast<std::size_t>(nx()) * ny() * nz();
  }
  [[nodiscard]] std::size_t index(int i, int j, int k) const noexcept {
    return static_cast<std::size_t>(i) + static_cast<std::size_t>(nx()) *
                                             (static_cast<std::size_t>(j) +
                                              static_cast<std::size_t>(ny()) * k);
  }
  [[nodiscard]] double lo(int axis) const noexcept { return c_[axis].front(); }
  [[nodiscard]] double hi(int axis) const noexcept { return c_[axis].back(); }

  /// Largest and smallest spacing along an axis.
  [[nodiscard]] double max_spacing(int axis) const noexcept;
  [[nodiscard]] double min_spacing(int axis) const noexcept;

  /// Largest spacing among the intervals that intersect [a, b].
  [[nodiscard]] double max_spacing_in(int axis, double a, double b) const noexcept;

  /// Cell index i with coords[i] <= s <= coords[i+1], clamped to valid cells.
  [[nodiscard]] int cell(int axis, double s) const noexcept;

  /// Nearest node index.
  [[nodiscard]] int nearest(int axis, double s) const noexcept;

  [[nodiscard]] bool contains(const std::array<double, 3>& r) const noexcept;

  /// Whether the axis is exactly mirror symmetric about zero.
  [[nodiscard]] bool symmetric(int axis) const noexcept;

  bool operator==(const Grid3D&) const = default;

 private:
  std::array<std::vector<double>, 3> c_;
};

}  // namespace fibertrap::electrostatics
