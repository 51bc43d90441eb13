#pragma once

#include <array>
#include <filesystem>
#include <memory>
#include <string>
#include <vector>

#include "fibertrap/grid.hpp"

namespace fibertrap::electrostatics {

using Vec3 = std::array<double, 3>;
using Mat3 = std::array<std::array<double, 3>, 3>;

enum class FieldKind { potential, energy };

struct FieldSample {
  double value = 0.0;
  Vec3 gradient{};
  Mat3 hessian{};
  /// Estimated truncation error of the gradient and Hessian, scaling as h^2.
  double gradient_error = 0.0;
  double hessian_error = 0.0;
};

/// Node values on a shared grid. Potentials are in volts, energies in eV.
class ScalarField3D {
 public:
  ScalarField3D(std::shared_ptr<const Grid3D> grid, std::vector<double> values,
                FieldKind kind = FieldKind::potential);

  /// Zero field on the grid.
  [[nodiscard]] static ScalarField3D zeros(std::shared_ptr<const Grid3D> grid,
                                           FieldKind kind = FieldKind::potential);

  [[nodiscard]] const Grid3D& grid() const noexcept { return *grid_; }
  [[nodiscard]] const std::shared_ptr<const Grid3D>& grid_ptr() const noexcept { return grid_; }
  [[nodiscard]] const std::vector<double>& values() const noexcept { return v_; }
  [[nodiscard]] FieldKind kind() const noexcept { return kind_; }
  [[nodiscard]] double at(int i, int j, int k) const noexcept { return v_[grid_->index(i, j, k)]; }

  /// Trilinear value only. Throws DomainError outside the grid.
  [[nodiscard]] double value(const Vec3& r) const;

  /// Value plus gradient and Hessian from three-point nodal differences
  /// (exact for quadratics), trilinearly interpolated.
  [[nodiscard]] FieldSample eval(const Vec3& r) const;

  /// Nodal gradient by three-point differences (one-sided on the boundary).
  [[nodiscard]] Vec3 node_gradient(int i, int j, int k) const noexcept;

  /// this + s * other, nodewise. Grids must match.
  [[nodiscard]] ScalarField3D axpy(double s, const ScalarField3D& other) const;
  [[nodiscard]] ScalarField3D scaled(double s) const;

  /// Reflection x -> -x (axis 0) or y -> -y (axis 1). The grid must be
  /// symmetric along that axis.
  [[nodiscard]] ScalarField3D reflected(int axis) const;

  /// CSV lattice dump: header comments then x,y,z,value rows.
  void write_csv(const std::filesystem::path& path) const;
  /// Binary dump: magic, counts, coordinates, values (little-endian doubles).
  void write_binary(const std::filesystem::path& path) const;
  [[nodiscard]] static ScalarField3D read_binary(const std::filesystem::path& path);

 private:
  std::shared_ptr<const Grid3D> grid_;
  std::vector<double> v_;
  FieldKind kind_;

  void node_derivatives(int i, int j, int k, Vec3& g, Mat3& h) const noexcept;
};

}  // namespace fibertrap::electrostatics
