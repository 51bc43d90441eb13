#include "fibertrap/field.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <string>

#include "fibertrap/errors.hpp"

namespace fibertrap::electrostatics {

namespace {

/// Weights of the three-point first and second derivative at node i.
struct Stencil {
  int i0, i1, i2;          // node indices used
  double d1[3];            // first-derivative weights
  double d2[3];            // second-derivative weights
};

Stencil stencil(const std::vector<double>& c, int i) {
  const int n = static_cast<int>(c.size());
  Stencil s{};
  int m = std::clamp(i, 1, n - 2);  // centre of the three nodes
  s.i0 = m - 1;
  s.i1 = m;
  s.i2 = m + 1;
  const double x0 = c[s.i0], x1 = c[s.i1], x2 = c[s.i2], x = c[i];
  // Lagrange basis derivatives at x.
  s.d1[0] = ((x - x1) + (x - x2)) / ((x0 - x1) * (x0 - x2));
  s.d1[1] = ((x - x0) + (x - x2)) / ((x1 - x0) * (x1 - x2));
  s.d1[2] = ((x - x0) + (x - x1)) / ((x2 - x0) * (x2 - x1));
  s.d2[0] = 2.0 / ((x0 - x1) * (x0 - x2));
  s.d2[1] = 2.0 / ((x1 - x0) * (x1 - x2));
  s.d2[2] = 2.0 / ((x2 - x0) * (x2 - x1));
  return s;
}

}  // namespace

ScalarField3D::ScalarField3D(std::shared_ptr<const Grid3D> grid, std::vector<double> values,
                             FieldKind kind)
    : grid_(std::move(grid)), v_(std::move(values)), kind_(kind) {
  if (!grid_) throw ValidationError("field.grid", "field needs a grid");
  if (v_.size() != grid_->size()) {
    throw ValidationError("field.size", "value count does not match the grid");
  }
  for (double v : v_) {
    if (!std::isfinite(v)) throw ValidationError("field.finite", "field values must be finite");
  }
}

ScalarField3D ScalarField3D::zeros(std::shared_ptr<const Grid3D> grid, FieldKind kind) {
  std::vector<double> v(grid->size(), 0.0);
  return ScalarField3D(std::move(grid), std::move(v), kind);
}

double ScalarField3D::value(const Vec3& r) const {
  if (!grid_->contains(r)) throw DomainError("position outside the field grid");
  const Grid3D& g = *grid_;
  int c[3];
  double t[3];
  for (int a = 0; a < 3; ++a) {
    c[a] = g.cell(a, r[a]);
    const auto& x = g.coords(a);
    t[a] = (r[a] - x[c[a]]) / (x[c[a] + 1] - x[c[a]]);
  }
  double v = 0.0;
  for (int dk = 0; dk < 2; ++dk)
    for (int dj = 0; dj < 2; ++dj)
      for (int di = 0; di < 2; ++di) {
        const double w = (di ? t[0] : 1 - t[0]) * (dj ? t[1] : 1 - t[1]) * (dk ? t[2] : 1 - t[2]);
        v += w * at(c[0] + di, c[1] + dj, c[2] + dk);
      }
  return v;
}

Vec3 ScalarField3D::node_gradient(int i, int j, int k) const noexcept {
  const Grid3D& g = *grid_;
  const Stencil sx = stencil(g.coords(0), i), sy = stencil(g.coords(1), j),
                sz = stencil(g.coords(2), k);
  return {sx.d1[0] * at(sx.i0, j, k) + sx.d1[1] * at(sx.i1, j, k) + sx.d1[2] * at(sx.i2, j, k),
          sy.d1[0] * at(i, sy.i0, k) + sy.d1[1] * at(i, sy.i1, k) + sy.d1[2] * at(i, sy.i2, k),
          sz.d1[0] * at(i, j, sz.i0) + sz.d1[1] * at(i, j, sz.i1) + sz.d1[2] * at(i, j, sz.i2)};
}

void ScalarField3D::node_derivatives(int i, int j, int k, Vec3& grad, Mat3& h) const noexcept {
  const Grid3D& g = *grid_;
  const Stencil s[3] = {stencil(g.coords(0), i), stencil(g.coords(1), j), stencil(g.coords(2), k)};
  const int base[3] = {i, j, k};
  auto val = [&](int a, int ia, int b, int ib) {
    int idx[3] = {base[0], base[1], base[2]};
    idx[a] = ia;
    if (b >= 0) idx[b] = ib;
    return at(idx[0], idx[1], idx[2]);
  };
  auto nodes = [&](int a, int m) { return m == 0 ? s[a].i0 : (m == 1 ? s[a].i1 : s[a].i2); };
  for (int a = 0; a < 3; ++a) {
    double d1 = 0.0, d2 = 0.0;
    for (int m = 0; m < 3; ++m) {
      const double f = val(a, nodes(a, m), -1, 0);
      d1 += s[a].d1[m] * f;
      d2 += s[a].d2[m] * f;
    }
    grad[a] = d1;
    h[a][a] = d2;
  }
  for (int a = 0; a < 3; ++a) {
    for (int b = a + 1; b < 3; ++b) {
      double d = 0.0;
      for (int m = 0; m < 3; ++m)
        for (int p = 0; p < 3; ++p) d += s[a].d1[m] * s[b].d1[p] * val(a, nodes(a, m), b, nodes(b, p));
      h[a][b] = h[b][a] = d;
    }
  }
}

FieldSample ScalarField3D::eval(const Vec3& r) const {
  if (!grid_->contains(r)) throw DomainError("position outside the field grid");
  const Grid3D& g = *grid_;
  int c[3];
  double t[3], hc[3];
  for (int a = 0; a < 3; ++a) {
    c[a] = g.cell(a, r[a]);
    const auto& x = g.coords(a);
    hc[a] = x[c[a] + 1] - x[c[a]];
    t[a] = (r[a] - x[c[a]]) / hc[a];
  }
  FieldSample out;
  Mat3 hmin, hmax;
  for (auto& row : hmin) row.fill(1e300);
  for (auto& row : hmax) row.fill(-1e300);
  for (int dk = 0; dk < 2; ++dk)
    for (int dj = 0; dj < 2; ++dj)
      for (int di = 0; di < 2; ++di) {
        const double w = (di ? t[0] : 1 - t[0]) * (dj ? t[1] : 1 - t[1]) * (dk ? t[2] : 1 - t[2]);
        Vec3 gn;
        Mat3 hn;
        node_derivatives(c[0] + di, c[1] + dj, c[2] + dk, gn, hn);
        out.value += w * at(c[0] + di, c[1] + dj, c[2] + dk);
        for (int a = 0; a < 3; ++a) {
          out.gradient[a] += w * gn[a];
          for (int b = 0; b < 3; ++b) {
            out.hessian[a][b] += w * hn[a][b];
            hmin[a][b] = std::min(hmin[a][b], hn[a][b]);
            hmax[a][b] = std::max(hmax[a][b], hn[a][b]);
          }
        }
      }
  // Variation of the Hessian across the cell estimates the third derivative.
  const double h = std::max({hc[0], hc[1], hc[2]});
  double third = 0.0;
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b) third = std::max(third, (hmax[a][b] - hmin[a][b]) / h);
  out.gradient_error = h * h * third / 6.0;
  out.hessian_error = h * third;
  return out;
}

ScalarField3D ScalarField3D::axpy(double s, const ScalarField3D& other) const {
  if (!(other.grid_ == grid_ || *other.grid_ == *grid_)) {
    throw ValidationError("field.grid_match", "fields live on different grids");
  }
  std::vector<double> v(v_);
  for (std::size_t n = 0; n < v.size(); ++n) v[n] += s * other.v_[n];
  return ScalarField3D(grid_, std::move(v), kind_);
}

ScalarField3D ScalarField3D::scaled(double s) const {
  std::vector<double> v(v_);
  for (double& x : v) x *= s;
  return ScalarField3D(grid_, std::move(v), kind_);
}

ScalarField3D ScalarField3D::reflected(int axis) const {
  const Grid3D& g = *grid_;
  if (axis < 0 || axis > 1 || !g.symmetric(axis)) {
    throw DomainError("reflection needs a grid symmetric along the axis");
  }
  std::vector<double> v(v_.size());
  const int nx = g.nx(), ny = g.ny(), nz = g.nz();
  for (int k = 0; k < nz; ++k)
    for (int j = 0; j < ny; ++j)
      for (int i = 0; i < nx; ++i) {
        const int si = axis == 0 ? nx - 1 - i : i;
        const int sj = axis == 1 ? ny - 1 - j : j;
        v[g.index(i, j, k)] = v_[g.index(si, sj, k)];
      }
  return ScalarField3D(grid_, std::move(v), kind_);
}

void ScalarField3D::write_csv(const std::filesystem::path& path) const {
  std::ofstream out(path);
  if (!out) throw Error("cannot write '" + path.string() + "'");
  const Grid3D& g = *grid_;
  const char* unit = kind_ == FieldKind::energy ? "eV" : "V";
  out << "# extents_m," << g.lo(0) << ',' << g.hi(0) << ',' << g.lo(1) << ',' << g.hi(1) << ','
      << g.lo(2) << ',' << g.hi(2) << '\n';
  out << "# counts," << g.nx() << ',' << g.ny() << ',' << g.nz() << '\n';
  out << "# units,m,m,m," << unit << '\n';
  out << "x_m,y_m,z_m,value_" << unit << '\n';
  char buf[128];
  for (int k = 0; k < g.nz(); ++k)
    for (int j = 0; j < g.ny(); ++j)
      for (int i = 0; i < g.nx(); ++i) {
        std::snprintf(buf, sizeof buf, "%.6g,%.6g,%.6g,%.6g\n", g.coords(0)[i], g.coords(1)[j],
                      g.coords(2)[k], at(i, j, k));
        out << buf;
      }
}

namespace {
constexpr char magic[8] = {'F', 'T', 'F', 'I', 'E', 'L', 'D', '1'};
}

void ScalarField3D::write_binary(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write '" + path.string() + "'");
  out.write(magic, sizeof magic);
  const std::int32_t kind = kind_ == FieldKind::energy ? 1 : 0;
  out.write(reinterpret_cast<const char*>(&kind), sizeof kind);
  for (int a = 0; a < 3; ++a) {
    const std::int32_t n = grid_->n(a);
    out.write(reinterpret_cast<const char*>(&n), sizeof n);
  }
  for (int a = 0; a < 3; ++a) {
    const auto& c = grid_->coords(a);
    out.write(reinterpret_cast<const char*>(c.data()), static_cast<std::streamsize>(c.size() * sizeof(double)));
  }
  out.write(reinterpret_cast<const char*>(v_.data()), static_cast<std::streamsize>(v_.size() * sizeof(double)));
}

ScalarField3D ScalarField3D::read_binary(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  char m[8];
  if (!in.read(m, sizeof m) || !std::equal(m, m + 8, magic)) {
    throw Error("'" + path.string() + "' is not a field dump");
  }
  std::int32_t kind = 0, n[3];
  in.read(reinterpret_cast<char*>(&kind), sizeof kind);
  in.read(reinterpret_cast<char*>(n), sizeof n);
  std::vector<double> c[3];
  for (int a = 0; a < 3; ++a) {
    if (n[a] < 2) throw Error("corrupt field dump");
    c[a].resize(static_cast<std::size_t>(n[a]));
    in.read(reinterpret_cast<char*>(c[a].data()), static_cast<std::streamsize>(c[a].size() * sizeof(double)));
  }
  auto grid = std::make_shared<const Grid3D>(std::move(c[0]), std::move(c[1]), std::move(c[2]));
  std::vector<double> v(grid->size());
  in.read(reinterpret_cast<char*>(v.data()), static_cast<std::streamsize>(v.size() * sizeof(double)));
  if (!in) throw Error("truncated field dump");
  return ScalarField3D(std::move(grid), std::move(v), kind ? FieldKind::energy : FieldKind::potential);
}

}  // namespace fibertrap::electrostatics
