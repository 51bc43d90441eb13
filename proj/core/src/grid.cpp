#include "fibertrap/grid.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "fibertrap/errors.hpp"

namespace fibertrap::electrostatics {

namespace {

double spacing_at(const AxisSpec& spec, double s) {
  double h = spec.max_spacing;
  for (const auto& f : spec.features) {
    h = std::min(h, f.spacing + spec.growth * std::abs(s - f.position));
  }
  for (const auto& r : spec.regions) {
    const double d = s < r.lo ? r.lo - s : (s > r.hi ? s - r.hi : 0.0);
    h = std::min(h, r.spacing + spec.growth * d);
  }
  return h;
}

/// Nodes on [a, b] (both included) equidistributing 1/h.
void fill_interval(const AxisSpec& spec, double a, double b, int min_intervals,
                   std::vector<double>& out) {
  constexpr int samples = 400;
  std::vector<double> cum(samples + 1, 0.0);
  const double ds = (b - a) / samples;
  for (int i = 0; i < samples; ++i) {
    const double s0 = a + i * ds;
    // Simpson's rule on each sub-interval.
    const double w = (1.0 / spacing_at(spec, s0) + 4.0 / spacing_at(spec, s0 + 0.5 * ds) +
                      1.0 / spacing_at(spec, s0 + ds)) / 6.0;
    cum[i + 1] = cum[i] + w * ds;
  }
  const int n = std::max(min_intervals, static_cast<int>(std::ceil(cum.back() - 1e-9)));
  int seg = 0;
  for (int k = 1; k < n; ++k) {
    const double target = cum.back() * k / n;
    while (seg < samples - 1 && cum[seg + 1] < target) ++seg;
    const double t = (target - cum[seg]) / (cum[seg + 1] - cum[seg]);
    out.push_back(a + (seg + t) * ds);
  }
  out.push_back(b);
}

std::vector<double> breakpoints(const AxisSpec& spec, double lo, double hi) {
  std::vector<double> bp{lo, hi};
  auto add = [&](double s) {
    if (s > lo && s < hi) bp.push_back(s);
  };
  for (const auto& f : spec.features) add(f.position);
  for (const auto& r : spec.regions) {
    add(r.lo);
    add(r.hi);
  }
  std::sort(bp.begin(), bp.end());
  const double tol = 1e-9 * (hi - lo);
  bp.erase(std::unique(bp.begin(), bp.end(), [tol](double a, double b) { return b - a < tol; }),
           bp.end());
  return bp;
}

void check_spec(const AxisSpec& spec) {
  if (!(spec.hi > spec.lo)) throw DomainError("axis upper bound must exceed lower bound");
  if (!(spec.max_spacing > 0.0)) throw DomainError("axis max spacing must be positive");
  for (const auto& f : spec.features) {
    if (!(f.spacing > 0.0)) throw DomainError("feature spacing must be positive");
  }
  for (const auto& r : spec.regions) {
    if (!(r.spacing > 0.0) || r.hi < r.lo) throw DomainError("invalid axis region");
  }
}

}  // namespace

std::vector<double> graded_axis(const AxisSpec& spec) {
  check_spec(spec);
  const auto bp = breakpoints(spec, spec.lo, spec.hi);
  std::vector<double> nodes{bp.front()};
  for (std::size_t i = 0; i + 1 < bp.size(); ++i) fill_interval(spec, bp[i], bp[i + 1], 1, nodes);
  if (static_cast<int>(nodes.size()) < spec.min_nodes) {
    AxisSpec finer = spec;
    finer.max_spacing = (spec.hi - spec.lo) / (spec.min_nodes - 1);
    return graded_axis(finer);
  }
  return nodes;
}

std::vector<double> symmetric_axis(const AxisSpec& spec) {
  check_spec(spec);
  AxisSpec half = spec;
  half.lo = 0.0;
  half.hi = std::max(std::abs(spec.lo), std::abs(spec.hi));
  for (auto& f : half.features) f.position = std::abs(f.position);
  for (auto& r : half.regions) {
    const double a = std::abs(r.lo), b = std::abs(r.hi);
    const bool straddles = r.lo <= 0.0 && r.hi >= 0.0;
    r.lo = straddles ? 0.0 : std::min(a, b);
    r.hi = std::max(a, b);
  }
  const auto bp = breakpoints(half, 0.0, half.hi);
  std::vector<double> pos{0.0};
  for (std::size_t i = 0; i + 1 < bp.size(); ++i) fill_interval(half, bp[i], bp[i + 1], 1, pos);
  std::vector<double> nodes;
  nodes.reserve(2 * pos.size() - 1);
  for (auto it = pos.rbegin(); it != pos.rend(); ++it) nodes.push_back(-*it);
  for (std::size_t i = 1; i < pos.size(); ++i) nodes.push_back(pos[i]);
  nodes[pos.size() - 1] = 0.0;
  if (static_cast<int>(nodes.size()) < spec.min_nodes) {
    AxisSpec finer = spec;
    finer.max_spacing = 2.0 * half.hi / (spec.min_nodes - 1);
    return symmetric_axis(finer);
  }
  return nodes;
}

Grid3D::Grid3D(std::vector<double> x, std::vector<double> y, std::vector<double> z)
    : c_{std::move(x), std::move(y), std::move(z)} {
  for (int a = 0; a < 3; ++a) {
    if (c_[a].size() < 16) {
      throw ValidationError("grid.min_nodes", "axis " + std::to_string(a) + " has " +
                                                  std::to_string(c_[a].size()) +
                                                  " nodes; at least 16 are required");
    }
    for (std::size_t i = 0; i + 1 < c_[a].size(); ++i) {
      if (!(c_[a][i + 1] > c_[a][i])) {
        throw ValidationError("grid.monotone", "node coordinates must be strictly increasing");
      }
    }
  }
}

Grid3D Grid3D::uniform(std::array<double, 3> lo, std::array<double, 3> hi, std::array<int, 3> n) {
  std::array<std::vector<double>, 3> c;
  for (int a = 0; a < 3; ++a) {
    c[a].resize(static_cast<std::size_t>(std::max(n[a], 2)));
    for (int i = 0; i < n[a]; ++i) c[a][i] = lo[a] + (hi[a] - lo[a]) * i / (n[a] - 1);
  }
  return Grid3D(std::move(c[0]), std::move(c[1]), std::move(c[2]));
}

double Grid3D::max_spacing(int axis) const noexcept {
  double h = 0.0;
  for (std::size_t i = 0; i + 1 < c_[axis].size(); ++i) h = std::max(h, c_[axis][i + 1] - c_[axis][i]);
  return h;
}

double Grid3D::min_spacing(int axis) const noexcept {
  double h = c_[axis].back() - c_[axis].front();
  for (std::size_t i = 0; i + 1 < c_[axis].size(); ++i) h = std::min(h, c_[axis][i + 1] - c_[axis][i]);
  return h;
}

double Grid3D::max_spacing_in(int axis, double a, double b) const noexcept {
  double h = 0.0;
  const auto& c = c_[axis];
  for (std::size_t i = 0; i + 1 < c.size(); ++i) {
    if (c[i + 1] > a && c[i] < b) h = std::max(h, c[i + 1] - c[i]);
  }
  return h;
}

int Grid3D::cell(int axis, double s) const noexcept {
  const auto& c = c_[axis];
  auto it = std::upper_bound(c.begin(), c.end(), s);
  int i = static_cast<int>(it - c.begin()) - 1;
  return std::clamp(i, 0, static_cast<int>(c.size()) - 2);
}

int Grid3D::nearest(int axis, double s) const noexcept {
  const int i = cell(axis, s);
  const auto& c = c_[axis];
  return (s - c[i] <= c[i + 1] - s) ? i : i + 1;
}

bool Grid3D::contains(const std::array<double, 3>& r) const noexcept {
  for (int a = 0; a < 3; ++a) {
    if (!(r[a] >= lo(a) && r[a] <= hi(a))) return false;
  }
  return true;
}

bool Grid3D::symmetric(int axis) const noexcept {
  const auto& c = c_[axis];
  const std::size_t n = c.size();
  for (std::size_t i = 0; i < n; ++i) {
    if (c[i] != -c[n - 1 - i]) return false;
  }
  return true;
}

}  // namespace fibertrap::electrostatics
