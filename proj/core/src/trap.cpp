#include "fibertrap/trap.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "fibertrap/errors.hpp"
#include "fibertrap/parallel.hpp"
#include "fibertrap/units.hpp"

namespace fibertrap::trap {

using electrostatics::BasisSet;
using electrostatics::FieldKind;
using electrostatics::FieldSample;
using electrostatics::Grid3D;

namespace {

const char* axis_name(int a) { return a == 0 ? "x" : a == 1 ? "y" : "z"; }

double norm(const Vec3& v) { return std::sqrt(v[0] * v[0] + v[1] * v[1] + v[2] * v[2]); }

/// Solves H p = -g on the free axes by Cholesky. False if H is not positive
/// definite there.
bool newton_step(const electrostatics::Mat3& h, const Vec3& g, const std::array<bool, 3>& free,
                 Vec3& p) {
  int idx[3];
  int n = 0;
  for (int a = 0; a < 3; ++a)
    if (free[a]) idx[n++] = a;
  double l[3][3]{};
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j <= i; ++j) {
      double s = h[idx[i]][idx[j]];
      for (int k = 0; k < j; ++k) s -= l[i][k] * l[j][k];
      if (i == j) {
        if (s <= 0.0) return false;
        l[i][i] = std::sqrt(s);
      } else {
        l[i][j] = s / l[j][j];
      }
    }
  }
  double y[3]{};
  for (int i = 0; i < n; ++i) {
    double s = -g[idx[i]];
    for (int k = 0; k < i; ++k) s -= l[i][k] * y[k];
    y[i] = s / l[i][i];
  }
  double x[3]{};
  for (int i = n - 1; i >= 0; --i) {
    double s = y[i];
    for (int k = i + 1; k < n; ++k) s -= l[k][i] * x[k];
    x[i] = s / l[i][i];
  }
  p = {0.0, 0.0, 0.0};
  for (int i = 0; i < n; ++i) p[idx[i]] = x[i];
  return true;
}

Vec3 masked(const Vec3& g, const std::array<bool, 3>& free) {
  return {free[0] ? g[0] : 0.0, free[1] ? g[1] : 0.0, free[2] ? g[2] : 0.0};
}

/// Least squares c0 + c1 s + c2 s^2.
std::array<double, 3> quadratic_fit(const std::vector<double>& s, const std::vector<double>& v,
                                    double scale) {
  double m[3][4]{};
  for (std::size_t i = 0; i < s.size(); ++i) {
    const double u = s[i] / scale;
    const double b[3] = {1.0, u, u * u};
    for (int r = 0; r < 3; ++r) {
      for (int c = 0; c < 3; ++c) m[r][c] += b[r] * b[c];
      m[r][3] += b[r] * v[i];
    }
  }
  for (int c = 0; c < 3; ++c) {
    int piv = c;
    for (int r = c + 1; r < 3; ++r)
      if (std::abs(m[r][c]) > std::abs(m[piv][c])) piv = r;
    for (int k = 0; k < 4; ++k) std::swap(m[c][k], m[piv][k]);
    for (int r = 0; r < 3; ++r) {
      if (r == c) continue;
      const double f = m[r][c] / m[c][c];
      for (int k = c; k < 4; ++k) m[r][k] -= f * m[c][k];
    }
  }
  return {m[0][3] / m[0][0], m[1][3] / m[1][1] / scale, m[2][3] / m[2][2] / (scale * scale)};
}

double coating_voltage_of(const model::TrapGeometry& g) {
  const auto& f = g.fiber();
  return f && f->coating == model::Coating::biased_metal ? f->coating_voltage : 0.0;
}

}  // namespace

std::string_view to_string(Direction d) noexcept {
  switch (d) {
    case Direction::plus_x: return "+x";
    case Direction::minus_x: return "-x";
    case Direction::plus_y: return "+y";
    case Direction::minus_y: return "-y";
    case Direction::plus_z: return "+z";
    case Direction::minus_z: return "-z";
  }
  return "?";
}

Vec3 DepthReport::per_axis() const noexcept {
  Vec3 out{};
  for (int a = 0; a < 3; ++a) out[a] = std::min(rays[2 * a].depth, rays[2 * a + 1].depth);
  return out;
}

Direction DepthReport::shallowest() const noexcept {
  int best = 0;
  for (int i = 1; i < 6; ++i)
    if (rays[i].depth < rays[best].depth) best = i;
  return static_cast<Direction>(best);
}

double DepthReport::minimum() const noexcept {
  return rays[static_cast<int>(shallowest())].depth;
}

AxisProfile::AxisProfile(const ScalarField3D& field, const Vec3& origin, int axis) : axis_(axis) {
  const Grid3D& g = field.grid();
  if (!g.contains(origin)) throw DomainError("profile origin outside the grid");
  const auto& c = g.coords(axis);
  for (double x : c) s_.push_back(x - origin[axis]);
  const auto at = std::lower_bound(s_.begin(), s_.end(), 0.0);
  std::size_t i0 = static_cast<std::size_t>(at - s_.begin());
  if (at == s_.end() || *at != 0.0) s_.insert(at, 0.0);
  d_.resize(s_.size());
  for (std::size_t i = 0; i < s_.size(); ++i) {
    Vec3 r = origin;
    r[axis] = std::clamp(origin[axis] + s_[i], c.front(), c.back());
    d_[i] = field.eval(r).gradient[axis];
  }
  v_.assign(s_.size(), 0.0);
  for (std::size_t i = i0 + 1; i < s_.size(); ++i)
    v_[i] = v_[i - 1] + 0.5 * (d_[i] + d_[i - 1]) * (s_[i] - s_[i - 1]);
  for (std::size_t i = i0; i-- > 0;)
    v_[i] = v_[i + 1] - 0.5 * (d_[i] + d_[i + 1]) * (s_[i + 1] - s_[i]);
}

std::size_t AxisProfile::segment(double s) const {
  if (s < s_.front() || s > s_.back()) throw DomainError("profile offset outside the grid");
  auto it = std::upper_bound(s_.begin(), s_.end(), s);
  std::size_t k = static_cast<std::size_t>(it - s_.begin());
  return std::min(k == 0 ? 0 : k - 1, s_.size() - 2);
}

double AxisProfile::delta(double s) const {
  const std::size_t k = segment(s);
  const double t = s - s_[k], h = s_[k + 1] - s_[k];
  return v_[k] + d_[k] * t + (d_[k + 1] - d_[k]) * t * t / (2.0 * h);
}

double AxisProfile::slope(double s) const {
  const std::size_t k = segment(s);
  const double t = (s - s_[k]) / (s_[k + 1] - s_[k]);
  return d_[k] + (d_[k + 1] - d_[k]) * t;
}

ScalarField3D pseudopotential(const ScalarField3D& rf_basis, const model::RFDrive& drive,
                              const model::IonSpecies& species) {
  if (!(drive.angular_frequency > 0.0)) {
    throw ValidationError("rf.omega", "drive frequency must be positive");
  }
  const double scale = species.charge * species.charge * drive.amplitude * drive.amplitude /
                       (4.0 * species.mass * drive.angular_frequency * drive.angular_frequency) /
                       constants::elementary_charge;
  const Grid3D& g = rf_basis.grid();
  std::vector<double> u(g.size());
  for (int k = 0; k < g.nz(); ++k)
    for (int j = 0; j < g.ny(); ++j)
      for (int i = 0; i < g.nx(); ++i) {
        const Vec3 e = rf_basis.node_gradient(i, j, k);
        u[g.index(i, j, k)] = scale * (e[0] * e[0] + e[1] * e[1] + e[2] * e[2]);
      }
  return ScalarField3D(rf_basis.grid_ptr(), std::move(u), FieldKind::energy);
}

ScalarField3D total_energy(const ScalarField3D& pseudo, const ScalarField3D& dc,
                           const model::IonSpecies& species) {
  ScalarField3D t = pseudo.axpy(species.charge / constants::elementary_charge, dc);
  return ScalarField3D(t.grid_ptr(), t.values(), FieldKind::energy);
}

Vec3 find_minimum(const ScalarField3D& energy, const Vec3& seed, const MinimumOptions& opt) {
  const Grid3D& grid = energy.grid();
  std::vector<Vec3> traj{seed};
  Vec3 r = seed;
  if (!grid.contains(r)) throw AnalysisError("seed outside the grid", traj);
  FieldSample s = energy.eval(r);
  for (int it = 0; it < opt.max_iterations; ++it) {
    const Vec3 g = masked(s.gradient, opt.free_axes);
    const double gn = norm(g);
    if (gn <= opt.gradient_tolerance) return r;
    Vec3 p;
    const bool newton = newton_step(s.hessian, g, opt.free_axes, p);
    if (!newton) {
      for (int a = 0; a < 3; ++a) p[a] = -g[a] / gn * opt.max_step;
    }
    const double pn = norm(p);
    if (pn > opt.max_step)
      for (double& x : p) x *= opt.max_step / pn;
    bool accepted = false;
    double t = 1.0;
    for (int bt = 0; bt < 30 && !accepted; ++bt, t *= 0.5) {
      const Vec3 q{r[0] + t * p[0], r[1] + t * p[1], r[2] + t * p[2]};
      if (!grid.contains(q)) continue;
      const FieldSample sq = energy.eval(q);
      const double qn = norm(masked(sq.gradient, opt.free_axes));
      const bool better = newton ? (qn < gn || sq.value < s.value) : sq.value < s.value;
      if (better) {
        r = q;
        s = sq;
        accepted = true;
      }
    }
    traj.push_back(r);
    if (!accepted) throw AnalysisError("minimum search stalled (saddle or escape)", traj);
  }
  throw AnalysisError("minimum search did not converge", traj);
}

double secular_angular_frequency(double curvature, const model::IonSpecies& species) {
  return std::sqrt(2.0 * curvature * constants::elementary_charge / species.mass);
}

AxisFit fit_axis(const ScalarField3D& energy, const Vec3& point, int a,
                 const model::IonSpecies& species, const FitRanges& ranges) {
  const AxisProfile prof(energy, point, a);
  const double lo = ranges.window[a][0], hi = ranges.window[a][1];
  if (lo < prof.lower() || hi > prof.upper()) {
    throw AnalysisError(std::string("fit window along ") + axis_name(a) + " leaves the grid", {point});
  }
  std::vector<double> s, v;
  const int n = static_cast<int>(std::lround((hi - lo) / ranges.sample_step));
  for (int i = 0; i <= n; ++i) {
    const double x = lo + (hi - lo) * i / n;
    s.push_back(x);
    v.push_back(prof.delta(x));
  }
  const double scale = std::max(std::abs(lo), std::abs(hi));
  const auto c = quadratic_fit(s, v, scale);
  if (!(c[2] > 0.0)) {
    throw AnalysisError(std::string("non-positive curvature along ") + axis_name(a), {point});
  }
  double ss = 0.0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    const double e = v[i] - (c[0] + c[1] * s[i] + c[2] * s[i] * s[i]);
    ss += e * e;
  }
  AxisFit fit;
  fit.curvature = c[2];
  fit.frequency = secular_angular_frequency(c[2], species) / (2.0 * std::numbers::pi);
  fit.residual = std::sqrt(ss / static_cast<double>(s.size())) / (c[2] * scale * scale);
  for (int side = 0; side < 2; ++side) {
    const double dir = side == 0 ? -1.0 : 1.0;
    const double limit = side == 0 ? prof.lower() : prof.upper();
    double last = 0.0;
    for (double x = ranges.sample_step; x <= std::abs(limit); x += ranges.sample_step) {
      const double q = c[2] * x * x;
      if (std::abs(prof.delta(dir * x) - q) > ranges.harmonic_tolerance * q) break;
      last = x;
    }
    fit.harmonic_range[side] = dir * last;
  }
  return fit;
}

TrapReport fit_frequencies(const ScalarField3D& energy, const Vec3& minimum,
                           const model::IonSpecies& species, const FitRanges& ranges) {
  TrapReport rep;
  rep.position = minimum;
  rep.energy_at_minimum = energy.eval(minimum).value;
  for (int a = 0; a < 3; ++a) {
    const AxisFit f = fit_axis(energy, minimum, a, species, ranges);
    rep.curvature[a] = f.curvature;
    rep.frequency[a] = f.frequency;
    rep.fit_residual[a] = f.residual;
    rep.harmonic_range[a] = f.harmonic_range;
  }
  return rep;
}

DepthReport trap_depth(const ScalarField3D& energy, const Vec3& minimum) {
  constexpr double noise = 1e-9;  // eV
  DepthReport out;
  for (int a = 0; a < 3; ++a) {
    const AxisProfile prof(energy, minimum, a);
    const auto& s = prof.breakpoints();
    const std::size_t i0 = static_cast<std::size_t>(std::lower_bound(s.begin(), s.end(), 0.0) - s.begin());
    for (int side = 0; side < 2; ++side) {
      const double dir = side == 0 ? 1.0 : -1.0;
      RayDepth ray;
      ray.edge_limited = true;
      // Walk the segments outwards; the slope is linear on each one.
      std::vector<double> pts;
      if (side == 0) {
        for (std::size_t i = i0; i < s.size(); ++i) pts.push_back(s[i]);
      } else {
        for (std::size_t i = i0 + 1; i-- > 0;) pts.push_back(s[i]);
      }
      for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
        const double a0 = pts[i], a1 = pts[i + 1];
        const double d0 = dir * prof.slope(a0), d1 = dir * prof.slope(a1);
        if (d0 > 0.0 && d1 <= 0.0) {
          const double sm = a0 + (a1 - a0) * d0 / (d0 - d1);
          const double depth = prof.delta(sm);
          if (depth > noise) {
            ray = RayDepth{depth, std::abs(sm), false};
            break;
          }
        }
      }
      if (ray.edge_limited) {
        ray.distance = std::abs(pts.back());
        ray.depth = std::max(0.0, prof.delta(pts.back()));
      }
      out.rays[static_cast<std::size_t>(2 * a + side)] = ray;
    }
  }
  return out;
}

TrapReport analyze(const ScalarField3D& energy, const Vec3& seed, const model::IonSpecies& species,
                   const FitRanges& ranges) {
  const Vec3 m = find_minimum(energy, seed);
  TrapReport rep = fit_frequencies(energy, m, species, ranges);
  rep.depth = trap_depth(energy, m);
  return rep;
}

Vec3 rf_null(const ScalarField3D& pseudo, const Vec3& seed) {
  MinimumOptions opt;
  opt.free_axes = {true, false, true};
  return find_minimum(pseudo, seed, opt);
}

OffsetResult tune_offset(const BasisSet& basis, const ScalarField3D& pseudo,
                         const model::VoltageSet& volts, double coating_voltage, const Vec3& seed,
                         double bracket) {
  OffsetResult out;
  out.rf_null = rf_null(pseudo, seed);
  model::VoltageSet v0 = volts;
  v0.v_offset = 0.0;
  model::VoltageSet unit;
  unit.v_offset = 1.0;
  const ScalarField3D base = electrostatics::compose(basis, v0, coating_voltage);
  const ScalarField3D per_volt = electrostatics::compose(basis, unit, 0.0, false);
  const double g0 = base.eval(out.rf_null).gradient[2];
  const double g1 = per_volt.eval(out.rf_null).gradient[2];
  if (g1 == 0.0 || !std::isfinite(g0 / g1)) {
    throw AnalysisError("offset has no effect on the DC gradient at the RF null", {out.rf_null});
  }
  out.v_offset = -g0 / g1;
  if (std::abs(out.v_offset) > bracket) {
    throw AnalysisError("no offset root in [-" + std::to_string(bracket) + ", " +
                            std::to_string(bracket) + "] V",
                        {out.rf_null});
  }
  const AxisProfile dc(base.axpy(out.v_offset, per_volt), out.rf_null, 2);
  double z = 0.0;
  for (int it = 0; it < 50; ++it) {
    const double h = 0.25e-6;
    const double d = dc.slope(z), dd = (dc.slope(z + h) - dc.slope(z - h)) / (2.0 * h);
    if (dd == 0.0) break;
    const double step = std::clamp(-d / dd, -5e-6, 5e-6);
    z += step;
    if (std::abs(step) < 1e-10) break;
  }
  out.dc_height = out.rf_null[2] + z;
  return out;
}

TrapFields solve_fields(const TrapSetup& setup, int jobs) {
  const auto grid = electrostatics::build_grid(setup.geometry, setup.grid, setup.expected_height);
  std::vector<std::string> groups;
  for (const auto& g : electrostatics::electrode_groups(setup.geometry)) {
    if (g == electrostatics::group_inner && setup.voltages.inner_rail == 0.0) continue;
    if (g == electrostatics::group_coating && coating_voltage_of(setup.geometry) == 0.0) continue;
    groups.push_back(g);
  }
  electrostatics::SolverOptions opt;
  opt.tolerance = setup.grid.tolerance;
  opt.max_iterations = setup.grid.max_iterations;
  TrapFields out;
  out.basis = BasisSet::solve(setup.geometry, grid, groups, opt, jobs);
  out.iterations = out.basis.iterations;
  out.pseudo = pseudopotential(out.basis.at(electrostatics::group_rf), setup.drive, setup.species);
  return out;
}

namespace {

model::VoltageSet applied_voltages(const TrapSetup& setup, const TrapFields& fields, Vec3& seed) {
  model::VoltageSet v = setup.voltages;
  seed = rf_null(*fields.pseudo, {0.0, 0.0, setup.expected_height});
  if (setup.tune_offset) {
    const auto off = tune_offset(fields.basis, *fields.pseudo, v, coating_voltage_of(setup.geometry), seed);
    v.v_offset = off.v_offset;
  }
  return v;
}

ScalarField3D total_for(const TrapSetup& setup, const TrapFields& fields, const model::VoltageSet& v) {
  return total_energy(*fields.pseudo,
                      electrostatics::compose(fields.basis, v, coating_voltage_of(setup.geometry)),
                      setup.species);
}

}  // namespace

TrapReport analyze_setup(const TrapSetup& setup, const TrapFields& fields) {
  Vec3 seed;
  const model::VoltageSet v = applied_voltages(setup, fields, seed);
  TrapReport rep = analyze(total_for(setup, fields, v), seed, setup.species, setup.ranges);
  rep.tag = setup.tag;
  rep.v_offset = v.v_offset;
  return rep;
}

TrapReport solve_trap(const TrapSetup& setup, int jobs) {
  return analyze_setup(setup, solve_fields(setup, jobs));
}

TrapSetup case_setup(const TrapSetup& base, model::FiberCase fiber_case, double cavity_length) {
  TrapSetup s = base;
  s.geometry = base.geometry.with_fiber(model::fiber_for_case(fiber_case, cavity_length));
  s.voltages = model::default_voltages(fiber_case);
  s.tune_offset = fiber_case == model::FiberCase::charged;
  if (fiber_case != model::FiberCase::none) s.expected_height = model::default_fiber_height(fiber_case);
  s.tag = std::string(model::to_string(fiber_case)) + "_L" +
          std::to_string(static_cast<long long>(std::llround(cavity_length * 1e6))) + "um";
  return s;
}

std::vector<SweepRow> sweep_cavity_length(const TrapSetup& base, model::FiberCase fiber_case,
                                          const std::vector<double>& lengths, int jobs) {
  for (double l : lengths) {
    if (!(l > 0.0)) throw ValidationError("sweep.length", "cavity lengths must be positive");
  }
  return parallel_map<SweepRow>(lengths.size(), jobs, [&](std::size_t i) {
    SweepRow row;
    row.cavity_length = lengths[i];
    row.fiber_case = fiber_case;
    try {
      row.report = solve_trap(case_setup(base, fiber_case, lengths[i]), 1);
      row.ok = true;
    } catch (const Error& e) {
      row.error = e.what();
    }
    return row;
  });
}

std::vector<CompensationPoint> compensation_response(const TrapSetup& setup, const TrapFields& fields,
                                                     const std::vector<Vec3>& deltas) {
  Vec3 seed;
  const model::VoltageSet v = applied_voltages(setup, fields, seed);
  const Vec3 m0 = find_minimum(total_for(setup, fields, v), seed);
  std::vector<CompensationPoint> out;
  for (const auto& d : deltas) {
    model::VoltageSet vd = v;
    vd.du_x = d[0];
    vd.du_y = d[1];
    vd.du_z = d[2];
    const Vec3 m = find_minimum(total_for(setup, fields, vd), m0);
    out.push_back({d, {m[0] - m0[0], m[1] - m0[1], m[2] - m0[2]}});
  }
  return out;
}

CompensationFit fit_compensation(const std::vector<CompensationPoint>& points) {
  CompensationFit fit;
  for (int a = 0; a < 3; ++a) {
    std::vector<double> x, y;
    bool have_origin = false;
    for (const auto& p : points) {
      if (p.delta[(a + 1) % 3] != 0.0 || p.delta[(a + 2) % 3] != 0.0) continue;
      if (p.delta[a] == 0.0) {
        if (have_origin) continue;
        have_origin = true;
      }
      x.push_back(p.delta[a]);
      y.push_back(p.displacement[a]);
    }
    if (x.size() < 2) continue;
    const double n = static_cast<double>(x.size());
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      mx += x[i] / n;
      my += y[i] / n;
    }
    double sxx = 0, sxy = 0, syy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      sxx += (x[i] - mx) * (x[i] - mx);
      sxy += (x[i] - mx) * (y[i] - my);
      syy += (y[i] - my) * (y[i] - my);
    }
    if (sxx == 0.0) continue;
    fit.sensitivity[a] = sxy / sxx;
    fit.r_squared[a] = syy == 0.0 ? 1.0 : sxy * sxy / (sxx * syy);
  }
  return fit;
}

}  // namespace fibertrap::trap
