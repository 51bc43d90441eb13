#include "fibertrap/electrostatics.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "fibertrap/errors.hpp"
#include "fibertrap/parallel.hpp"

namespace fibertrap::electrostatics {

using model::ElectrodeRole;

std::string group_of(const model::Electrode& e) {
  switch (e.role) {
    case ElectrodeRole::rf: return group_rf;
    case ElectrodeRole::inner_dc: return group_inner;
    case ElectrodeRole::slot: return {};
    case ElectrodeRole::outer_dc: {
      std::string g(1, e.group);
      g += e.side_x > 0 ? "+x" : "-x";
      if (e.group == 'A') g += e.side_y > 0 ? "+y" : "-y";
      return g;
    }
  }
  return {};
}

std::vector<std::string> electrode_groups(const model::TrapGeometry& geometry) {
  std::vector<std::string> g{group_rf, group_inner, "A+x+y", "A+x-y", "A-x+y", "A-x-y", "B+x", "B-x"};
  if (geometry.fiber() && geometry.fiber()->coated()) g.push_back(group_coating);
  return g;
}

std::shared_ptr<const Grid3D> build_grid(const model::TrapGeometry& geometry,
                                         const model::GridSettings& s, double trap_height) {
  s.validate();
  const auto& layout = geometry.layout();
  const auto& dom = geometry.domain();
  const auto& fiber = geometry.fiber();
  const double fiber_spacing = std::min(2.0 * s.fine_spacing, s.trap_spacing);

  AxisSpec ax;
  ax.lo = -dom.half_x;
  ax.hi = dom.half_x;
  ax.max_spacing = s.max_spacing;
  ax.growth = s.growth;
  for (double e : layout.x_edges()) ax.features.push_back({e, s.fine_spacing});
  ax.regions.push_back({-150e-6, 150e-6, s.trap_spacing});
  if (fiber) {
    ax.features.push_back({fiber->radius(), fiber_spacing});
    ax.features.push_back({-fiber->radius(), fiber_spacing});
  }

  AxisSpec ay;
  ay.lo = -dom.half_y;
  ay.hi = dom.half_y;
  ay.max_spacing = s.max_spacing;
  ay.growth = s.growth;
  for (double e : layout.y_edges()) ay.features.push_back({e, s.fine_spacing});
  double reach = 200e-6;
  if (fiber) {
    ay.features.push_back({fiber->tip_minus_y, fiber_spacing});
    ay.features.push_back({fiber->tip_plus_y, fiber_spacing});
    reach = std::min({reach, -fiber->tip_minus_y, fiber->tip_plus_y});
  }
  if (reach > 0.0) ay.regions.push_back({-reach, reach, s.trap_spacing});

  AxisSpec az;
  az.lo = 0.0;
  az.hi = dom.top_z;
  az.max_spacing = s.max_spacing;
  az.growth = s.growth;
  az.features.push_back({0.0, s.fine_spacing});
  const double zlo = std::max(0.0, trap_height - 80e-6);
  az.regions.push_back({zlo, trap_height + 80e-6, s.trap_spacing});
  if (fiber) {
    const double bottom = fiber->height - fiber->radius();
    const double top = fiber->height + fiber->radius();
    if (bottom > 0.0) az.features.push_back({bottom, fiber_spacing});
    if (top < dom.top_z) az.features.push_back({top, fiber_spacing});
  }

  const bool y_sym = !fiber || fiber->tip_minus_y == -fiber->tip_plus_y;
  auto grid = std::make_shared<const Grid3D>(symmetric_axis(ax),
                                             y_sym ? symmetric_axis(ay) : graded_axis(ay),
                                             graded_axis(az));
  check_gap_resolution(geometry, *grid);
  return grid;
}

void check_gap_resolution(const model::TrapGeometry& geometry, const Grid3D& grid) {
  auto check = [&](int axis, const std::vector<std::array<double, 2>>& gaps) {
    for (const auto& g : gaps) {
      if (g[0] < grid.lo(axis) || g[1] > grid.hi(axis)) continue;
      const double h = grid.max_spacing_in(axis, g[0], g[1]);
      const double width = g[1] - g[0];
      if (h > 0.5 * width * (1.0 + 1e-9)) {
        throw ValidationError(
            "grid.gap_resolution",
            "grid too coarse to resolve the " + std::to_string(width * 1e6) + " um gap at " +
                (axis == 0 ? "x" : "y") + " = " + std::to_string(g[0] * 1e6) + " um: spacing " +
                std::to_string(h * 1e6) + " um (needs <= half the gap)");
      }
    }
  };
  check(0, geometry.layout().x_gaps());
  check(1, geometry.layout().y_gaps());
}

namespace {

double rect_distance(const model::Rect& r, double x, double y) {
  const double dx = std::max({r.x0 - x, 0.0, x - r.x1});
  const double dy = std::max({r.y0 - y, 0.0, y - r.y1});
  return std::hypot(dx, dy);
}

std::vector<double> dual(const std::vector<double>& c) {
  std::vector<double> d(c.size(), 0.0);
  for (std::size_t i = 0; i + 1 < c.size(); ++i) {
    d[i] += 0.5 * (c[i + 1] - c[i]);
    d[i + 1] += 0.5 * (c[i + 1] - c[i]);
  }
  return d;
}

}  // namespace

Rasterization rasterize(const model::TrapGeometry& geometry, std::shared_ptr<const Grid3D> grid) {
  const Grid3D& g = *grid;
  Rasterization r;
  r.grid = grid;
  r.permittivity.assign(g.size(), 1.0);
  r.owner.assign(g.size(), -1);
  r.facet_area.assign(g.size(), 0.0);
  r.groups = electrode_groups(geometry);
  auto group_index = [&](const std::string& name) {
    if (name.empty()) return 0;
    const auto it = std::find(r.groups.begin(), r.groups.end(), name);
    return static_cast<int>(it - r.groups.begin()) + 1;
  };

  const auto& xs = g.coords(0);
  const auto& ys = g.coords(1);
  const auto& zs = g.coords(2);
  const auto& electrodes = geometry.layout().electrodes();
  const double gap = geometry.layout().params().gap;

  // Chip plane.
  for (int j = 0; j < g.ny(); ++j)
    for (int i = 0; i < g.nx(); ++i) {
      int owner = 0;
      bool near = false;
      for (const auto& e : electrodes) {
        if (e.region.contains(xs[i], ys[j])) {
          owner = group_index(group_of(e));
          near = false;
          break;
        }
        near = near || rect_distance(e.region, xs[i], ys[j]) < gap * (1.0 - 1e-9);
      }
      r.owner[g.index(i, j, 0)] = near ? -1 : owner;
    }

  if (const auto& f = geometry.fiber()) {
    const double rad = f->radius();
    const double tol = 1e-9 * rad;
    auto in_cyl = [&](double x, double z) {
      return x * x + (z - f->height) * (z - f->height) <= rad * rad * (1.0 + 1e-12);
    };
    auto in_fiber_y = [&](double y) { return y <= f->tip_minus_y + tol || y >= f->tip_plus_y - tol; };
    const int coat = f->coated() ? group_index(group_coating) : 0;
    const auto dx = dual(xs), dz = dual(zs);
    const int jm = g.nearest(1, f->tip_minus_y), jp = g.nearest(1, f->tip_plus_y);
    for (int k = 1; k < g.nz(); ++k)
      for (int j = 0; j < g.ny(); ++j) {
        if (!in_fiber_y(ys[j])) continue;
        for (int i = 0; i < g.nx(); ++i) {
          if (!in_cyl(xs[i], zs[k])) continue;
          const auto n = g.index(i, j, k);
          r.permittivity[n] = f->permittivity;
          bool shell = false;
          if (i == 0 || !in_cyl(xs[i - 1], zs[k])) shell = true;
          if (i + 1 == g.nx() || !in_cyl(xs[i + 1], zs[k])) shell = true;
          if (!in_cyl(xs[i], zs[k - 1])) shell = true;
          if (k + 1 == g.nz() || !in_cyl(xs[i], zs[k + 1])) shell = true;
          if (coat && shell) {
            r.owner[n] = coat;
          } else if (j == jm || j == jp) {
            r.facet_area[n] = dx[i] * dz[k];
          }
        }
      }
  }

  // Box faces are grounded.
  for (int k = 0; k < g.nz(); ++k)
    for (int j = 0; j < g.ny(); ++j)
      for (int i = 0; i < g.nx(); ++i) {
        if (i == 0 || j == 0 || i == g.nx() - 1 || j == g.ny() - 1 || k == g.nz() - 1) {
          const auto n = g.index(i, j, k);
          r.owner[n] = 0;
          r.facet_area[n] = 0.0;
        }
      }
  return r;
}

namespace {

DirichletProblem conductor_problem(const Rasterization& r) {
  DirichletProblem p;
  p.grid = r.grid;
  p.permittivity = r.permittivity;
  p.fixed.resize(r.owner.size());
  p.fixed_value.assign(r.owner.size(), 0.0);
  for (std::size_t n = 0; n < r.owner.size(); ++n) p.fixed[n] = r.owner[n] >= 0 ? 1 : 0;
  return p;
}

}  // namespace

ScalarField3D solve_basis(const Rasterization& raster, const std::string& group,
                          const SolverOptions& options, SolveStats* stats) {
  const auto it = std::find(raster.groups.begin(), raster.groups.end(), group);
  if (it == raster.groups.end()) {
    throw DomainError("electrode group '" + group + "' does not exist in this geometry");
  }
  const int id = static_cast<int>(it - raster.groups.begin()) + 1;
  DirichletProblem p = conductor_problem(raster);
  bool any = false;
  for (std::size_t n = 0; n < raster.owner.size(); ++n) {
    if (raster.owner[n] == id) {
      p.fixed_value[n] = 1.0;
      any = true;
    }
  }
  if (!any) throw ValidationError("grid.electrode_resolution", "group '" + group + "' has no grid nodes");
  Solution s = solve(p, options);
  if (stats) *stats = s.stats;
  return ScalarField3D(raster.grid, std::move(s.values));
}

ScalarField3D solve_basis(const model::TrapGeometry& geometry, std::shared_ptr<const Grid3D> grid,
                          const std::string& group, const SolverOptions& options) {
  return solve_basis(rasterize(geometry, std::move(grid)), group, options);
}

ScalarField3D solve_charge(const model::TrapGeometry& geometry, const Rasterization& raster,
                           const SolverOptions& options, SolveStats* stats) {
  const auto& f = geometry.fiber();
  if (!f) throw DomainError("charge solve needs a fiber assembly");
  DirichletProblem p = conductor_problem(raster);
  p.charge.assign(raster.owner.size(), 0.0);
  for (std::size_t n = 0; n < raster.owner.size(); ++n) {
    p.charge[n] = f->facet_charge_density * raster.facet_area[n];
  }
  Solution s = solve(p, options);
  if (stats) *stats = s.stats;
  return ScalarField3D(raster.grid, std::move(s.values));
}

ScalarField3D solve_charge(const model::TrapGeometry& geometry, std::shared_ptr<const Grid3D> grid,
                           const SolverOptions& options) {
  return solve_charge(geometry, rasterize(geometry, std::move(grid)), options);
}

namespace {

struct Derivation {
  std::string source;
  bool flip_x = false;
  bool flip_y = false;
};

/// Which solve produces a group, using the layout's mirror symmetries.
Derivation derive(const std::string& group, bool x_sym, bool y_sym) {
  Derivation d{group};
  if (group.size() >= 3 && (group[0] == 'A' || group[0] == 'B')) {
    std::string s = group;
    if (x_sym && s[1] == '-') {
      s[1] = '+';
      d.flip_x = true;
    }
    if (y_sym && s.size() == 5 && s[3] == '-') {
      s[3] = '+';
      d.flip_y = true;
    }
    d.source = s;
  }
  return d;
}

}  // namespace

BasisSet BasisSet::solve(const model::TrapGeometry& geometry, std::shared_ptr<const Grid3D> grid,
                         std::vector<std::string> groups, const SolverOptions& options, int jobs,
                         bool use_symmetry) {
  const Rasterization raster = rasterize(geometry, grid);
  if (groups.empty()) groups = raster.groups;
  const auto& f = geometry.fiber();
  const bool x_sym = use_symmetry && grid->symmetric(0);
  const bool y_sym = use_symmetry && grid->symmetric(1) &&
                     (!f || f->tip_minus_y == -f->tip_plus_y);
  std::vector<std::string> sources;
  for (const auto& g : groups) {
    const auto d = derive(g, x_sym, y_sym);
    if (std::find(sources.begin(), sources.end(), d.source) == sources.end()) {
      sources.push_back(d.source);
    }
  }
  const bool charged = f && f->facet_charge_density != 0.0;
  const std::size_t tasks = sources.size() + (charged ? 1 : 0);
  struct Result {
    std::optional<ScalarField3D> field;
    int iterations = 0;
  };
  auto solved = parallel_map<Result>(tasks, jobs, [&](std::size_t i) {
    SolveStats st;
    Result r;
    if (i < sources.size()) {
      r.field = solve_basis(raster, sources[i], options, &st);
    } else {
      r.field = solve_charge(geometry, raster, options, &st);
    }
    r.iterations = st.iterations;
    return r;
  });
  BasisSet b;
  for (const auto& r : solved) b.iterations += r.iterations;
  for (const auto& g : groups) {
    const auto d = derive(g, x_sym, y_sym);
    const auto idx = std::find(sources.begin(), sources.end(), d.source) - sources.begin();
    ScalarField3D field = *solved[static_cast<std::size_t>(idx)].field;
    if (d.flip_x) field = field.reflected(0);
    if (d.flip_y) field = field.reflected(1);
    b.insert(g, std::move(field));
  }
  if (charged) b.set_charge(*solved.back().field);
  return b;
}

void BasisSet::insert(const std::string& group, ScalarField3D field) {
  fields_.insert_or_assign(group, std::move(field));
}

void BasisSet::set_charge(ScalarField3D field) { charge_ = std::move(field); }

const ScalarField3D& BasisSet::at(const std::string& group) const {
  const auto it = fields_.find(group);
  if (it == fields_.end()) throw DomainError("basis has no field for group '" + group + "'");
  return it->second;
}

std::shared_ptr<const Grid3D> BasisSet::grid() const {
  if (!fields_.empty()) return fields_.begin()->second.grid_ptr();
  if (charge_) return charge_->grid_ptr();
  throw DomainError("empty basis set");
}

std::map<std::string, double> group_voltages(const model::VoltageSet& v, double coating_voltage) {
  std::map<std::string, double> out;
  out[group_rf] = 0.0;
  out[group_inner] = v.inner_rail;
  for (int sx : {1, -1}) {
    const std::string xs = sx > 0 ? "+x" : "-x";
    for (int sy : {1, -1}) {
      out["A" + xs + (sy > 0 ? "+y" : "-y")] = v.v_a + v.v_offset - sx * v.du_x - sy * v.du_y + v.du_z;
    }
    out["B" + xs] = v.v_b + v.v_offset - sx * v.du_x + v.du_z;
  }
  out[group_coating] = coating_voltage;
  return out;
}

ScalarField3D compose(const BasisSet& basis, const model::VoltageSet& volts, double coating_voltage,
                      bool include_charge) {
  ScalarField3D total = ScalarField3D::zeros(basis.grid());
  for (const auto& [group, v] : group_voltages(volts, coating_voltage)) {
    if (v == 0.0) continue;
    if (!basis.has(group)) {
      throw DomainError("basis is missing group '" + group + "' needed for " + std::to_string(v) + " V");
    }
    total = total.axpy(v, basis.at(group));
  }
  if (include_charge && basis.charge()) total = total.axpy(1.0, *basis.charge());
  return total;
}

}  // namespace fibertrap::electrostatics
