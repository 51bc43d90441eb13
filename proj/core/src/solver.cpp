#include "fibertrap/solver.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "fibertrap/errors.hpp"
#include "fibertrap/units.hpp"

namespace fibertrap::electrostatics {

DirichletProblem DirichletProblem::vacuum(std::shared_ptr<const Grid3D> grid) {
  DirichletProblem p;
  const std::size_t n = grid->size();
  p.grid = std::move(grid);
  p.permittivity.assign(n, 1.0);
  p.fixed.assign(n, 0);
  p.fixed_value.assign(n, 0.0);
  return p;
}

void DirichletProblem::fix_box(double value) {
  const Grid3D& g = *grid;
  for (int k = 0; k < g.nz(); ++k)
    for (int j = 0; j < g.ny(); ++j)
      for (int i = 0; i < g.nx(); ++i) {
        if (i == 0 || j == 0 || k == 0 || i == g.nx() - 1 || j == g.ny() - 1 || k == g.nz() - 1) {
          const auto n = g.index(i, j, k);
          fixed[n] = 1;
          fixed_value[n] = value;
        }
      }
}

void DirichletProblem::validate() const {
  if (!grid) throw ValidationError("problem.grid", "problem needs a grid");
  const std::size_t n = grid->size();
  if (permittivity.size() != n || fixed.size() != n || fixed_value.size() != n ||
      (!charge.empty() && charge.size() != n)) {
    throw ValidationError("problem.size", "problem arrays must match the grid size");
  }
  for (double e : permittivity) {
    if (!(e >= 1.0) || !std::isfinite(e)) {
      throw ValidationError("problem.permittivity", "relative permittivity must be >= 1");
    }
  }
}

namespace {

/// Linear interpolation from a coarse axis to a fine axis.
struct Interp {
  int c0 = 0, c1 = 0;
  double w0 = 1.0, w1 = 0.0;
};

struct Level {
  int nx = 0, ny = 0, nz = 0;
  std::vector<double> cx, cy, cz, diag;
  std::vector<std::uint8_t> fixed;
  std::array<std::vector<Interp>, 3> to_fine;  // prolongation from the next coarser level
  std::vector<double> x, b, r;

  [[nodiscard]] std::size_t size() const { return static_cast<std::size_t>(nx) * ny * nz; }
};

std::vector<double> dual_widths(const std::vector<double>& c) {
  const std::size_t n = c.size();
  std::vector<double> d(n, 0.0);
  for (std::size_t i = 0; i + 1 < n; ++i) {
    const double h = 0.5 * (c[i + 1] - c[i]);
    d[i] += h;
    d[i + 1] += h;
  }
  return d;
}

double harmonic(double a, double b) { return 2.0 * a * b / (a + b); }

/// Finite-volume couplings on a tensor grid. Couplings touching a fixed node
/// are kept in `full` (for lifting) and zeroed in the level operator.
void assemble(Level& L, const std::array<std::vector<double>, 3>& c, const std::vector<double>& eps,
              std::vector<double>* lift_x = nullptr, std::vector<double>* lift_y = nullptr,
              std::vector<double>* lift_z = nullptr) {
  L.nx = static_cast<int>(c[0].size());
  L.ny = static_cast<int>(c[1].size());
  L.nz = static_cast<int>(c[2].size());
  const std::size_t N = L.size();
  const auto dx = dual_widths(c[0]), dy = dual_widths(c[1]), dz = dual_widths(c[2]);
  L.cx.assign(N, 0.0);
  L.cy.assign(N, 0.0);
  L.cz.assign(N, 0.0);
  L.diag.assign(N, 0.0);
  const std::size_t sx = 1, sy = static_cast<std::size_t>(L.nx), sz = sy * L.ny;
  for (int k = 0; k < L.nz; ++k)
    for (int j = 0; j < L.ny; ++j)
      for (int i = 0; i < L.nx; ++i) {
        const std::size_t n = i + sy * j + sz * k;
        if (i + 1 < L.nx) {
          const double a = harmonic(eps[n], eps[n + sx]) * dy[j] * dz[k] / (c[0][i + 1] - c[0][i]);
          L.cx[n] = a;
          L.diag[n] += a;
          L.diag[n + sx] += a;
        }
        if (j + 1 < L.ny) {
          const double a = harmonic(eps[n], eps[n + sy]) * dx[i] * dz[k] / (c[1][j + 1] - c[1][j]);
          L.cy[n] = a;
          L.diag[n] += a;
          L.diag[n + sy] += a;
        }
        if (k + 1 < L.nz) {
          const double a = harmonic(eps[n], eps[n + sz]) * dx[i] * dy[j] / (c[2][k + 1] - c[2][k]);
          L.cz[n] = a;
          L.diag[n] += a;
          L.diag[n + sz] += a;
        }
      }
  if (lift_x) {
    *lift_x = L.cx;
    *lift_y = L.cy;
    *lift_z = L.cz;
  }
  for (int k = 0; k < L.nz; ++k)
    for (int j = 0; j < L.ny; ++j)
      for (int i = 0; i < L.nx; ++i) {
        const std::size_t n = i + sy * j + sz * k;
        if (L.fixed[n]) {
          L.diag[n] = 1.0;
          L.cx[n] = L.cy[n] = L.cz[n] = 0.0;
          if (i > 0) L.cx[n - sx] = 0.0;
          if (j > 0) L.cy[n - sy] = 0.0;
          if (k > 0) L.cz[n - sz] = 0.0;
        }
      }
  for (std::size_t n = 0; n < N; ++n) {
    if (!L.fixed[n] && !(L.diag[n] > 0.0)) L.diag[n] = 1.0;  // isolated node
  }
}

/// y = A x
void apply(const Level& L, const std::vector<double>& x, std::vector<double>& y) {
  const std::size_t sy = static_cast<std::size_t>(L.nx), sz = sy * L.ny;
  for (int k = 0; k < L.nz; ++k)
    for (int j = 0; j < L.ny; ++j) {
      const std::size_t row = sy * j + sz * k;
      for (int i = 0; i < L.nx; ++i) {
        const std::size_t n = row + i;
        double s = L.diag[n] * x[n];
        if (i > 0) s -= L.cx[n - 1] * x[n - 1];
        if (i + 1 < L.nx) s -= L.cx[n] * x[n + 1];
        if (j > 0) s -= L.cy[n - sy] * x[n - sy];
        if (j + 1 < L.ny) s -= L.cy[n] * x[n + sy];
        if (k > 0) s -= L.cz[n - sz] * x[n - sz];
        if (k + 1 < L.nz) s -= L.cz[n] * x[n + sz];
        y[n] = s;
      }
    }
}

inline void relax_node(Level& L, std::size_t n, int i, int j, int k, std::size_t sy, std::size_t sz) {
  double s = L.b[n];
  if (i > 0) s += L.cx[n - 1] * L.x[n - 1];
  if (i + 1 < L.nx) s += L.cx[n] * L.x[n + 1];
  if (j > 0) s += L.cy[n - sy] * L.x[n - sy];
  if (j + 1 < L.ny) s += L.cy[n] * L.x[n + sy];
  if (k > 0) s += L.cz[n - sz] * L.x[n - sz];
  if (k + 1 < L.nz) s += L.cz[n] * L.x[n + sz];
  L.x[n] = s / L.diag[n];
}

void gauss_seidel(Level& L, bool forward) {
  const std::size_t sy = static_cast<std::size_t>(L.nx), sz = sy * L.ny;
  if (forward) {
    for (int k = 0; k < L.nz; ++k)
      for (int j = 0; j < L.ny; ++j)
        for (int i = 0; i < L.nx; ++i) relax_node(L, i + sy * j + sz * k, i, j, k, sy, sz);
  } else {
    for (int k = L.nz - 1; k >= 0; --k)
      for (int j = L.ny - 1; j >= 0; --j)
        for (int i = L.nx - 1; i >= 0; --i) relax_node(L, i + sy * j + sz * k, i, j, k, sy, sz);
  }
}

/// Exact solves along every grid line of one axis (Thomas algorithm). Lines
/// along y or z are swept in zebra order over x so that the inner loop runs
/// over x, and the reverse sweep visits lines in exactly the opposite order.
void line_relax(Level& L, int axis, bool forward, std::vector<double>& cp, std::vector<double>& dp) {
  const int nx = L.nx, ny = L.ny, nz = L.nz;
  const std::size_t sy = static_cast<std::size_t>(nx), sz = sy * ny;
  if (axis == 0) {
    cp.resize(static_cast<std::size_t>(nx));
    dp.resize(static_cast<std::size_t>(nx));
    const int total = ny * nz;
    for (int t = 0; t < total; ++t) {
      const int line = forward ? t : total - 1 - t;
      const int j = line % ny, k = line / ny;
      const std::size_t base = sy * j + sz * k;
      for (int i = 0; i < nx; ++i) {
        const std::size_t q = base + i;
        double rhs = L.b[q];
        if (j > 0) rhs += L.cy[q - sy] * L.x[q - sy];
        if (j + 1 < ny) rhs += L.cy[q] * L.x[q + sy];
        if (k > 0) rhs += L.cz[q - sz] * L.x[q - sz];
        if (k + 1 < nz) rhs += L.cz[q] * L.x[q + sz];
        const double lower = i > 0 ? L.cx[q - 1] : 0.0;
        const double denom = L.diag[q] + (i > 0 ? lower * cp[i - 1] : 0.0);
        cp[i] = (i + 1 < nx ? -L.cx[q] : 0.0) / denom;
        dp[i] = (rhs + (i > 0 ? lower * dp[i - 1] : 0.0)) / denom;
      }
      double next = 0.0;
      for (int i = nx - 1; i >= 0; --i) {
        next = dp[i] - (i + 1 < nx ? cp[i] * next : 0.0);
        L.x[base + i] = next;
      }
    }
    return;
  }
  // Line direction a (stride sa, length m); outer direction o (stride so, count no).
  const bool along_z = axis == 2;
  const int m = along_z ? nz : ny;
  const int no = along_z ? ny : nz;
  const std::size_t sa = along_z ? sz : sy;
  const std::size_t so = along_z ? sy : sz;
  const std::vector<double>& ca = along_z ? L.cz : L.cy;
  const std::vector<double>& co = along_z ? L.cy : L.cz;
  cp.resize(static_cast<std::size_t>(m) * nx);
  dp.resize(static_cast<std::size_t>(m) * nx);
  for (int t = 0; t < 2 * no; ++t) {
    const int step = forward ? t : 2 * no - 1 - t;
    const int io = step / 2;
    const int color = step % 2;
    const std::size_t base = so * io;
    for (int ia = 0; ia < m; ++ia) {
      const std::size_t row = base + sa * ia;
      double* cpr = cp.data() + static_cast<std::size_t>(ia) * nx;
      double* dpr = dp.data() + static_cast<std::size_t>(ia) * nx;
      const double* cpp = ia > 0 ? cpr - nx : nullptr;
      const double* dpp = ia > 0 ? dpr - nx : nullptr;
      for (int i = color; i < nx; i += 2) {
        const std::size_t q = row + i;
        double rhs = L.b[q];
        if (i > 0) rhs += L.cx[q - 1] * L.x[q - 1];
        if (i + 1 < nx) rhs += L.cx[q] * L.x[q + 1];
        if (io > 0) rhs += co[q - so] * L.x[q - so];
        if (io + 1 < no) rhs += co[q] * L.x[q + so];
        const double lower = ia > 0 ? ca[q - sa] : 0.0;
        const double denom = L.diag[q] + (ia > 0 ? lower * cpp[i] : 0.0);
        cpr[i] = (ia + 1 < m ? -ca[q] : 0.0) / denom;
        dpr[i] = (rhs + (ia > 0 ? lower * dpp[i] : 0.0)) / denom;
      }
    }
    for (int ia = m - 1; ia >= 0; --ia) {
      const std::size_t row = base + sa * ia;
      const double* cpr = cp.data() + static_cast<std::size_t>(ia) * nx;
      const double* dpr = dp.data() + static_cast<std::size_t>(ia) * nx;
      for (int i = color; i < nx; i += 2) {
        const std::size_t q = row + i;
        L.x[q] = dpr[i] - (ia + 1 < m ? cpr[i] * L.x[q + sa] : 0.0);
      }
    }
  }
}

/// Symmetric pair: smooth(L, true) followed later by smooth(L, false) is the
/// adjoint sweep, which keeps the V-cycle symmetric.
void smooth(Level& L, bool pre, std::vector<double>& cp, std::vector<double>& dp) {
  static constexpr int order[3] = {2, 0, 1};
  if (pre) {
    for (int a : order) line_relax(L, a, true, cp, dp);
  } else {
    for (int s = 2; s >= 0; --s) line_relax(L, order[s], false, cp, dp);
  }
}

std::vector<int> coarse_indices(int n) {
  std::vector<int> idx;
  for (int i = 0; i < n; i += 2) idx.push_back(i);
  if (idx.back() != n - 1) idx.push_back(n - 1);
  return idx;
}

std::vector<Interp> interpolation(const std::vector<double>& fine, const std::vector<int>& cidx) {
  std::vector<Interp> out(fine.size());
  std::size_t c = 0;
  for (std::size_t i = 0; i < fine.size(); ++i) {
    while (c + 1 < cidx.size() && static_cast<std::size_t>(cidx[c + 1]) <= i) ++c;
    if (static_cast<std::size_t>(cidx[c]) == i) {
      out[i] = {static_cast<int>(c), static_cast<int>(c), 1.0, 0.0};
    } else {
      const double a = fine[static_cast<std::size_t>(cidx[c])];
      const double b = fine[static_cast<std::size_t>(cidx[c + 1])];
      const double t = (fine[i] - a) / (b - a);
      out[i] = {static_cast<int>(c), static_cast<int>(c + 1), 1.0 - t, t};
    }
  }
  return out;
}

/// Fine residual restricted to the coarse right-hand side (R = P^T).
void restrict_to(const Level& f, Level& c) {
  std::fill(c.b.begin(), c.b.end(), 0.0);
  const std::size_t fsy = static_cast<std::size_t>(f.nx), fsz = fsy * f.ny;
  const std::size_t csy = static_cast<std::size_t>(c.nx), csz = csy * c.ny;
  const auto& ix = f.to_fine[0];
  const auto& iy = f.to_fine[1];
  const auto& iz = f.to_fine[2];
  for (int k = 0; k < f.nz; ++k)
    for (int j = 0; j < f.ny; ++j)
      for (int i = 0; i < f.nx; ++i) {
        const std::size_t n = i + fsy * j + fsz * k;
        if (f.fixed[n]) continue;
        const double r = f.r[n];
        if (r == 0.0) continue;
        const Interp& a = ix[i];
        const Interp& b = iy[j];
        const Interp& d = iz[k];
        const int ci[2] = {a.c0, a.c1}, cj[2] = {b.c0, b.c1}, ck[2] = {d.c0, d.c1};
        const double wi[2] = {a.w0, a.w1}, wj[2] = {b.w0, b.w1}, wk[2] = {d.w0, d.w1};
        for (int p = 0; p < 2; ++p) {
          if (wk[p] == 0.0) continue;
          for (int q = 0; q < 2; ++q) {
            if (wj[q] == 0.0) continue;
            for (int s = 0; s < 2; ++s) {
              if (wi[s] == 0.0) continue;
              c.b[ci[s] + csy * cj[q] + csz * ck[p]] += wi[s] * wj[q] * wk[p] * r;
            }
          }
        }
      }
  for (std::size_t n = 0; n < c.size(); ++n) {
    if (c.fixed[n]) c.b[n] = 0.0;
  }
}

/// f.x += P c.x
void prolong_add(Level& f, const Level& c) {
  const std::size_t fsy = static_cast<std::size_t>(f.nx), fsz = fsy * f.ny;
  const std::size_t csy = static_cast<std::size_t>(c.nx), csz = csy * c.ny;
  for (int k = 0; k < f.nz; ++k) {
    const Interp& d = f.to_fine[2][k];
    for (int j = 0; j < f.ny; ++j) {
      const Interp& b = f.to_fine[1][j];
      for (int i = 0; i < f.nx; ++i) {
        const std::size_t n = i + fsy * j + fsz * k;
        if (f.fixed[n]) continue;
        const Interp& a = f.to_fine[0][i];
        auto v = [&](int ci, int cj, int ck) { return c.x[ci + csy * cj + csz * ck]; };
        double s = d.w0 * (b.w0 * (a.w0 * v(a.c0, b.c0, d.c0) + a.w1 * v(a.c1, b.c0, d.c0)) +
                           b.w1 * (a.w0 * v(a.c0, b.c1, d.c0) + a.w1 * v(a.c1, b.c1, d.c0)));
        if (d.w1 != 0.0) {
          s += d.w1 * (b.w0 * (a.w0 * v(a.c0, b.c0, d.c1) + a.w1 * v(a.c1, b.c0, d.c1)) +
                       b.w1 * (a.w0 * v(a.c0, b.c1, d.c1) + a.w1 * v(a.c1, b.c1, d.c1)));
        }
        f.x[n] += s;
      }
    }
  }
}

class Multigrid {
 public:
  Multigrid(const DirichletProblem& p, const SolverOptions& opt,
            std::vector<double>& lift_x, std::vector<double>& lift_y, std::vector<double>& lift_z)
      : opt_(opt) {
    const Grid3D& g = *p.grid;
    std::array<std::vector<double>, 3> coords{g.coords(0), g.coords(1), g.coords(2)};
    std::vector<double> eps = p.permittivity;
    std::vector<std::uint8_t> fixed = p.fixed;
    levels_.emplace_back();
    levels_[0].fixed = fixed;
    assemble(levels_[0], coords, eps, &lift_x, &lift_y, &lift_z);
    if (!opt.multigrid) return;
    while (true) {
      Level& fine = levels_.back();
      std::array<std::vector<int>, 3> cidx;
      bool any = false;
      for (int a = 0; a < 3; ++a) {
        const int n = static_cast<int>(coords[a].size());
        if (n > 5) {
          cidx[a] = coarse_indices(n);
          any = true;
        } else {
          cidx[a].resize(static_cast<std::size_t>(n));
          std::iota(cidx[a].begin(), cidx[a].end(), 0);
        }
      }
      if (!any || fine.size() < 3000) break;
      std::array<std::vector<double>, 3> cc;
      for (int a = 0; a < 3; ++a) {
        for (int i : cidx[a]) cc[a].push_back(coords[a][static_cast<std::size_t>(i)]);
        fine.to_fine[a] = interpolation(coords[a], cidx[a]);
      }
      Level coarse;
      const std::size_t fsy = static_cast<std::size_t>(fine.nx), fsz = fsy * fine.ny;
      std::vector<double> ceps;
      for (int k : cidx[2])
        for (int j : cidx[1])
          for (int i : cidx[0]) {
            const std::size_t n = i + fsy * j + fsz * k;
            ceps.push_back(eps[n]);
            coarse.fixed.push_back(fixed[n]);
          }
      assemble(coarse, cc, ceps);
      coords = std::move(cc);
      eps = std::move(ceps);
      fixed = coarse.fixed;
      levels_.push_back(std::move(coarse));
    }
    for (auto& L : levels_) {
      L.x.assign(L.size(), 0.0);
      L.b.assign(L.size(), 0.0);
      L.r.assign(L.size(), 0.0);
    }
  }

  [[nodiscard]] const Level& top() const { return levels_[0]; }
  [[nodiscard]] int depth() const { return static_cast<int>(levels_.size()); }

  /// z = M^-1 r
  void precondition(const std::vector<double>& r, std::vector<double>& z) {
    if (!opt_.multigrid) {
      for (std::size_t n = 0; n < r.size(); ++n) z[n] = r[n] / levels_[0].diag[n];
      return;
    }
    levels_[0].b = r;
    std::fill(levels_[0].x.begin(), levels_[0].x.end(), 0.0);
    cycle(0);
    z = levels_[0].x;
  }

 private:
  SolverOptions opt_;
  std::vector<Level> levels_;
  std::vector<double> cp_, dp_;

  void cycle(std::size_t l) {
    Level& L = levels_[l];
    if (l + 1 == levels_.size()) {
      for (int s = 0; s < opt_.coarsest_sweeps; ++s) {
        gauss_seidel(L, true);
        gauss_seidel(L, false);
      }
      return;
    }
    for (int s = 0; s < opt_.smoothing_steps; ++s) smooth(L, true, cp_, dp_);
    apply(L, L.x, L.r);
    for (std::size_t n = 0; n < L.size(); ++n) L.r[n] = L.fixed[n] ? 0.0 : L.b[n] - L.r[n];
    Level& C = levels_[l + 1];
    restrict_to(L, C);
    std::fill(C.x.begin(), C.x.end(), 0.0);
    cycle(l + 1);
    prolong_add(L, C);
    for (int s = 0; s < opt_.smoothing_steps; ++s) smooth(L, false, cp_, dp_);
  }
};

double norm2(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

double dot(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

/// Right-hand side with Dirichlet values lifted out of the free rows.
std::vector<double> lifted_rhs(const DirichletProblem& p, const Level& L,
                               const std::vector<double>& fx, const std::vector<double>& fy,
                               const std::vector<double>& fz) {
  const std::size_t N = L.size();
  const std::size_t sy = static_cast<std::size_t>(L.nx), sz = sy * L.ny;
  std::vector<double> b(N, 0.0);
  for (std::size_t n = 0; n < N; ++n) {
    if (!p.charge.empty()) b[n] = p.charge[n] / constants::epsilon0;
  }
  for (int k = 0; k < L.nz; ++k)
    for (int j = 0; j < L.ny; ++j)
      for (int i = 0; i < L.nx; ++i) {
        const std::size_t n = i + sy * j + sz * k;
        auto couple = [&](std::size_t a, std::size_t c, double w) {
          if (w == 0.0) return;
          if (p.fixed[a] && !p.fixed[c]) b[c] += w * p.fixed_value[a];
          if (p.fixed[c] && !p.fixed[a]) b[a] += w * p.fixed_value[c];
        };
        if (i + 1 < L.nx) couple(n, n + 1, fx[n]);
        if (j + 1 < L.ny) couple(n, n + sy, fy[n]);
        if (k + 1 < L.nz) couple(n, n + sz, fz[n]);
      }
  for (std::size_t n = 0; n < N; ++n) {
    if (p.fixed[n]) b[n] = 0.0;
  }
  return b;
}

}  // namespace

Solution solve(const DirichletProblem& problem, const SolverOptions& opt) {
  problem.validate();
  std::vector<double> fx, fy, fz;
  Multigrid mg(problem, opt, fx, fy, fz);
  const Level& A = mg.top();
  const std::vector<double> b = lifted_rhs(problem, A, fx, fy, fz);
  const std::size_t N = A.size();

  Solution sol;
  sol.stats.levels = mg.depth();
  std::vector<double> x(N, 0.0);
  const double bnorm = norm2(b);
  if (bnorm == 0.0) {
    sol.values.assign(N, 0.0);
  } else {
    std::vector<double> r(N), z(N), p(N), q(N);
    double rel = 1.0;
    int it = 0;
    sol.stats.history.push_back(rel);
    // Restart from the true residual if the recurrence drifted below it.
    for (int restart = 0; restart < 4; ++restart) {
      apply(A, x, q);
      for (std::size_t n = 0; n < N; ++n) r[n] = b[n] - q[n];
      rel = norm2(r) / bnorm;
      if (rel <= opt.tolerance || it >= opt.max_iterations) break;
      mg.precondition(r, z);
      p = z;
      double rz = dot(r, z);
      while (it < opt.max_iterations) {
        apply(A, p, q);
        const double alpha = rz / dot(p, q);
        for (std::size_t n = 0; n < N; ++n) {
          x[n] += alpha * p[n];
          r[n] -= alpha * q[n];
        }
        ++it;
        rel = norm2(r) / bnorm;
        sol.stats.history.push_back(rel);
        if (rel <= 0.5 * opt.tolerance) break;
        mg.precondition(r, z);
        const double rz_new = dot(r, z);
        const double beta = rz_new / rz;
        rz = rz_new;
        for (std::size_t n = 0; n < N; ++n) p[n] = z[n] + beta * p[n];
      }
    }
    sol.stats.iterations = it;
    sol.stats.relative_residual = rel;
    if (!(rel <= opt.tolerance) || !std::isfinite(rel)) {
      throw SolverError("field solve did not converge: relative residual " + std::to_string(rel) +
                            " after " + std::to_string(it) + " iterations",
                        sol.stats.history);
    }
    sol.values = std::move(x);
  }
  for (std::size_t n = 0; n < N; ++n) {
    if (problem.fixed[n]) sol.values[n] = problem.fixed_value[n];
  }
  return sol;
}

std::vector<double> residual(const DirichletProblem& problem, const std::vector<double>& u) {
  problem.validate();
  std::vector<double> fx, fy, fz;
  SolverOptions opt;
  opt.multigrid = false;
  Multigrid mg(problem, opt, fx, fy, fz);
  const Level& A = mg.top();
  const std::vector<double> b = lifted_rhs(problem, A, fx, fy, fz);
  std::vector<double> free_u(u);
  for (std::size_t n = 0; n < u.size(); ++n) {
    if (problem.fixed[n]) free_u[n] = 0.0;
  }
  std::vector<double> r(u.size());
  apply(A, free_u, r);
  for (std::size_t n = 0; n < u.size(); ++n) r[n] = problem.fixed[n] ? 0.0 : b[n] - r[n];
  return r;
}

}  // namespace fibertrap::electrostatics
