// Acceptance runner: one PASS/FAIL line per criterion, details indented
// above it. Exit status 0 only when every criterion passes.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "fibertrap/actuators.hpp"
#include "fibertrap/cavity.hpp"
#include "fibertrap/config.hpp"
#include "fibertrap/errors.hpp"
#include "fibertrap/figures.hpp"
#include "fibertrap/mechanics.hpp"
#include "fibertrap/parallel.hpp"
#include "fibertrap/trap.hpp"
#include "solver_checks.hpp"

using namespace fibertrap;

namespace {

constexpr double um = 1e-6;
constexpr double MHz = 1e6;

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

class Criterion {
 public:
  explicit Criterion(int id) : id_(id) {}

  /// Records a sub-check; `got` and `want` are shown with the label.
  bool check(const std::string& label, bool ok, const std::string& detail) {
    std::printf("    [%s] %s: %s\n", ok ? "ok" : "XX", label.c_str(), detail.c_str());
    std::fflush(stdout);
    all_ &= ok;
    if (!ok) failed_.push_back(label);
    return ok;
  }

  bool within(const std::string& label, double got, double want, double rel, const std::string& unit = "") {
    const double err = std::abs(got - want) / std::abs(want);
    char buf[160];
    std::snprintf(buf, sizeof buf, "%.4g%s vs %.4g%s (%+.1f%%, tol %.1f%%)", got, unit.c_str(), want,
                  unit.c_str(), 100.0 * (got - want) / std::abs(want), 100.0 * rel);
    return check(label, err <= rel, buf);
  }

  void fail(const std::string& label, const std::string& why) { check(label, false, why); }

  bool passed() const { return all_; }

  void report(const std::string& title, double seconds) const {
    std::string why;
    for (const auto& f : failed_) why += (why.empty() ? "" : ", ") + f;
    std::printf("criterion %d %s: %s (%.1f s)%s%s\n", id_, title.c_str(), all_ ? "PASS" : "FAIL", seconds,
                why.empty() ? "" : "; failed: ", why.c_str());
    std::fflush(stdout);
  }

 private:
  int id_;
  bool all_ = true;
  std::vector<std::string> failed_;
};

std::string fmt(const char* f, double a) {
  char buf[96];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

// 1. Cavity rates.
bool cavity_rates() {
  const auto t0 = Clock::now();
  Criterion c(1);
  cavity::CavitySpec s;
  s.length = 500 * um;
  s.finesse = 97000;
  c.within("kappa/2pi at 500 um, F = 97000", cavity::kappa(s) / MHz, 1.55, 0.05, " MHz");
  const auto& ca = cavity::transition_preset("7c");
  c.within("g/2pi Ca+ 854 nm", cavity::coupling_g(s, ca.transition) / MHz, 18.0, 0.10, " MHz");
  for (const auto& p : cavity::transition_presets()) {
    cavity::CavitySpec sp = s;
    sp.finesse = p.finesse;
    const auto pt = cavity::sweep_length(sp, p.transition, {500 * um}).front();
    char buf[128];
    std::snprintf(buf, sizeof buf, "g %.3g, kappa %.3g, gamma %.3g MHz", pt.g_hz / MHz, pt.kappa_hz / MHz,
                  pt.gamma_hz / MHz);
    c.check("strong coupling " + p.id + " (" + p.transition.name + ")", pt.strong_coupling, buf);
  }
  const double dt = seconds_since(t0);
  c.check("runtime < 1 s", dt < 1.0, fmt("%.3f s", dt));
  c.report("cavity rates", dt);
  return c.passed();
}

// 2. Actuator laws.
bool actuator_laws() {
  const auto t0 = Clock::now();
  Criterion c(2);
  const actuators::CombSpec comb;
  const actuators::PlateSpec plate;
  const auto s4 = mechanics::SuspensionSpec::reference(4 * um);
  const double k_ip = mechanics::suspension_stiffness(s4, mechanics::Axis::in_plane);
  const double k_v = mechanics::suspension_stiffness(s4, mechanics::Axis::vertical);
  const auto curve = actuators::comb_stroke_curve(comb, k_ip, comb.rated_voltage, 60);
  c.check("comb curve quadratic", curve.fit_residual < 1e-9, fmt("relative residual %.2e", curve.fit_residual));
  c.within("x(20 V), w = 4 um", actuators::comb_displacement(comb, k_ip, 20.0) / 1e-9, 400.0, 0.15, " nm");
  const auto z = actuators::zplate_equilibrium(plate, k_v, 160.0);
  c.within("z(160 V), w = 4 um", z.z / um, 5.0, 0.20, " um");
  // Root-scan oracle: bisect on V for the largest voltage with a stable root,
  // scanning z for the first crossing of k z = eps0 A V^2 / 2 (d0 - z)^2.
  auto has_root = [&](double v, double* zroot) {
    const double cc = constants::epsilon0 * plate.area * v * v / 2.0, d = plate.rest_gap;
    const int n = 20000;
    for (int i = 1; i < n; ++i) {
      const double zz = d * i / n;
      if (k_v * zz >= cc / ((d - zz) * (d - zz))) {
        if (zroot) *zroot = zz;
        return true;
      }
    }
    return false;
  };
  double lo = 0.0, hi = 1000.0;
  while (has_root(hi, nullptr)) hi *= 2;
  for (int i = 0; i < 60; ++i) {
    const double m = 0.5 * (lo + hi);
    (has_root(m, nullptr) ? lo : hi) = m;
  }
  double z_pi = 0.0;
  has_root(lo, &z_pi);
  c.within("pull-in displacement / d0 (root scan)", z_pi / plate.rest_gap, 1.0 / 3.0, 0.01);
  c.within("pull-in voltage vs root scan", actuators::pull_in_voltage(plate, k_v), lo, 0.01, " V");
  const double dt = seconds_since(t0);
  c.check("runtime < 1 s", dt < 1.0, fmt("%.3f s", dt));
  c.report("actuator laws", dt);
  return c.passed();
}

// 3. Mechanics.
bool mechanics_checks() {
  const auto t0 = Clock::now();
  Criterion c(3);
  using mechanics::Axis;
  const mechanics::LoadSpec load;
  const actuators::CombSpec comb;
  const actuators::PlateSpec plate;
  c.within("sag at w = 5 um", mechanics::gravity_sag(mechanics::SuspensionSpec::reference(5 * um), load) / um,
           0.97, 0.02, " um");
  const double ref = mechanics::gravity_sag(mechanics::SuspensionSpec::reference(5 * um), load) * 5 * um;
  double worst = 0.0;
  for (double w : {4.0, 6.0, 7.0, 8.0}) {
    const double v = mechanics::gravity_sag(mechanics::SuspensionSpec::reference(w * um), load) * w * um;
    worst = std::max(worst, std::abs(v / ref - 1.0));
  }
  c.check("sag * w constant", worst < 1e-12, fmt("max relative spread %.1e", worst));
  auto fos = [&](double w, Axis axis, double v) {
    const auto s = mechanics::SuspensionSpec::reference(w * um);
    const double k = mechanics::suspension_stiffness(s, axis);
    double d;
    if (axis == Axis::in_plane) {
      d = actuators::comb_displacement(comb, k, v);
    } else {
      const auto eq = actuators::zplate_equilibrium(plate, k, v);
      d = eq.pulled_in ? plate.rest_gap : eq.z;
    }
    return mechanics::factor_of_safety(mechanics::max_bending_stress(s, d, axis), s.beam.yield_stress).value;
  };
  const double ip[4] = {fos(4, Axis::in_plane, 300), fos(5, Axis::in_plane, 300), fos(6, Axis::in_plane, 300),
                        fos(8, Axis::in_plane, 300)};
  c.check("FOS(4) < FOS(5) < FOS(6) < FOS(8)", ip[0] < ip[1] && ip[1] < ip[2] && ip[2] < ip[3],
          fmt("%.3g", ip[0]) + " " + fmt("%.3g", ip[1]) + " " + fmt("%.3g", ip[2]) + " " + fmt("%.3g", ip[3]));
  const double want_ip[4] = {13, 21, 32, 61};
  const char* wl[4] = {"4", "5", "6", "8"};
  for (int i = 0; i < 4; ++i) c.within(std::string("in-plane FOS w = ") + wl[i] + " um, 300 V", ip[i], want_ip[i], 0.40);
  const double wz[3] = {4, 6, 8}, vz[3] = {180, 210, 240}, want_v[3] = {81, 95, 99};
  for (int i = 0; i < 3; ++i) {
    c.within("vertical FOS w = " + fmt("%.0f", wz[i]) + " um, " + fmt("%.0f", vz[i]) + " V",
             fos(wz[i], Axis::vertical, vz[i]), want_v[i], 0.40);
  }
  const auto s8 = mechanics::SuspensionSpec::reference(8 * um);
  const auto a = mechanics::modal_frequencies(s8, load, false);
  const auto b = mechanics::modal_frequencies(s8, load, true);
  c.within("modal mass-loading ratio", b[0].frequency / a[0].frequency, 0.66, 0.15);
  const double dt = seconds_since(t0);
  c.check("runtime < 1 s", dt < 1.0, fmt("%.3f s", dt));
  c.report("mechanics", dt);
  return c.passed();
}

// 4. Field solver properties.
bool solver_properties() {
  const auto t0 = Clock::now();
  Criterion c(4);
  const auto orders = checks::manufactured_orders({17, 33, 65});
  for (std::size_t i = 0; i < orders.size(); ++i) {
    c.within("manufactured-solution order, level " + std::to_string(i + 1), orders[i], 2.0, 0.15);
  }
  const auto graded = checks::manufactured_orders({17, 33, 65}, 0.3);
  c.within("manufactured-solution order, graded grid", graded.back(), 2.0, 0.15);
  const double sup = checks::superposition_error();
  c.check("superposition", sup < 1e-9, fmt("relative error %.2e", sup));
  const double mir = checks::mirror_error();
  c.check("mirror symmetry", mir < 1e-9, fmt("relative error %.2e", mir));
  const double pp = checks::layered_capacitor_error(64);
  c.check("parallel plate with dielectric layer", pp < 0.005, fmt("max error %.2e of plate voltage", pp));
  const double dt = seconds_since(t0);
  c.check("runtime < 120 s", dt < 120.0, fmt("%.1f s", dt));
  c.report("field solver", dt);
  return c.passed();
}

struct TrapRun {
  trap::TrapSetup setup;
  trap::TrapFields fields;
  trap::TrapReport report;
  double seconds = 0.0;
};

std::optional<TrapRun> run_case(const trap::TrapSetup& base, model::FiberCase fc, double L, Criterion& c) {
  const auto t0 = Clock::now();
  TrapRun r{trap::case_setup(base, fc, L), {}, {}, 0.0};
  try {
    r.fields = trap::solve_fields(r.setup, 1);
    r.report = trap::analyze_setup(r.setup, r.fields);
  } catch (const Error& e) {
    c.fail(r.setup.tag, e.what());
    return std::nullopt;
  }
  r.seconds = seconds_since(t0);
  const auto& p = r.report;
  std::printf("    %s: height %.1f um, f = (%.3f, %.3f, %.3f) MHz, depths (%.3f, %.3f, %.3f) eV, offset %.2f V, %.0f s\n",
              r.setup.tag.c_str(), p.height() / um, p.frequency[0] / MHz, p.frequency[1] / MHz,
              p.frequency[2] / MHz, p.depth.per_axis()[0], p.depth.per_axis()[1], p.depth.per_axis()[2], p.v_offset,
              r.seconds);
  c.check(r.setup.tag + " runtime < 10 min", r.seconds < 600.0, fmt("%.0f s", r.seconds));
  return r;
}

struct TrapResults {
  std::optional<TrapRun> coated500, charged500;
};

// 5. Trap potentials.
bool trap_potentials(const trap::TrapSetup& base, TrapResults& out) {
  const auto t0 = Clock::now();
  Criterion c(5);
  const char* ax[3] = {"x", "y", "z"};
  if (auto bare = run_case(base, model::FiberCase::bare, 1000 * um, c)) {
    const auto& r = bare->report;
    c.within("bare ion height", r.height() / um, 169.0, 0.15, " um");
    const double f[3] = {3.0, 1.1, 2.4}, d[3] = {0.71, 0.46, 0.33};
    for (int i = 0; i < 3; ++i) c.within(std::string("bare 1 mm f") + ax[i], r.frequency[i] / MHz, f[i], 0.25, " MHz");
    const auto depth = r.depth.per_axis();
    for (int i = 0; i < 3; ++i) c.within(std::string("bare 1 mm depth ") + ax[i], depth[i], d[i], 0.30, " eV");

    // Scaling of the RF confinement at the RF null of this geometry.
    const auto& rf = bare->fields.basis.at(electrostatics::group_rf);
    const trap::Vec3 null = trap::rf_null(*bare->fields.pseudo, r.position);
    auto freq = [&](double amp, double omega, int axis) {
      const auto u = trap::pseudopotential(rf, {amp, omega}, bare->setup.species);
      return trap::fit_axis(u, trap::rf_null(u, null), axis, bare->setup.species).frequency;
    };
    const auto& drv = bare->setup.drive;
    for (int axis : {0, 2}) {
      const double f0 = freq(drv.amplitude, drv.angular_frequency, axis);
      c.within(std::string("omega_") + ax[axis] + " ratio for 2 V_RF", freq(2 * drv.amplitude, drv.angular_frequency, axis) / f0,
               2.0, 0.01);
      c.within(std::string("omega_") + ax[axis] + " ratio for 2 Omega", freq(drv.amplitude, 2 * drv.angular_frequency, axis) / f0,
               0.5, 0.01);
    }
  }
  out.coated500 = run_case(base, model::FiberCase::coated, 500 * um, c);
  if (out.coated500) {
    const double f[3] = {4.8, 1.3, 4.1};
    for (int i = 0; i < 3; ++i) {
      c.within(std::string("coated 500 um f") + ax[i], out.coated500->report.frequency[i] / MHz, f[i], 0.25, " MHz");
    }
  }
  out.charged500 = run_case(base, model::FiberCase::charged, 500 * um, c);
  if (out.charged500) {
    const auto& r = out.charged500->report;
    const double f[3] = {4.4, 2.7, 3.8};
    for (int i = 0; i < 3; ++i) c.within(std::string("charged 500 um f") + ax[i], r.frequency[i] / MHz, f[i], 0.25, " MHz");
    c.within("charged 500 um shallowest depth", r.depth.minimum(), 0.13, 0.30, " eV");
    c.check("charged 500 um shallowest direction +z", r.depth.shallowest() == trap::Direction::plus_z,
            std::string(trap::to_string(r.depth.shallowest())));
  }
  c.report("trap potentials", seconds_since(t0));
  return c.passed();
}

// 6. Sweep trends and micromotion response.
bool sweep_trends(const trap::TrapSetup& base, const std::vector<double>& lengths, const TrapResults& known,
                  const trap::TrapSetup& chip) {
  const auto t0 = Clock::now();
  Criterion c(6);
  std::vector<double> todo;
  for (double L : lengths) {
    if (std::abs(L - 500 * um) > 1e-9) todo.push_back(L);
  }
  auto sweep = [&](model::FiberCase fc, const std::optional<TrapRun>& at500) {
    auto rows = trap::sweep_cavity_length(base, fc, todo, 1);
    trap::SweepRow r500;
    r500.cavity_length = 500 * um;
    r500.fiber_case = fc;
    r500.ok = at500.has_value();
    if (at500) r500.report = at500->report;
    rows.push_back(r500);
    std::sort(rows.begin(), rows.end(),
              [](const auto& a, const auto& b) { return a.cavity_length < b.cavity_length; });
    for (const auto& r : rows) {
      if (r.ok) {
        std::printf("    %s L = %4.0f um: height %.1f um, f = (%.3f, %.3f, %.3f) MHz, offset %.2f V\n",
                    std::string(model::to_string(fc)).c_str(), r.cavity_length / um, r.report.height() / um,
                    r.report.frequency[0] / MHz, r.report.frequency[1] / MHz, r.report.frequency[2] / MHz,
                    r.report.v_offset);
      } else {
        std::printf("    %s L = %4.0f um: failed: %s\n", std::string(model::to_string(fc)).c_str(),
                    r.cavity_length / um, r.error.c_str());
      }
    }
    return rows;
  };
  const auto coated = sweep(model::FiberCase::coated, known.coated500);
  const auto charged = sweep(model::FiberCase::charged, known.charged500);
  bool all_ok = true;
  for (const auto* rows : {&coated, &charged})
    for (const auto& r : *rows) all_ok &= r.ok;
  c.check("all sweep rows solved", all_ok, all_ok ? "yes" : "some rows failed");
  // Lengths ascending, so "as L decreases" walks the rows backwards.
  bool height_ok = true, fx_ok = true;
  std::string hs, fs;
  for (std::size_t i = 0; i + 1 < coated.size(); ++i) {
    if (!coated[i].ok || !coated[i + 1].ok) continue;
    const auto& small = coated[i].report;
    const auto& large = coated[i + 1].report;
    if (small.height() > large.height() + 1e-9) {
      height_ok = false;
      hs += fmt(" L=%.0f", coated[i].cavity_length / um);
    }
    if (small.frequency[0] < large.frequency[0]) {
      fx_ok = false;
      fs += fmt(" L=%.0f", coated[i].cavity_length / um);
    }
  }
  c.check("coated height non-increasing as L decreases", height_ok, height_ok ? "holds" : "violated at" + hs);
  c.check("coated omega_x non-decreasing as L decreases", fx_ok, fx_ok ? "holds" : "violated at" + fs);
  bool fy_ok = true;
  std::string ys;
  for (std::size_t i = 0; i < coated.size() && i < charged.size(); ++i) {
    if (!coated[i].ok || !charged[i].ok) continue;
    const double a = charged[i].report.frequency[1], b = coated[i].report.frequency[1];
    ys += fmt(" %.0f:", coated[i].cavity_length / um) + fmt("%+.3f", (a - b) / MHz);
    if (!(a > b)) fy_ok = false;
  }
  c.check("charged omega_y above coated at every L", fy_ok, "charged - coated (MHz)" + ys);

  try {
    const auto fields = trap::solve_fields(chip, 1);
    const auto pts = trap::compensation_response(chip, fields,
                                                 figures::compensation_deltas(figures::default_compensation_voltages()));
    const auto fit = trap::fit_compensation(pts);
    const char* ax[3] = {"x", "y", "z"};
    for (int a = 0; a < 3; ++a) {
      c.check(std::string("compensation R^2 ") + ax[a], fit.r_squared[a] >= 0.999, fmt("%.6f", fit.r_squared[a]));
      const double s = std::abs(fit.sensitivity[a]) / um;
      c.check(std::string("compensation sensitivity ") + ax[a], s >= 0.3 && s <= 3.0, fmt("%.3f um/V", s));
    }
    for (int a = 0; a < 2; ++a) {
      c.check(std::string("+dU_") + ax[a] + " moves the ion towards +" + ax[a], fit.sensitivity[a] > 0.0,
              fmt("%+.3f um/V", fit.sensitivity[a] / um));
    }
  } catch (const Error& e) {
    c.fail("compensation", e.what());
  }
  c.report("sweep trends and micromotion", seconds_since(t0));
  return c.passed();
}

// 7. Determinism of reproduce-figure outputs, serial against parallel.
bool determinism() {
  const auto t0 = Clock::now();
  Criterion c(7);
  config::Config quick = config::parse_config(R"(
[layout]
rail_half_length = 600 um
[domain]
half_x = 1.2 mm
half_y = 1.2 mm
top_z = 1.2 mm
[grid]
fine_spacing = 4 um
trap_spacing = 20 um
max_spacing = 250 um
growth = 0.9
)");
  const config::Config full;
  for (const auto& id : figures::figure_ids()) {
    const bool trap_panel = id[0] == '6' || id == "S2b";
    const config::Config& cfg = trap_panel ? quick : full;
    figures::FigureOptions serial, parallel;
    parallel.jobs = 4;
    if (trap_panel) serial.sweep_lengths = parallel.sweep_lengths = {400 * um, 700 * um};
    try {
      const auto a = figures::to_csv(figures::reproduce(id, cfg, serial));
      const auto b = figures::to_csv(figures::reproduce(id, cfg, serial));
      const auto p = figures::to_csv(figures::reproduce(id, cfg, parallel));
      c.check("fig " + id + (trap_panel ? " (coarse grid)" : ""), a == b && a == p,
              a == b ? (a == p ? "identical" : "serial and parallel differ") : "repeated runs differ");
    } catch (const Error& e) {
      c.fail("fig " + id, e.what());
    }
  }
  c.report("determinism", seconds_since(t0));
  return c.passed();
}

}  // namespace

int main() {
  std::printf("acceptance run, %d hardware threads\n", default_jobs());
  std::fflush(stdout);
  std::vector<bool> ok;
  ok.push_back(cavity_rates());
  ok.push_back(actuator_laws());
  ok.push_back(mechanics_checks());
  ok.push_back(solver_properties());

  const config::Config cfg;
  trap::TrapSetup base = figures::trap_setup(cfg);
  TrapResults known;
  ok.push_back(trap_potentials(base, known));
  ok.push_back(sweep_trends(base, {400 * um, 500 * um, 700 * um, 1000 * um, 1500 * um}, known, base));
  ok.push_back(determinism());

  int passed = 0;
  for (bool b : ok) passed += b;
  std::printf("summary: %d of %zu criteria pass\n", passed, ok.size());
  return passed == static_cast<int>(ok.size()) ? 0 : 1;
}
