#include "fibertrap/figures.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>

#include "fibertrap/actuators.hpp"
#include "fibertrap/errors.hpp"
#include "fibertrap/mechanics.hpp"

namespace fibertrap::figures {

namespace {

constexpr double um = 1e-6;

std::string clean(std::string s) {
  for (char& c : s) {
    if (c == ',' || c == '\n' || c == '\r') c = ';';
  }
  return s;
}

std::string width_label(double w) { return num(w / um); }

mechanics::SuspensionSpec suspension(const config::Config& cfg, double width) {
  return mechanics::SuspensionSpec::reference(width, cfg.beam, cfg.comb);
}

std::vector<double> range(double lo, double hi, double step) {
  std::vector<double> v;
  const int n = static_cast<int>(std::lround((hi - lo) / step));
  for (int i = 0; i <= n; ++i) v.push_back(lo + step * i);
  return v;
}

struct SweepPanel {
  model::FiberCase fiber_case;
  bool heights;
};

SweepPanel sweep_panel(std::string_view id) {
  if (id == "6a") return {model::FiberCase::bare, true};
  if (id == "6b") return {model::FiberCase::bare, false};
  if (id == "6c") return {model::FiberCase::coated, true};
  if (id == "6d") return {model::FiberCase::coated, false};
  if (id == "6e") return {model::FiberCase::charged, true};
  return {model::FiberCase::charged, false};
}

}  // namespace

void Table::add_row(std::vector<std::string> cells) {
  if (cells.size() != columns.size()) throw Error("table " + name + ": row width mismatch");
  rows.push_back(std::move(cells));
}

std::string num(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  if (v == 0.0) return "0";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

std::string to_csv(const Table& t) {
  std::string out;
  for (const auto& c : t.comments) out += "# " + c + "\n";
  for (std::size_t i = 0; i < t.columns.size(); ++i) out += (i ? "," : "") + t.columns[i];
  out += "\n";
  for (const auto& r : t.rows) {
    for (std::size_t i = 0; i < r.size(); ++i) out += (i ? "," : "") + r[i];
    out += "\n";
  }
  return out;
}

void write_csv(const Table& t, const std::filesystem::path& path) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error("cannot write " + path.string());
  f << to_csv(t);
  if (!f) throw Error("write failed: " + path.string());
}

std::vector<double> default_sweep_lengths() { return range(300 * um, 2000 * um, 100 * um); }
std::vector<double> default_cavity_lengths() { return range(20 * um, 700 * um, 10 * um); }
std::vector<double> default_compensation_voltages() { return range(-2.0, 2.0, 0.5); }

const std::vector<std::string>& figure_ids() {
  static const std::vector<std::string> ids{"2c", "2d", "3f", "4c", "5",  "6a", "6b", "6c",
                                            "6d", "6e", "6f", "7a", "7b", "7c", "S2b"};
  return ids;
}

bool is_figure_id(std::string_view id) {
  const auto& ids = figure_ids();
  return std::find(ids.begin(), ids.end(), id) != ids.end();
}

Table sag_table(const config::Config& cfg, const std::vector<double>& widths) {
  Table t;
  t.name = "fig2c";
  t.columns = {"w_um", "k_vertical_N_per_m", "sag_um"};
  const mechanics::LoadSpec load;
  t.comments.push_back("load_ug=" + num(load.full() * 1e9));
  for (double w : widths) {
    const auto s = suspension(cfg, w);
    t.add_row({width_label(w), num(mechanics::suspension_stiffness(s, mechanics::Axis::vertical)),
               num(mechanics::gravity_sag(s, load) / um)});
  }
  return t;
}

Table gravity_fos_table(const config::Config& cfg, const std::vector<double>& widths) {
  Table t;
  t.name = "fig2d";
  t.columns = {"w_um", "sag_um", "stress_MPa", "fos", "unsafe"};
  const mechanics::LoadSpec load;
  for (double w : widths) {
    const auto s = suspension(cfg, w);
    const double d = mechanics::gravity_sag(s, load);
    const double sigma = mechanics::max_bending_stress(s, d, mechanics::Axis::vertical);
    const auto f = mechanics::factor_of_safety(sigma, s.beam.yield_stress);
    t.add_row({width_label(w), num(d / um), num(sigma / 1e6), num(f.infinite ? INFINITY : f.value),
               f.unsafe ? "1" : "0"});
  }
  return t;
}

Table actuation_fos_table(const config::Config& cfg) {
  Table t;
  t.name = "mech_fos";
  t.columns = {"axis", "w_um", "voltage_V", "displacement_um", "stress_MPa", "fos", "unsafe"};
  auto row = [&](mechanics::Axis axis, double w, double v) {
    const auto s = suspension(cfg, w);
    const double k = mechanics::suspension_stiffness(s, axis);
    double d = 0.0;
    if (axis == mechanics::Axis::in_plane) {
      d = actuators::comb_displacement(cfg.comb, k, v);
    } else {
      const auto eq = actuators::zplate_equilibrium(cfg.plate, k, v);
      d = eq.pulled_in ? cfg.plate.rest_gap : eq.z;
    }
    const double sigma = mechanics::max_bending_stress(s, d, axis);
    const auto f = mechanics::factor_of_safety(sigma, s.beam.yield_stress);
    t.add_row({axis == mechanics::Axis::in_plane ? "in_plane" : "vertical", width_label(w), num(v),
               num(d / um), num(sigma / 1e6), num(f.infinite ? INFINITY : f.value),
               f.unsafe ? "1" : "0"});
  };
  for (double w : {4.0, 5.0, 6.0, 8.0}) row(mechanics::Axis::in_plane, w * um, cfg.comb.rated_voltage);
  const double wz[3] = {4.0, 6.0, 8.0}, vz[3] = {180.0, 210.0, 240.0};
  for (int i = 0; i < 3; ++i) row(mechanics::Axis::vertical, wz[i] * um, vz[i]);
  return t;
}

Table modes_table(const config::Config& cfg, double width) {
  Table t;
  t.name = "fig5";
  t.columns = {"mode", "axis", "f_without_fiber_Hz", "f_with_fiber_Hz", "ratio"};
  const auto s = suspension(cfg, width);
  const mechanics::LoadSpec load;
  const auto a = mechanics::modal_frequencies(s, load, false);
  const auto b = mechanics::modal_frequencies(s, load, true);
  t.comments.push_back("w_um=" + width_label(width));
  for (std::size_t i = 0; i < a.size(); ++i) {
    t.add_row({std::to_string(i + 1), a[i].axis, num(a[i].frequency), num(b[i].frequency),
               num(b[i].frequency / a[i].frequency)});
  }
  return t;
}

Table comb_table(const config::Config& cfg, const std::vector<double>& widths, double v_max,
                 int steps) {
  Table t;
  t.name = "fig3f";
  t.columns = {"voltage_V"};
  std::vector<actuators::ActuatorCurve> curves;
  for (double w : widths) {
    const auto s = suspension(cfg, w);
    const double k = mechanics::suspension_stiffness(s, mechanics::Axis::in_plane);
    curves.push_back(actuators::comb_stroke_curve(cfg.comb, k, v_max, steps));
    t.columns.push_back("x_nm_w" + width_label(w));
    t.comments.push_back("w_um=" + width_label(w) + " k_N_per_m=" + num(k) +
                         " fit_nm_per_V2=" + num(curves.back().fit_coefficient / 1e-9) +
                         " fit_residual=" + num(curves.back().fit_residual));
  }
  for (std::size_t i = 0; i < curves.front().voltage.size(); ++i) {
    std::vector<std::string> r{num(curves.front().voltage[i])};
    for (const auto& c : curves) r.push_back(num(c.displacement[i] / 1e-9));
    t.add_row(std::move(r));
  }
  return t;
}

Table plate_table(const config::Config& cfg, const std::vector<double>& widths,
                  const std::vector<double>& v_max, double v_step) {
  if (widths.size() != v_max.size()) throw ValidationError("plate.v_max", "one maximum per width");
  Table t;
  t.name = "fig4c";
  t.columns = {"w_um", "voltage_V", "z_um", "fit_z_um"};
  for (std::size_t j = 0; j < widths.size(); ++j) {
    const auto s = suspension(cfg, widths[j]);
    const double k = mechanics::suspension_stiffness(s, mechanics::Axis::vertical);
    const int steps = static_cast<int>(std::lround(v_max[j] / v_step));
    const auto c = actuators::plate_stroke_curve(cfg.plate, k, v_max[j], steps);
    t.comments.push_back("w_um=" + width_label(widths[j]) + " k_N_per_m=" + num(k) +
                         " pull_in_V=" + num(actuators::pull_in_voltage(cfg.plate, k)) +
                         " fit_max_V=" + num(c.fit_max_voltage) +
                         " deviation_onset_V=" + num(c.deviation_onset) +
                         (c.pulled_in ? " pulled_in" : ""));
    for (std::size_t i = 0; i < c.voltage.size(); ++i) {
      const double v = c.voltage[i];
      t.add_row({width_label(widths[j]), num(v), num(c.displacement[i] / um),
                 num(c.fit_coefficient * v * v / um)});
    }
  }
  return t;
}

Table cavity_table(const cavity::CavitySpec& spec, const cavity::TransitionSpec& tr,
                   const std::vector<double>& lengths, std::string name) {
  Table t;
  t.name = std::move(name);
  t.columns = {"L_um",     "stable",   "waist_um",  "g_MHz",          "kappa_MHz",
               "gamma_MHz", "strong", "clip_margin", "clip_warning"};
  t.comments.push_back("transition=" + tr.name + " wavelength_nm=" + num(tr.wavelength / 1e-9) +
                       " finesse=" + num(spec.finesse) + " beta=" + num(tr.branching) +
                       " eta=" + num(tr.eta));
  for (const auto& p : cavity::sweep_length(spec, tr, lengths)) {
    if (!p.stable) {
      t.add_row({num(p.length / um), "0", "", "", num(p.kappa_hz / 1e6), num(p.gamma_hz / 1e6), "0",
                 "", ""});
      continue;
    }
    t.add_row({num(p.length / um), "1", num(p.waist / um), num(p.g_hz / 1e6), num(p.kappa_hz / 1e6),
               num(p.gamma_hz / 1e6), p.strong_coupling ? "1" : "0", num(p.clipping_margin),
               p.clipping_warning ? "1" : "0"});
  }
  return t;
}

trap::TrapSetup trap_setup(const config::Config& cfg) {
  trap::TrapSetup s{.tag = cfg.tag,
                    .geometry = cfg.geometry,
                    .voltages = cfg.voltages,
                    .drive = cfg.rf,
                    .species = cfg.species,
                    .grid = cfg.grid,
                    .expected_height = 160e-6,
                    .tune_offset = false,
                    .ranges = {}};
  const auto& f = cfg.geometry.fiber();
  if (f) {
    s.expected_height = f->height;
    s.tune_offset = f->facet_charge_density != 0.0;
  }
  return s;
}

Table trap_report_table(const trap::TrapReport& r, std::string name) {
  Table t;
  t.name = std::move(name);
  t.columns = {"quantity", "value"};
  auto kv = [&](const std::string& k, double v) { t.add_row({k, num(v)}); };
  if (!r.tag.empty()) t.comments.push_back("tag=" + r.tag);
  kv("x_um", r.position[0] / um);
  kv("y_um", r.position[1] / um);
  kv("height_um", r.position[2] / um);
  kv("energy_eV", r.energy_at_minimum);
  kv("v_offset_V", r.v_offset);
  const char* ax[3] = {"x", "y", "z"};
  for (int a = 0; a < 3; ++a) {
    kv(std::string("f") + ax[a] + "_MHz", r.frequency[a] / 1e6);
    kv(std::string("fit_residual_") + ax[a], r.fit_residual[a]);
    kv(std::string("harmonic_lo_") + ax[a] + "_um", r.harmonic_range[a][0] / um);
    kv(std::string("harmonic_hi_") + ax[a] + "_um", r.harmonic_range[a][1] / um);
  }
  for (int i = 0; i < 6; ++i) {
    const auto& ray = r.depth.rays[static_cast<std::size_t>(i)];
    const std::string d(trap::to_string(static_cast<trap::Direction>(i)));
    kv("depth" + d + "_eV", ray.depth);
    kv("depth" + d + "_edge", ray.edge_limited ? 1.0 : 0.0);
  }
  t.add_row({"shallowest", std::string(trap::to_string(r.depth.shallowest()))});
  kv("min_depth_eV", r.depth.minimum());
  return t;
}

Table sweep_table(const std::vector<trap::SweepRow>& rows, std::string name) {
  Table t;
  t.name = std::move(name);
  t.columns = {"case",   "L_um",   "status",      "height_um",  "fx_MHz",    "fy_MHz",
               "fz_MHz", "min_depth_eV", "shallowest", "v_offset_V", "error"};
  for (const auto& r : rows) {
    const std::string c(model::to_string(r.fiber_case));
    if (!r.ok) {
      t.add_row({c, num(r.cavity_length / um), "failed", "", "", "", "", "", "", "", clean(r.error)});
      t.failures.push_back(c + " L_um=" + num(r.cavity_length / um) + ": " + r.error);
      continue;
    }
    const auto& p = r.report;
    t.add_row({c, num(r.cavity_length / um), "ok", num(p.position[2] / um),
               num(p.frequency[0] / 1e6), num(p.frequency[1] / 1e6), num(p.frequency[2] / 1e6),
               num(p.depth.minimum()), std::string(trap::to_string(p.depth.shallowest())),
               num(p.v_offset), ""});
  }
  return t;
}

Table sweep_height_table(const std::vector<trap::SweepRow>& rows, std::string name) {
  Table t;
  t.name = std::move(name);
  t.columns = {"L_um", "status", "height_um", "fiber_height_um", "v_offset_V"};
  for (const auto& r : rows) {
    const double fh = model::default_fiber_height(r.fiber_case) / um;
    if (!r.ok) {
      t.add_row({num(r.cavity_length / um), "failed", "", num(fh), ""});
      t.failures.push_back("L_um=" + num(r.cavity_length / um) + ": " + r.error);
      continue;
    }
    t.add_row({num(r.cavity_length / um), "ok", num(r.report.position[2] / um), num(fh),
               num(r.report.v_offset)});
  }
  return t;
}

Table sweep_frequency_table(const std::vector<trap::SweepRow>& rows, std::string name) {
  Table t;
  t.name = std::move(name);
  t.columns = {"L_um", "status", "fx_MHz", "fy_MHz", "fz_MHz", "min_depth_eV", "shallowest"};
  for (const auto& r : rows) {
    if (!r.ok) {
      t.add_row({num(r.cavity_length / um), "failed", "", "", "", "", ""});
      t.failures.push_back("L_um=" + num(r.cavity_length / um) + ": " + r.error);
      continue;
    }
    const auto& p = r.report;
    t.add_row({num(r.cavity_length / um), "ok", num(p.frequency[0] / 1e6), num(p.frequency[1] / 1e6),
               num(p.frequency[2] / 1e6), num(p.depth.minimum()),
               std::string(trap::to_string(p.depth.shallowest()))});
  }
  return t;
}

std::vector<trap::Vec3> compensation_deltas(const std::vector<double>& voltages) {
  std::vector<trap::Vec3> d;
  for (int a = 0; a < 3; ++a) {
    for (double v : voltages) {
      trap::Vec3 x{0.0, 0.0, 0.0};
      x[a] = v;
      d.push_back(x);
    }
  }
  return d;
}

Table compensation_table(const std::vector<trap::CompensationPoint>& points, std::string name) {
  Table t;
  t.name = std::move(name);
  t.columns = {"axis", "dU_V", "dx_um", "dy_um", "dz_um"};
  const auto fit = trap::fit_compensation(points);
  const char* ax[3] = {"x", "y", "z"};
  for (int a = 0; a < 3; ++a) {
    t.comments.push_back(std::string("axis=") + ax[a] + " sensitivity_um_per_V=" +
                         num(fit.sensitivity[a] / um) + " r_squared=" + num(fit.r_squared[a]));
  }
  // Points come in one block per axis; the dU = 0 rows take their block's axis.
  const std::size_t block = points.size() % 3 == 0 ? points.size() / 3 : 0;
  for (std::size_t n = 0; n < points.size(); ++n) {
    const auto& p = points[n];
    int a = block ? static_cast<int>(n / block) : 0;
    for (int i = 0; i < 3; ++i)
      if (p.delta[i] != 0.0) a = i;
    t.add_row({ax[a], num(p.delta[a]), num(p.displacement[0] / um), num(p.displacement[1] / um),
               num(p.displacement[2] / um)});
  }
  return t;
}

Table reproduce(std::string_view id, const config::Config& cfg, const FigureOptions& opt) {
  if (!is_figure_id(id)) {
    std::string list;
    for (const auto& s : figure_ids()) list += (list.empty() ? "" : ", ") + s;
    throw ValidationError("figure.id", "unknown figure id '" + std::string(id) + "'; valid ids: " + list);
  }
  const std::vector<double> widths{4 * um, 5 * um, 6 * um, 7 * um, 8 * um};
  if (id == "2c") return sag_table(cfg, widths);
  if (id == "2d") return gravity_fos_table(cfg, widths);
  if (id == "3f") return comb_table(cfg, {4 * um, 5 * um, 6 * um, 8 * um}, cfg.comb.rated_voltage, 60);
  if (id == "4c") return plate_table(cfg, {4 * um, 6 * um, 8 * um}, {180.0, 210.0, 240.0}, 5.0);
  if (id == "5") return modes_table(cfg, 8 * um);
  if (id[0] == '7') {
    const auto& p = cavity::transition_preset(id);
    cavity::CavitySpec spec = cfg.cavity;
    spec.finesse = p.finesse;
    const auto lengths = opt.cavity_lengths.empty() ? default_cavity_lengths() : opt.cavity_lengths;
    Table t = cavity_table(spec, p.transition, lengths, "fig" + std::string(id));
    t.comments.insert(t.comments.begin(), "ion=" + p.ion);
    return t;
  }
  if (id[0] == '6') {
    const SweepPanel panel = sweep_panel(id);
    const auto lengths = opt.sweep_lengths.empty() ? default_sweep_lengths() : opt.sweep_lengths;
    const auto rows = trap::sweep_cavity_length(trap_setup(cfg), panel.fiber_case, lengths, opt.jobs);
    const std::string name = "fig" + std::string(id);
    Table t = panel.heights ? sweep_height_table(rows, name) : sweep_frequency_table(rows, name);
    t.comments.insert(t.comments.begin(), "case=" + std::string(model::to_string(panel.fiber_case)));
    return t;
  }
  // S2b
  const trap::TrapSetup s = trap_setup(cfg);
  const auto fields = trap::solve_fields(s, opt.jobs);
  const auto volts = opt.compensation_voltages.empty() ? default_compensation_voltages()
                                                       : opt.compensation_voltages;
  return compensation_table(trap::compensation_response(s, fields, compensation_deltas(volts)),
                            "figS2b");
}

}  // namespace fibertrap::figures
