#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "fibertrap/config.hpp"
#include "fibertrap/errors.hpp"
#include "fibertrap/figures.hpp"
#include "fibertrap/parallel.hpp"
#include "fibertrap/trap.hpp"
#include "fibertrap/units.hpp"

#ifndef FIBERTRAP_VERSION
#define FIBERTRAP_VERSION "unknown"
#endif

namespace fs = std::filesystem;
using namespace fibertrap;

namespace {

enum Exit { ok = 0, config_error = 1, solver_failure = 2, partial_failure = 3 };

constexpr double um = 1e-6;

struct Common {
  std::string config_path;
  std::string out_dir;
  int jobs = default_jobs();
  std::string grid_spacing;
  std::optional<double> tolerance;
};

std::string utc_timestamp() {
  const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::vector<double> micrometres(const std::vector<double>& v) {
  std::vector<double> out;
  for (double x : v) out.push_back(x * um);
  return out;
}

class Run {
 public:
  Run(std::string command, std::vector<std::string> args, const Common& common)
      : command_(std::move(command)), args_(std::move(args)), common_(common) {
    if (!common.config_path.empty()) cfg_ = config::load_config(common.config_path);
    if (!common.grid_spacing.empty()) {
      cfg_.grid.trap_spacing = parse_quantity(common.grid_spacing, Dimension::length);
      cfg_.grid.fine_spacing = std::min(cfg_.grid.fine_spacing, cfg_.grid.trap_spacing);
    }
    if (common.tolerance) cfg_.grid.tolerance = *common.tolerance;
    cfg_.grid.validate();
    out_ = common.out_dir;
    fs::create_directories(out_);
  }

  [[nodiscard]] const config::Config& config() const { return cfg_; }
  [[nodiscard]] int jobs() const { return std::max(1, common_.jobs); }

  void emit(const figures::Table& t) {
    const fs::path p = out_ / (t.name + ".csv");
    figures::write_csv(t, p);
    files_.push_back(p.filename().string());
    rows_ += t.rows.size();
    for (const auto& f : t.failures) failures_.push_back(f);
    std::cout << p.string() << "\n";
  }

  /// Writes the manifest and returns the exit status.
  int finish(const std::string& stem) {
    const int status = failures_.empty() ? ok : (failures_.size() >= rows_ ? solver_failure : partial_failure);
    nlohmann::ordered_json m;
    m["command"] = command_;
    m["arguments"] = args_;
    m["config_path"] = common_.config_path;
    m["output_directory"] = out_.string();
    m["tool_version"] = FIBERTRAP_VERSION;
    m["timestamp"] = utc_timestamp();
    m["jobs"] = jobs();
    m["parameters"] = config::serialize(cfg_);
    m["files"] = files_;
    m["rows"] = rows_;
    m["failed_rows"] = failures_;
    m["exit_status"] = status;
    std::ofstream f(out_ / (stem + ".manifest.json"), std::ios::binary);
    f << m.dump(2) << "\n";
    return status;
  }

 private:
  std::string command_;
  std::vector<std::string> args_;
  Common common_;
  config::Config cfg_;
  fs::path out_;
  std::vector<std::string> files_;
  std::vector<std::string> failures_;
  std::size_t rows_ = 0;
};

std::string default_out_dir() {
  const char* env = std::getenv("FIBERTRAP_OUT");
  return env && *env ? env : "results";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Fiber-cavity ion trap and MEMS stage simulator"};
  app.require_subcommand(1);
  app.set_version_flag("--version", FIBERTRAP_VERSION);
  Common common;
  common.out_dir = default_out_dir();
  app.add_option("--config", common.config_path, "Configuration file")->check(CLI::ExistingFile);
  app.add_option("--out", common.out_dir, "Output directory (default: $FIBERTRAP_OUT or ./results)");
  app.add_option("--jobs", common.jobs, "Concurrent workers")->check(CLI::PositiveNumber);
  app.add_option("--grid-spacing", common.grid_spacing, "Grid spacing near the trap, e.g. \"4 um\"");
  app.add_option("--tolerance", common.tolerance, "Relative residual of the field solves")
      ->check(CLI::PositiveNumber);
  app.fallthrough();

  std::vector<std::string> args(argv + 1, argv + argc);

  std::vector<double> widths;
  double v_max = 0.0;
  int steps = 60;
  std::vector<double> v_maxes;
  double v_step = 5.0;
  double width = 8.0;
  std::string case_name = "bare";
  std::vector<double> lengths;
  std::vector<double> voltages;
  std::string transition = "7c";
  std::string figure;

  auto* comb = app.add_subcommand("actuator-comb", "Comb-drive stroke curves");
  comb->add_option("--widths", widths, "Beam widths in um")->delimiter(',');
  comb->add_option("--vmax", v_max, "Largest voltage (default: comb rating)");
  comb->add_option("--steps", steps, "Voltage steps")->check(CLI::PositiveNumber);

  auto* plate = app.add_subcommand("actuator-plate", "Parallel-plate z stroke curves");
  plate->add_option("--widths", widths, "Beam widths in um")->delimiter(',');
  plate->add_option("--vmax", v_maxes, "Largest voltage per width")->delimiter(',');
  plate->add_option("--step", v_step, "Voltage step")->check(CLI::PositiveNumber);

  auto* sag = app.add_subcommand("mech-sag", "Gravity sag against beam width");
  sag->add_option("--widths", widths, "Beam widths in um")->delimiter(',');

  auto* fos = app.add_subcommand("mech-fos", "Factors of safety under sag and actuation");
  fos->add_option("--widths", widths, "Beam widths in um for the sag table")->delimiter(',');

  auto* modes = app.add_subcommand("mech-modes", "Translational modes with and without fiber");
  modes->add_option("--width", width, "Beam width in um");

  auto* solve = app.add_subcommand("trap-solve", "Trap minimum, frequencies and depths");

  auto* sweep = app.add_subcommand("trap-sweep", "Trap properties against cavity length");
  sweep->add_option("--case", case_name, "Fiber case")
      ->check(CLI::IsMember({"bare", "coated", "charged"}));
  sweep->add_option("--lengths", lengths, "Cavity lengths in um")->delimiter(',');

  auto* comp = app.add_subcommand("trap-compensate", "Ion displacement under compensation voltages");
  comp->add_option("--voltages", voltages, "Compensation voltages per axis")->delimiter(',');

  auto* cav = app.add_subcommand("cavity-sweep", "Cavity rates against length");
  cav->add_option("--transition", transition, "Transition preset")
      ->check(CLI::IsMember({"7a", "7b", "7c"}));
  cav->add_option("--lengths", lengths, "Cavity lengths in um")->delimiter(',');

  auto* repro = app.add_subcommand("reproduce-figure", "Regenerate the data of one figure panel");
  repro->add_option("id", figure, "Figure id")->required();
  repro->add_option("--lengths", lengths, "Cavity lengths in um for the trap and cavity panels")->delimiter(',');
  repro->add_option("--voltages", voltages, "Compensation voltages for panel S2b")->delimiter(',');

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? ok : config_error;
  }

  try {
    const std::string command = app.get_subcommands().front()->get_name();
    if (command == "reproduce-figure" && !figures::is_figure_id(figure)) {
      std::string list;
      for (const auto& s : figures::figure_ids()) list += (list.empty() ? "" : ", ") + s;
      std::cerr << "error: unknown figure id '" << figure << "'; valid ids: " << list << "\n";
      return config_error;
    }
    Run run(command, args, common);
    const auto& cfg = run.config();
    const auto w_or = [&](std::vector<double> def) {
      return widths.empty() ? def : micrometres(widths);
    };
    std::string stem = command;
    if (command == "actuator-comb") {
      auto t = figures::comb_table(cfg, w_or({4 * um, 5 * um, 6 * um, 8 * um}),
                                   v_max > 0 ? v_max : cfg.comb.rated_voltage, steps);
      t.name = stem = "actuator_comb";
      run.emit(t);
    } else if (command == "actuator-plate") {
      const auto ws = w_or({4 * um, 6 * um, 8 * um});
      std::vector<double> vm = v_maxes;
      if (vm.empty()) vm.assign(ws.size(), cfg.plate.rated_voltage);
      if (vm.size() == 1) vm.assign(ws.size(), vm.front());
      auto t = figures::plate_table(cfg, ws, vm, v_step);
      t.name = stem = "actuator_plate";
      run.emit(t);
    } else if (command == "mech-sag") {
      auto t = figures::sag_table(cfg, w_or({4 * um, 5 * um, 6 * um, 7 * um, 8 * um}));
      t.name = stem = "mech_sag";
      run.emit(t);
    } else if (command == "mech-fos") {
      auto g = figures::gravity_fos_table(cfg, w_or({4 * um, 5 * um, 6 * um, 7 * um, 8 * um}));
      g.name = "mech_fos_gravity";
      run.emit(g);
      auto a = figures::actuation_fos_table(cfg);
      a.name = "mech_fos_actuation";
      run.emit(a);
      stem = "mech_fos";
    } else if (command == "mech-modes") {
      auto t = figures::modes_table(cfg, width * um);
      t.name = stem = "mech_modes";
      run.emit(t);
    } else if (command == "trap-solve") {
      const auto r = trap::solve_trap(figures::trap_setup(cfg), run.jobs());
      run.emit(figures::trap_report_table(r, stem = "trap_solve"));
    } else if (command == "trap-sweep") {
      const auto ls = lengths.empty() ? figures::default_sweep_lengths() : micrometres(lengths);
      const auto rows = trap::sweep_cavity_length(figures::trap_setup(cfg),
                                                  model::fiber_case_from_string(case_name), ls,
                                                  run.jobs());
      run.emit(figures::sweep_table(rows, stem = "trap_sweep_" + case_name));
    } else if (command == "trap-compensate") {
      const auto s = figures::trap_setup(cfg);
      const auto fields = trap::solve_fields(s, run.jobs());
      const auto vs = voltages.empty() ? figures::default_compensation_voltages() : voltages;
      const auto pts = trap::compensation_response(s, fields, figures::compensation_deltas(vs));
      run.emit(figures::compensation_table(pts, stem = "trap_compensate"));
    } else if (command == "cavity-sweep") {
      const auto& p = cavity::transition_preset(transition);
      cavity::CavitySpec spec = cfg.cavity;
      spec.finesse = p.finesse;
      const auto ls = lengths.empty() ? figures::default_cavity_lengths() : micrometres(lengths);
      run.emit(figures::cavity_table(spec, p.transition, ls, stem = "cavity_sweep_" + transition));
    } else {
      figures::FigureOptions opt;
      opt.jobs = run.jobs();
      if (!lengths.empty()) {
        if (figure[0] == '6') opt.sweep_lengths = micrometres(lengths);
        if (figure[0] == '7') opt.cavity_lengths = micrometres(lengths);
      }
      opt.compensation_voltages = voltages;
      const auto t = figures::reproduce(figure, cfg, opt);
      stem = t.name;
      run.emit(t);
    }
    return run.finish(stem);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return config_error;
  } catch (const ValidationError& e) {
    std::cerr << "invalid input: " << e.what() << "\n";
    return config_error;
  } catch (const Error& e) {
    std::cerr << "failed: " << e.what() << "\n";
    return solver_failure;
  } catch (const std::exception& e) {
    std::cerr << "failed: " << e.what() << "\n";
    return solver_failure;
  }
}
