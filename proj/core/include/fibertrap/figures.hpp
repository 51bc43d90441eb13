#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "fibertrap/cavity.hpp"
#include "fibertrap/config.hpp"
#include "fibertrap/trap.hpp"

namespace fibertrap::figures {

/// CSV-ready table. Cells are already formatted; numbers use six significant
/// digits so that regression diffs are stable.
struct Table {
  std::string name;                       // file stem, e.g. "fig3f"
  std::vector<std::string> comments;      // written as leading "# " lines
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;
  std::vector<std::string> failures;      // one entry per failed row

  void add_row(std::vector<std::string> cells);
};

/// %.6g formatting; "nan" and "inf" spelled out.
[[nodiscard]] std::string num(double v);

[[nodiscard]] std::string to_csv(const Table& t);
void write_csv(const Table& t, const std::filesystem::path& path);

/// Overrides for the figure pipelines. Empty lists take the defaults.
struct FigureOptions {
  int jobs = 1;
  std::vector<double> sweep_lengths;         // m, trap sweeps (panel 6)
  std::vector<double> cavity_lengths;        // m, cavity sweeps (panel 7)
  std::vector<double> compensation_voltages; // V, per axis (panel S2b)
};

[[nodiscard]] std::vector<double> default_sweep_lengths();
[[nodiscard]] std::vector<double> default_cavity_lengths();
[[nodiscard]] std::vector<double> default_compensation_voltages();

/// Figure ids accepted by reproduce().
[[nodiscard]] const std::vector<std::string>& figure_ids();
[[nodiscard]] bool is_figure_id(std::string_view id);

/// Runs the pipeline behind one figure panel. Throws ValidationError for an
/// unknown id (the message lists the valid ones).
[[nodiscard]] Table reproduce(std::string_view id, const config::Config& cfg,
                              const FigureOptions& options = {});

// Building blocks shared by the CLI subcommands.

/// Gravity sag per beam width (panel 2c).
[[nodiscard]] Table sag_table(const config::Config& cfg, const std::vector<double>& widths);
/// Root stress and factor of safety under the gravity sag (panel 2d).
[[nodiscard]] Table gravity_fos_table(const config::Config& cfg, const std::vector<double>& widths);
/// Safety factors at the actuator maxima: in-plane at 300 V for w = 4, 5, 6,
/// 8 um and vertical at 180, 210, 240 V for w = 4, 6, 8 um.
[[nodiscard]] Table actuation_fos_table(const config::Config& cfg);
/// Translational modes with and without the fiber (panel 5).
[[nodiscard]] Table modes_table(const config::Config& cfg, double width);
/// Comb stroke curves, one column per width (panel 3f).
[[nodiscard]] Table comb_table(const config::Config& cfg, const std::vector<double>& widths,
                               double v_max, int steps);
/// Plate stroke curves with per-width maximum voltage (panel 4c).
[[nodiscard]] Table plate_table(const config::Config& cfg, const std::vector<double>& widths,
                                const std::vector<double>& v_max, double v_step);
/// Cavity rates against length (panel 7).
[[nodiscard]] Table cavity_table(const cavity::CavitySpec& spec, const cavity::TransitionSpec& t,
                                 const std::vector<double>& lengths, std::string name);

/// Trap setup described by a config. The offset is tuned when the fiber
/// carries facet charge.
[[nodiscard]] trap::TrapSetup trap_setup(const config::Config& cfg);

/// One-configuration trap report as a key/value table.
[[nodiscard]] Table trap_report_table(const trap::TrapReport& r, std::string name);
/// Full sweep table with every column of a SweepRow.
[[nodiscard]] Table sweep_table(const std::vector<trap::SweepRow>& rows, std::string name);
/// Panels 6a-6f: heights (a, c, e) or frequencies (b, d, f).
[[nodiscard]] Table sweep_height_table(const std::vector<trap::SweepRow>& rows, std::string name);
[[nodiscard]] Table sweep_frequency_table(const std::vector<trap::SweepRow>& rows, std::string name);
/// Single-axis compensation scans (panel S2b).
[[nodiscard]] Table compensation_table(const std::vector<trap::CompensationPoint>& points,
                                       std::string name);
/// Deltas for single-axis scans over the given voltages.
[[nodiscard]] std::vector<trap::Vec3> compensation_deltas(const std::vector<double>& voltages);

}  // namespace fibertrap::figures
