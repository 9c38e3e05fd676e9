#pragma once

#include <optional>
#include <string>
#include <vector>

namespace ltlnav::cli {

// Shared exit-code contract, used by every subcommand:
//   0 success, 1 input/parse/runtime failure, 2 strict validation failure,
//   3 unsatisfiable formula.
inline constexpr int kExitOk = 0;
inline constexpr int kExitError = 1;
inline constexpr int kExitStrict = 2;
inline constexpr int kExitUnsat = 3;

int cmd_check(const std::string& config_path, bool strict);

int cmd_translate(const std::string& formula,
                  const std::vector<std::string>& extra_atoms, bool dot,
                  const std::string& out_path);

int cmd_plan(const std::string& config_path, const std::string& out_path);

struct SimulateOptions {
  std::string config_path;
  std::string out_dir;  // empty: verdict to stdout only, no files
  std::optional<double> dt;
  std::optional<int> cycles;
  std::optional<double> clamp;
};
int cmd_simulate(const SimulateOptions& o);

struct PlotOptions {
  std::string traj_path;
  std::string config_path;  // optional; adds workspace/region outlines
  std::string projection = "xy";
  std::string out_path;  // default: trajectory path with .svg
  bool no_regions = false;
  bool no_workspace = false;
};
int cmd_plot(const PlotOptions& o);

}  // namespace ltlnav::cli
