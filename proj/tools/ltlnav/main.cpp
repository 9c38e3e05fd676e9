#include <exception>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "commands.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Plan and fly LTL-specified multi-agent navigation scenarios"};
  app.require_subcommand(1);

  std::string check_path;
  bool strict = false;
  auto* check = app.add_subcommand("check", "Validate a scenario file");
  check->add_option("config", check_path, "scenario JSON file")->required();
  check->add_flag("--strict", strict, "exit 2 when placement findings exist");

  std::string formula, translate_out;
  std::vector<std::string> atoms;
  bool dot = false;
  auto* translate =
      app.add_subcommand("translate", "Compile a formula to an automaton");
  translate->add_option("formula", formula, "LTL formula")->required();
  translate->add_option("--atoms", atoms, "extra alphabet atoms")
      ->delimiter(',');
  translate->add_flag("--dot", dot, "emit DOT instead of JSON");
  translate->add_option("--out", translate_out,
                        "write to this file instead of stdout");

  std::string plan_path, plan_out;
  auto* plan = app.add_subcommand(
      "plan", "Find a region route satisfying each agent's formula");
  plan->add_option("config", plan_path, "scenario JSON file")->required();
  plan->add_option("--out", plan_out, "also write the plan JSON here");

  ltlnav::cli::SimulateOptions sopt;
  double sim_dt = 0.0, sim_clamp = 0.0;
  int sim_cycles = 0;
  auto* simulate =
      app.add_subcommand("simulate", "Plan and fly the whole team");
  simulate->add_option("config", sopt.config_path, "scenario JSON file")
      ->required();
  simulate->add_option(
      "--out", sopt.out_dir,
      "directory for trajectory.csv, events.jsonl and verdict.json");
  simulate->add_option("--dt", sim_dt, "integrator step override (s)");
  simulate->add_option("--cycles", sim_cycles,
                       "suffix repetition count override");
  simulate->add_option("--clamp", sim_clamp,
                       "per-axis control bound override (m/s)");

  ltlnav::cli::PlotOptions popt;
  auto* plot = app.add_subcommand("plot", "Render a trajectory CSV to SVG");
  plot->add_option("trajectory", popt.traj_path, "trajectory CSV file")
      ->required();
  plot->add_option("--config", popt.config_path,
                   "scenario file supplying workspace and region outlines");
  plot->add_option("--projection", popt.projection, "xy, xz or iso")
      ->check(CLI::IsMember({"xy", "xz", "iso"}));
  plot->add_option("--out", popt.out_path,
                   "output SVG path (default: trajectory with .svg)");
  plot->add_flag("--no-regions", popt.no_regions, "skip region outlines");
  plot->add_flag("--no-workspace", popt.no_workspace,
                 "skip the workspace boundary");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? ltlnav::cli::kExitOk : ltlnav::cli::kExitError;
  }

  try {
    if (*check) return ltlnav::cli::cmd_check(check_path, strict);
    if (*translate)
      return ltlnav::cli::cmd_translate(formula, atoms, dot, translate_out);
    if (*plan) return ltlnav::cli::cmd_plan(plan_path, plan_out);
    if (*simulate) {
      if (simulate->count("--dt")) sopt.dt = sim_dt;
      if (simulate->count("--cycles")) sopt.cycles = sim_cycles;
      if (simulate->count("--clamp")) sopt.clamp = sim_clamp;
      return ltlnav::cli::cmd_simulate(sopt);
    }
    if (*plot) return ltlnav::cli::cmd_plot(popt);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return ltlnav::cli::kExitError;
  }
  return ltlnav::cli::kExitOk;
}
