#include "commands.hpp"

#include <filesystem>
#include <fstream>
#include <iostream>
#include <stdexcept>

#include "json.hpp"
#include "ltlnav/buchi.hpp"
#include "ltlnav/ltl.hpp"
#include "ltlnav/planner.hpp"
#include "ltlnav/sim.hpp"
#include "ltlnav/world.hpp"

namespace ltlnav::cli {
namespace {

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  out << text;
  if (!out) throw std::runtime_error("short write to '" + path + "'");
}

nlohmann::json region_names(const world::Scenario& s,
                            const std::vector<int>& route) {
  auto arr = nlohmann::json::array();
  for (int r : route) arr.push_back(s.regions[r].name);
  return arr;
}

}  // namespace

int cmd_check(const std::string& config_path, bool strict) {
  auto s = world::load_scenario(config_path);
  auto findings = world::validate(s);
  for (const auto& f : findings) std::cout << "finding: " << f.what << "\n";
  std::cout << config_path << ": " << s.agents.size() << " agent(s), "
            << s.regions.size() << " region(s), " << findings.size()
            << " finding(s)\n";
  if (strict && !findings.empty()) return kExitStrict;
  return kExitOk;
}

int cmd_translate(const std::string& formula,
                  const std::vector<std::string>& extra_atoms, bool dot,
                  const std::string& out_path) {
  auto f = ltl::parse(formula);
  auto aut = buchi::translate(f, extra_atoms);
  std::string text = dot ? buchi::to_dot(aut) : buchi::to_json(aut);
  if (out_path.empty())
    std::cout << text;
  else
    write_file(out_path, text);
  std::cerr << "automaton: " << aut.num_states << " state(s), "
            << aut.edges.size() << " edge(s)\n";
  return kExitOk;
}

int cmd_plan(const std::string& config_path, const std::string& out_path) {
  auto s = world::load_scenario(config_path);
  auto outcomes = planner::plan_team(s);

  bool all_sat = true;
  nlohmann::json j;
  j["agents"] = nlohmann::json::array();
  for (std::size_t i = 0; i < outcomes.size(); ++i) {
    const auto& oc = outcomes[i];
    const auto& name = s.agents[i].name;
    nlohmann::json ja;
    ja["id"] = name;
    ja["satisfiable"] = oc.satisfiable;
    if (oc.satisfiable) {
      ja["prefix"] = region_names(s, oc.plan.prefix);
      ja["suffix"] = region_names(s, oc.plan.suffix);
      std::cerr << name << ": ";
      for (int r : oc.plan.prefix) std::cerr << s.regions[r].name << ' ';
      std::cerr << "| ";
      for (int r : oc.plan.suffix) std::cerr << s.regions[r].name << ' ';
      std::cerr << "\n";
    } else {
      ja["prefix"] = nlohmann::json::array();
      ja["suffix"] = nlohmann::json::array();
      std::cerr << name << ": UNSAT\n";
      all_sat = false;
    }
    j["agents"].push_back(std::move(ja));
  }
  j["satisfiable"] = all_sat;

  std::string text = j.dump(2) + "\n";
  std::cout << text;
  if (!out_path.empty()) write_file(out_path, text);
  return all_sat ? kExitOk : kExitUnsat;
}

int cmd_simulate(const SimulateOptions& o) {
  auto s = world::load_scenario(o.config_path);
  if (o.dt) s.sim.dt = *o.dt;
  if (o.cycles) s.sim.max_cycles = *o.cycles;
  if (o.clamp) s.sim.clamp = *o.clamp;
  if (s.sim.dt <= 0) throw world::ScenarioError("dt must be positive");
  if (s.sim.max_cycles < 1)
    throw world::ScenarioError("cycles must be at least 1");
  if (s.sim.clamp && *s.sim.clamp <= 0)
    throw world::ScenarioError("clamp must be positive");

  auto outcomes = planner::plan_team(s);
  std::vector<planner::AgentPlan> plans;
  bool all_sat = true;
  for (std::size_t i = 0; i < outcomes.size(); ++i) {
    if (!outcomes[i].satisfiable) {
      std::cerr << "unsat: agent '" << s.agents[i].name
                << "' has no satisfiable route\n";
      all_sat = false;
    } else {
      plans.push_back(outcomes[i].plan);
    }
  }
  if (!all_sat) return kExitUnsat;

  std::ofstream csv_file, events_file;
  sim::MultiObserver observers;
  std::optional<sim::CsvWriter> csv;
  std::optional<sim::JsonlWriter> events;
  if (!o.out_dir.empty()) {
    std::filesystem::create_directories(o.out_dir);
    auto dir = std::filesystem::path(o.out_dir);
    csv_file.open(dir / "trajectory.csv", std::ios::binary);
    events_file.open(dir / "events.jsonl", std::ios::binary);
    if (!csv_file || !events_file)
      throw std::runtime_error("cannot write into '" + o.out_dir + "'");
    csv.emplace(csv_file, s);
    events.emplace(events_file, s);
    observers.add(&*csv);
    observers.add(&*events);
  }

  auto res = sim::run(s, plans, &observers);
  auto verdict = sim::verdict_json(s, res);
  std::cout << verdict;
  if (!o.out_dir.empty())
    write_file((std::filesystem::path(o.out_dir) / "verdict.json").string(),
               verdict);
  std::cerr << "status: " << sim::status_name(res.status)
            << ", t_end=" << res.t_end << ", steps=" << res.steps << "\n";
  return res.status == sim::RunStatus::Completed ? kExitOk : kExitError;
}

}  // namespace ltlnav::cli
