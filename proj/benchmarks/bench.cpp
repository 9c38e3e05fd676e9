// Microbenchmarks for the hot paths: potential/gradient evaluation (the
// per-integration-step cost), formula evaluation, automaton translation and
// lasso acceptance, and end-to-end simulation step throughput.

#include <benchmark/benchmark.h>

#include <string>
#include <vector>

#include "ltlnav/buchi.hpp"
#include "ltlnav/ltl.hpp"
#include "ltlnav/nav.hpp"
#include "ltlnav/planner.hpp"
#include "ltlnav/sim.hpp"
#include "ltlnav/vec.hpp"
#include "ltlnav/world.hpp"

namespace {

using ltlnav::Vec3;
namespace nav = ltlnav::nav;
namespace ltl = ltlnav::ltl;
namespace buchi = ltlnav::buchi;
namespace world = ltlnav::world;
namespace planner = ltlnav::planner;
namespace sim = ltlnav::sim;

std::string fixture(const char* name) {
  return std::string(LTLNAV_FIXTURE_DIR) + "/" + name;
}

// A representative mid-clutter context: three forbidden regions and two
// teammates in sensing range, booster on.
nav::FieldContext make_context() {
  nav::FieldContext c;
  c.target = {2.0, 1.0, 0.5};
  c.agent_radius = 0.3;
  c.sensing = 0.65;
  c.workspace_center = {0.0, 0.0, 0.0};
  c.workspace_radius = 10.0;
  c.neighbors = {{{0.4, -0.3, 0.0}, 0.3}, {{-0.5, 0.45, 0.2}, 0.3}};
  c.undesired = {{"r1", {-2.0, 0.0, 0.0}, 0.5},
                 {"r2", {0.0, -2.5, 0.5}, 0.6},
                 {"r3", {3.0, 3.0, -1.0}, 0.4}};
  c.kg = 3.0;
  c.lambda = 2.0;
  c.f_enabled = true;
  return c;
}

void BM_potential(benchmark::State& state) {
  nav::FieldContext c = make_context();
  Vec3 p{-1.0, 1.2, 0.3};
  for (auto _ : state) benchmark::DoNotOptimize(nav::potential(c, p));
}
BENCHMARK(BM_potential);

void BM_gradient(benchmark::State& state) {
  nav::FieldContext c = make_context();
  Vec3 p{-1.0, 1.2, 0.3};
  for (auto _ : state) benchmark::DoNotOptimize(nav::gradient(c, p));
}
BENCHMARK(BM_gradient);

void BM_translate(benchmark::State& state) {
  ltl::FormulaPtr f =
      ltl::parse("[] !obs && [] <> (a && X (c && X b)) && <> dock");
  for (auto _ : state) benchmark::DoNotOptimize(buchi::translate(f));
  state.SetLabel("states=" + std::to_string(buchi::translate(f).num_states));
}
BENCHMARK(BM_translate);

void BM_eval_word(benchmark::State& state) {
  ltl::FormulaPtr f =
      ltl::parse("[] !obs && [] <> (a && X (c && X b)) && <> dock");
  ltl::Word w;
  w.prefix = {{"dock"}};
  w.cycle = {{"a"}, {"c"}, {"b"}};
  ltl::EncodedWord enc(w);
  for (auto _ : state) benchmark::DoNotOptimize(ltl::eval_word(*f, enc));
}
BENCHMARK(BM_eval_word);

void BM_accepts_lasso(benchmark::State& state) {
  buchi::BuchiAutomaton a = buchi::translate(
      ltl::parse("[] !obs && [] <> (a && X (c && X b)) && <> dock"));
  ltl::Word w;
  w.prefix = {{"dock"}};
  w.cycle = {{"a"}, {"c"}, {"b"}};
  for (auto _ : state) benchmark::DoNotOptimize(buchi::accepts_lasso(a, w));
}
BENCHMARK(BM_accepts_lasso);

// End-to-end integration throughput on the small 3-D fixture; the counter
// reports RK4 steps per second (each step = 4 field evaluations per agent
// plus event detection and safety monitoring).
void BM_sim_steps(benchmark::State& state) {
  world::Scenario s = world::load_scenario(fixture("smoke3d.json"));
  std::vector<planner::AgentPlan> plans;
  for (auto& o : planner::plan_team(s)) plans.push_back(o.plan);
  long steps = 0;
  for (auto _ : state) {
    sim::RunResult r = sim::run(s, plans);
    benchmark::DoNotOptimize(r);
    steps += r.steps;
  }
  state.SetItemsProcessed(steps);
}
BENCHMARK(BM_sim_steps)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
