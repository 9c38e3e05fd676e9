#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

#include "ltlnav/ltl.hpp"
#include "ltlnav/world.hpp"

namespace ltlnav::planner {

// Hard planning-input problems: start pose in no region, malformed formula.
struct PlanError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// An infinite route through the region graph: visit the prefix regions once
// in order, then repeat the suffix cycle forever.  Entries index
// Scenario::regions.  The first entry (prefix front, or suffix front when the
// prefix is empty) is always the agent's start region.
struct AgentPlan {
  std::string agent;
  std::vector<int> prefix;
  std::vector<int> suffix;
};

struct PlanOutcome {
  bool satisfiable = false;
  AgentPlan plan;
};

// Atoms an agent observes while inside the named region (sorted; empty for
// regions the agent has no labels for).
ltl::Letter region_label(const world::AgentSpec& a, const std::string& region);

// Index of the region fully containing the agent's start sphere, or -1.
// Regions are checked in declaration order.
int start_region(const world::Scenario& s, const world::AgentSpec& a);

// The word an agent reads along a plan (region labels, position by position).
ltl::Word plan_word(const world::Scenario& s, const world::AgentSpec& a,
                    const AgentPlan& p);

// Search the product of the complete region graph with the agent's formula
// automaton for an accepting lasso, preferring the shortest prefix + suffix
// found (a deterministic heuristic, not an optimality guarantee).  The same
// scenario always yields the same plan.
PlanOutcome plan_agent(const world::Scenario& s, std::size_t agent);

// Plan every agent independently (plans are decentralized; coordination
// happens through the navigation fields at run time, not here).
std::vector<PlanOutcome> plan_team(const world::Scenario& s);

}  // namespace ltlnav::planner
