#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "ltlnav/planner.hpp"
#include "ltlnav/vec.hpp"
#include "ltlnav/world.hpp"

namespace ltlnav::sim {

// Per-edge controller phase.  An agent heads out of the source region under
// the source-aware field (Transfer1); the first sample that finds it no
// longer fully inside the source starts a timed blend onto the target-only
// field (Transfer2); after arriving it holds station inside the target for
// the configured dwell time (Dwell); once the route is spent it parks with
// zero control (Done).
enum class Phase { Transfer1, Transfer2, Dwell, Done };
const char* phase_name(Phase p);

enum class RunStatus {
  Completed,            // every agent finished its route
  StepBudgetExhausted,  // sim.max_steps integration steps were not enough
  SafetyViolation,      // a collision / containment monitor fired
  FieldError,           // the navigation field degenerated mid-run
};
const char* status_name(RunStatus s);

enum class EventType {
  TransitionStarted,   // a new route edge began
  RegionExited,        // first sample outside the source region
  SwitchComplete,      // the field blend reached the target-only field
  Arrived,             // first sample fully inside the target region
  CollisionViolation,  // two agent spheres overlap
  RegionViolation,     // an agent sphere overlaps a region it must avoid,
                       // or pokes out of the workspace (region < 0)
};
const char* event_name(EventType t);

struct Event {
  EventType type;
  double t = 0.0;
  int agent = -1;     // index into Scenario::agents
  int edge_src = -1;  // TransitionStarted
  int edge_dst = -1;  // TransitionStarted
  int region = -1;    // RegionExited / Arrived / RegionViolation (-1: workspace)
  int other = -1;     // CollisionViolation: the other agent
  double value = 0.0; // SwitchComplete: blend duration; violations: clearance
};

struct AgentSample {
  Vec3 position;
  Vec3 control;
  int edge_src = -1;  // current edge, -1 once done
  int edge_dst = -1;
  Phase phase = Phase::Done;
};

struct Sample {
  double t = 0.0;
  long step = 0;
  std::vector<AgentSample> agents;
};

// Hooks called once per integration sample, in time order.  Events for a
// sample are delivered before the sample itself.
class Observer {
 public:
  virtual ~Observer() = default;
  virtual void on_event(const Event&) {}
  virtual void on_sample(const Sample&) {}
};

struct EdgeRecord {
  int src = -1;
  int dst = -1;
  double t_start = 0.0;
  std::optional<double> t_exit;    // first sample outside the source
  std::optional<double> t_switch;  // t_exit + blend duration
  std::optional<double> t_arrive;  // unset when the run ended mid-edge
  // The blend is sized on the assumption that arrival comes only after it has
  // finished (t_arrive - t_exit > blend duration). `early` records the edges
  // that broke that assumption; instant self-loop arrivals have no blend and
  // are never early.
  bool early = false;
};

struct AgentResult {
  std::string name;
  bool completed = false;
  bool conformant = false;
  // regions whose ball fully contained the agent, consecutive repeats
  // collapsed; conformance compares this against the collapsed plan route
  std::vector<int> visited;
  std::vector<EdgeRecord> edges;
};

struct SafetyStats {
  // minima over the whole run; negative means a violation happened
  double min_agent_clearance = 0.0;    // pairwise sphere gap
  double min_region_clearance = 0.0;   // gap to the current avoid set
  double min_workspace_margin = 0.0;   // distance left to the boundary
  int violations = 0;
};

struct RunResult {
  RunStatus status = RunStatus::Completed;
  double t_end = 0.0;
  long steps = 0;
  std::string error;  // FieldError message when status == FieldError
  std::vector<AgentResult> agents;
  SafetyStats safety;
  double max_abs_control = 0.0;  // per-axis maximum over the run
};

// Integrate the team under the switching field controller until every agent
// finishes its route, the step budget runs out, or a monitor fires.
// `plans` must hold one satisfiable plan per agent, in agent order.
RunResult run(const world::Scenario& s,
              const std::vector<planner::AgentPlan>& plans,
              Observer* observer = nullptr);

std::string verdict_json(const world::Scenario& s, const RunResult& r);

// Streams one CSV row per agent per sample:
//   t,agent,x,y,z,ux,uy,uz,edge_src,edge_dst,phase
// z and uz stay empty for planar scenarios; numbers are shortest-round-trip.
class CsvWriter : public Observer {
 public:
  CsvWriter(std::ostream& out, const world::Scenario& s);
  void on_sample(const Sample& sample) override;

 private:
  std::ostream& out_;
  const world::Scenario& scenario_;
};

// Streams one JSON object per line per event.
class JsonlWriter : public Observer {
 public:
  JsonlWriter(std::ostream& out, const world::Scenario& s);
  void on_event(const Event& e) override;

 private:
  std::ostream& out_;
  const world::Scenario& scenario_;
};

// Forwards to any number of observers, in order.
class MultiObserver : public Observer {
 public:
  void add(Observer* o) { observers_.push_back(o); }
  void on_event(const Event& e) override {
    for (Observer* o : observers_) o->on_event(e);
  }
  void on_sample(const Sample& s) override {
    for (Observer* o : observers_) o->on_sample(s);
  }

 private:
  std::vector<Observer*> observers_;
};

}  // namespace ltlnav::sim
