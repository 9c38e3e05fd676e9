#include "ltlnav/sim.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <ostream>
#include <stdexcept>

#include "json.hpp"
#include "ltlnav/nav.hpp"

namespace ltlnav::sim {

const char* phase_name(Phase p) {
  switch (p) {
    case Phase::Transfer1: return "transfer1";
    case Phase::Transfer2: return "transfer2";
    case Phase::Dwell: return "dwell";
    case Phase::Done: return "done";
  }
  return "?";
}

const char* status_name(RunStatus s) {
  switch (s) {
    case RunStatus::Completed: return "completed";
    case RunStatus::StepBudgetExhausted: return "step_budget_exhausted";
    case RunStatus::SafetyViolation: return "safety_violation";
    case RunStatus::FieldError: return "field_error";
  }
  return "?";
}

const char* event_name(EventType t) {
  switch (t) {
    case EventType::TransitionStarted: return "transition_started";
    case EventType::RegionExited: return "region_exited";
    case EventType::SwitchComplete: return "switch_complete";
    case EventType::Arrived: return "arrived";
    case EventType::CollisionViolation: return "collision_violation";
    case EventType::RegionViolation: return "region_violation";
  }
  return "?";
}

namespace {

struct AgentRun {
  std::vector<int> route;
  std::size_t edge = 0;  // current edge: route[edge] -> route[edge + 1]
  Phase phase = Phase::Done;
  int cur_src = -1;  // regions of the edge the fields are armed for
  int cur_dst = -1;
  double t_edge_start = 0.0;
  std::optional<double> t_exit;
  double nu = 0.0;
  bool switch_done = false;
  double dwell_until = 0.0;
  std::vector<EdgeRecord> recs;
  std::vector<int> visited;      // collapsed full-containment sequence
  std::vector<int> avoid;        // regions monitored/avoided on this edge
  nav::FieldContext ctx1, ctx2;  // source-aware and target-only fields
};

nav::FieldContext base_context(const world::Scenario& s,
                               const world::AgentSpec& a) {
  nav::FieldContext c;
  c.agent_radius = a.radius;
  c.sensing = a.sensing;
  c.workspace_center = s.workspace.center;
  c.workspace_radius = s.workspace.radius;
  c.kg = a.kg;
  c.lambda = a.lambda;
  c.f_enabled = a.fterm.enabled;
  c.eps0 = a.fterm.eps0;
  c.fceiling = a.fterm.X;
  return c;
}

Vec3 clamp_axes(Vec3 u, const std::optional<double>& c) {
  if (!c) return u;
  u.x = std::clamp(u.x, -*c, *c);
  u.y = std::clamp(u.y, -*c, *c);
  u.z = std::clamp(u.z, -*c, *c);
  return u;
}

// Control of one agent at time t given its phase; neighbors must already be
// written into both field contexts.
Vec3 control_of(const AgentRun& ar, double t, const Vec3& p) {
  switch (ar.phase) {
    case Phase::Done:
      return {};
    case Phase::Transfer1:
      return nav::control(ar.ctx1, p);
    case Phase::Dwell:
      return nav::control(ar.ctx2, p);
    case Phase::Transfer2: {
      double blend = nav::switch_blend((t - *ar.t_exit) / ar.nu);
      if (blend >= 1.0) return nav::control(ar.ctx2, p);
      if (blend <= 0.0) return nav::control(ar.ctx1, p);
      return (1.0 - blend) * nav::control(ar.ctx1, p) +
             blend * nav::control(ar.ctx2, p);
    }
  }
  return {};
}

}  // namespace

RunResult run(const world::Scenario& s,
              const std::vector<planner::AgentPlan>& plans,
              Observer* observer) {
  const std::size_t n = s.agents.size();
  const int num_regions = static_cast<int>(s.regions.size());
  if (plans.size() != n)
    throw std::invalid_argument("run: need exactly one plan per agent");

  std::vector<AgentRun> runs(n);
  std::vector<Vec3> pos(n);
  for (std::size_t i = 0; i < n; ++i) {
    const planner::AgentPlan& p = plans[i];
    if (p.agent != s.agents[i].name)
      throw std::invalid_argument("run: plan for '" + p.agent +
                                  "' does not match agent '" +
                                  s.agents[i].name + "'");
    AgentRun& ar = runs[i];
    ar.route = p.prefix;
    for (int c = 0; c < s.sim.max_cycles; ++c)
      ar.route.insert(ar.route.end(), p.suffix.begin(), p.suffix.end());
    if (ar.route.empty())
      throw std::invalid_argument("run: plan for '" + p.agent +
                                  "' has an empty route");
    for (int r : ar.route)
      if (r < 0 || r >= num_regions)
        throw std::invalid_argument("run: plan for '" + p.agent +
                                    "' names an unknown region");
    pos[i] = s.agents[i].start;
    ar.ctx1 = ar.ctx2 = base_context(s, s.agents[i]);
    if (ar.route.size() >= 2) {
      // park in Dwell with an expired timer; the event pass at t = 0 starts
      // the first edge and emits its TransitionStarted
      ar.phase = Phase::Dwell;
      ar.dwell_until = 0.0;
    } else {
      ar.phase = Phase::Done;
    }
  }

  RunResult res;
  res.agents.resize(n);
  res.safety.min_agent_clearance = std::numeric_limits<double>::infinity();
  res.safety.min_region_clearance = std::numeric_limits<double>::infinity();
  res.safety.min_workspace_margin = std::numeric_limits<double>::infinity();

  auto emit = [&](const Event& e) {
    if (observer) observer->on_event(e);
  };

  auto arm_edge = [&](std::size_t i, double t) {
    AgentRun& ar = runs[i];
    int k = ar.route[ar.edge];
    int k2 = ar.route[ar.edge + 1];
    ar.cur_src = k;
    ar.cur_dst = k2;
    ar.t_edge_start = t;
    ar.t_exit.reset();
    ar.nu = 0.0;
    ar.switch_done = false;
    ar.phase = Phase::Transfer1;
    ar.ctx1.target = ar.ctx2.target =
        s.regions[static_cast<std::size_t>(k2)].center;
    ar.ctx1.undesired.clear();
    ar.ctx2.undesired.clear();
    ar.avoid.clear();
    for (int r = 0; r < num_regions; ++r) {
      if (r != k && r != k2) {
        ar.ctx1.undesired.push_back(s.regions[static_cast<std::size_t>(r)]);
        ar.avoid.push_back(r);
      }
      if (r != k2)
        ar.ctx2.undesired.push_back(s.regions[static_cast<std::size_t>(r)]);
    }
    emit({EventType::TransitionStarted, t, static_cast<int>(i), k, k2});
  };

  // Phase bookkeeping for one agent at a sample.  Loops so that a finished
  // dwell immediately starts the next edge and an already-satisfied edge
  // (self-loop) arrives at the same sample.
  auto process_agent = [&](std::size_t i, double t) {
    AgentRun& ar = runs[i];
    const world::AgentSpec& spec = s.agents[i];
    while (true) {
      if (ar.phase == Phase::Done) break;
      if (ar.phase == Phase::Dwell) {
        if (t < ar.dwell_until) break;
        arm_edge(i, t);
        continue;
      }
      int k = ar.route[ar.edge];
      int k2 = ar.route[ar.edge + 1];
      // Exit means the agent's ball no longer touches the source region's
      // ball at all, not merely that it lost full containment.
      if (ar.phase == Phase::Transfer1 &&
          world::spheres_disjoint(
              pos[i], spec.radius,
              s.regions[static_cast<std::size_t>(k)].center,
              s.regions[static_cast<std::size_t>(k)].radius)) {
        ar.t_exit = t;
        ar.nu = std::max(0.1 * (t - ar.t_edge_start), s.sim.dt);
        ar.phase = Phase::Transfer2;
        emit({EventType::RegionExited, t, static_cast<int>(i), -1, -1, k});
      }
      if (ar.phase == Phase::Transfer2 && !ar.switch_done &&
          t >= *ar.t_exit + ar.nu) {
        ar.switch_done = true;
        Event e{EventType::SwitchComplete, t, static_cast<int>(i)};
        e.value = ar.nu;
        emit(e);
      }
      // A real transfer arrives only after it has exited the source;
      // self-loop edges complete the moment the agent is (still) inside.
      if ((k == k2 || ar.phase == Phase::Transfer2) &&
          world::in_region(pos[i], spec.radius,
                           s.regions[static_cast<std::size_t>(k2)])) {
        emit({EventType::Arrived, t, static_cast<int>(i), -1, -1, k2});
        EdgeRecord rec;
        rec.src = k;
        rec.dst = k2;
        rec.t_start = ar.t_edge_start;
        rec.t_exit = ar.t_exit;
        if (ar.t_exit) rec.t_switch = *ar.t_exit + ar.nu;
        rec.t_arrive = t;
        rec.early = ar.t_exit && t - *ar.t_exit <= ar.nu;
        ar.recs.push_back(rec);
        ++ar.edge;
        if (ar.edge + 1 >= ar.route.size()) {
          ar.phase = Phase::Done;
          ar.cur_src = ar.cur_dst = -1;
          ar.avoid.clear();
          break;
        }
        ar.phase = Phase::Dwell;
        ar.dwell_until = t + s.sim.dwell;
        continue;
      }
      break;
    }
  };

  // Controls for the whole team from positions `q` at time t; the commanded
  // value is clamped per axis, so integration never sees an unclamped field.
  auto team_controls = [&](double t, const std::vector<Vec3>& q,
                           std::vector<Vec3>& out) {
    for (std::size_t i = 0; i < n; ++i) {
      AgentRun& ar = runs[i];
      if (ar.phase == Phase::Done) {
        out[i] = {};
        continue;
      }
      ar.ctx1.neighbors.clear();
      for (std::size_t j = 0; j < n; ++j)
        if (j != i) ar.ctx1.neighbors.push_back({q[j], s.agents[j].radius});
      ar.ctx2.neighbors = ar.ctx1.neighbors;
      out[i] = clamp_axes(control_of(ar, t, q[i]), s.sim.clamp);
    }
  };

  std::vector<Vec3> u(n), k2(n), k3(n), k4(n), scratch(n);
  const double dt = s.sim.dt;
  long step = 0;
  double t = 0.0;
  RunStatus status = RunStatus::Completed;

  while (true) {
    t = static_cast<double>(step) * dt;
    for (std::size_t i = 0; i < n; ++i) process_agent(i, t);

    bool violated = false;
    try {
      team_controls(t, pos, u);
    } catch (const nav::FieldError& e) {
      status = RunStatus::FieldError;
      res.error = e.what();
      break;
    }

    // safety monitors; events precede the sample they belong to
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j) {
        double c = dist(pos[i], pos[j]) -
                   (s.agents[i].radius + s.agents[j].radius);
        res.safety.min_agent_clearance =
            std::min(res.safety.min_agent_clearance, c);
        if (c < 0.0) {
          Event e{EventType::CollisionViolation, t, static_cast<int>(i)};
          e.other = static_cast<int>(j);
          e.value = c;
          emit(e);
          ++res.safety.violations;
          violated = true;
        }
      }
    for (std::size_t i = 0; i < n; ++i) {
      const world::AgentSpec& spec = s.agents[i];
      double margin = s.workspace.radius -
                      (dist(pos[i], s.workspace.center) + spec.radius);
      res.safety.min_workspace_margin =
          std::min(res.safety.min_workspace_margin, margin);
      if (margin < 0.0) {
        Event e{EventType::RegionViolation, t, static_cast<int>(i)};
        e.region = -1;
        e.value = margin;
        emit(e);
        ++res.safety.violations;
        violated = true;
      }
      for (int r : runs[i].avoid) {
        const world::Region& reg = s.regions[static_cast<std::size_t>(r)];
        double c = dist(pos[i], reg.center) - (spec.radius + reg.radius);
        res.safety.min_region_clearance =
            std::min(res.safety.min_region_clearance, c);
        if (c < 0.0) {
          Event e{EventType::RegionViolation, t, static_cast<int>(i)};
          e.region = r;
          e.value = c;
          emit(e);
          ++res.safety.violations;
          violated = true;
        }
      }
      // collapsed containment trace for conformance
      for (int r = 0; r < num_regions; ++r)
        if (world::in_region(pos[i], spec.radius,
                             s.regions[static_cast<std::size_t>(r)])) {
          if (runs[i].visited.empty() || runs[i].visited.back() != r)
            runs[i].visited.push_back(r);
          break;
        }
    }

    for (std::size_t i = 0; i < n; ++i) {
      res.max_abs_control = std::max(
          {res.max_abs_control, std::abs(u[i].x), std::abs(u[i].y),
           std::abs(u[i].z)});
    }
    if (observer) {
      Sample smp;
      smp.t = t;
      smp.step = step;
      smp.agents.resize(n);
      for (std::size_t i = 0; i < n; ++i)
        smp.agents[i] = {pos[i], u[i], runs[i].cur_src, runs[i].cur_dst,
                         runs[i].phase};
      observer->on_sample(smp);
    }

    if (violated) {
      status = RunStatus::SafetyViolation;
      break;
    }
    bool all_done = true;
    for (const AgentRun& ar : runs)
      if (ar.phase != Phase::Done) all_done = false;
    if (all_done) {
      status = RunStatus::Completed;
      break;
    }
    if (step >= s.sim.max_steps) {
      status = RunStatus::StepBudgetExhausted;
      break;
    }

    // classic RK4 with per-stage control re-evaluation; the phase structure
    // stays frozen for the step, only time and positions move
    try {
      for (std::size_t i = 0; i < n; ++i)
        scratch[i] = pos[i] + (dt / 2) * u[i];
      team_controls(t + dt / 2, scratch, k2);
      for (std::size_t i = 0; i < n; ++i)
        scratch[i] = pos[i] + (dt / 2) * k2[i];
      team_controls(t + dt / 2, scratch, k3);
      for (std::size_t i = 0; i < n; ++i) scratch[i] = pos[i] + dt * k3[i];
      team_controls(t + dt, scratch, k4);
    } catch (const nav::FieldError& e) {
      status = RunStatus::FieldError;
      res.error = e.what();
      break;
    }
    for (std::size_t i = 0; i < n; ++i)
      pos[i] += (dt / 6) * (u[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    ++step;
  }

  res.status = status;
  res.t_end = t;
  res.steps = step;
  for (std::size_t i = 0; i < n; ++i) {
    AgentRun& ar = runs[i];
    AgentResult& ag = res.agents[i];
    ag.name = s.agents[i].name;
    ag.completed = ar.phase == Phase::Done;
    // an edge cut short by the end of the run still gets a (partial) record
    if (ar.phase == Phase::Transfer1 || ar.phase == Phase::Transfer2) {
      EdgeRecord rec;
      rec.src = ar.route[ar.edge];
      rec.dst = ar.route[ar.edge + 1];
      rec.t_start = ar.t_edge_start;
      rec.t_exit = ar.t_exit;
      if (ar.t_exit) rec.t_switch = *ar.t_exit + ar.nu;
      ar.recs.push_back(rec);
    }
    ag.edges = std::move(ar.recs);
    ag.visited = ar.visited;
    std::vector<int> croute;
    for (int r : ar.route)
      if (croute.empty() || croute.back() != r) croute.push_back(r);
    bool prefix =
        ar.visited.size() <= croute.size() &&
        std::equal(ar.visited.begin(), ar.visited.end(), croute.begin());
    ag.conformant =
        ag.completed ? (prefix && ar.visited.size() == croute.size()) : prefix;
  }
  return res;
}

namespace {

nlohmann::json opt_json(const std::optional<double>& v) {
  if (!v) return nullptr;
  return *v;
}

nlohmann::json finite_json(double v) {
  if (!std::isfinite(v)) return nullptr;
  return v;
}

}  // namespace

std::string verdict_json(const world::Scenario& s, const RunResult& r) {
  nlohmann::json j;
  j["status"] = status_name(r.status);
  j["t_end"] = r.t_end;
  j["steps"] = r.steps;
  if (!r.error.empty()) j["error"] = r.error;
  j["max_abs_control"] = r.max_abs_control;
  j["safety"] = {
      {"min_agent_clearance", finite_json(r.safety.min_agent_clearance)},
      {"min_region_clearance", finite_json(r.safety.min_region_clearance)},
      {"min_workspace_margin", finite_json(r.safety.min_workspace_margin)},
      {"violations", r.safety.violations},
  };
  nlohmann::json agents = nlohmann::json::array();
  for (const AgentResult& a : r.agents) {
    nlohmann::json edges = nlohmann::json::array();
    for (const EdgeRecord& e : a.edges)
      edges.push_back({
          {"src", s.regions[static_cast<std::size_t>(e.src)].name},
          {"dst", s.regions[static_cast<std::size_t>(e.dst)].name},
          {"t_start", e.t_start},
          {"t_exit", opt_json(e.t_exit)},
          {"t_switch", opt_json(e.t_switch)},
          {"t_arrive", opt_json(e.t_arrive)},
          {"early", e.early},
      });
    nlohmann::json visited = nlohmann::json::array();
    for (int v : a.visited)
      visited.push_back(s.regions[static_cast<std::size_t>(v)].name);
    agents.push_back({
        {"id", a.name},
        {"completed", a.completed},
        {"conformant", a.conformant},
        {"visited", visited},
        {"edges", edges},
    });
  }
  j["agents"] = agents;
  return j.dump(2) + "\n";
}

CsvWriter::CsvWriter(std::ostream& out, const world::Scenario& s)
    : out_(out), scenario_(s) {
  out_ << "t,agent,x,y,z,ux,uy,uz,edge_src,edge_dst,phase\n";
}

void CsvWriter::on_sample(const Sample& sample) {
  const bool planar = scenario_.workspace.dim == 2;
  std::string row;
  char buf[64];
  auto put = [&](double v) {
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    row.append(buf, static_cast<std::size_t>(ptr - buf));
  };
  for (std::size_t i = 0; i < sample.agents.size(); ++i) {
    const AgentSample& a = sample.agents[i];
    row.clear();
    put(sample.t);
    row += ',';
    row += scenario_.agents[i].name;
    row += ',';
    put(a.position.x);
    row += ',';
    put(a.position.y);
    row += ',';
    if (!planar) put(a.position.z);
    row += ',';
    put(a.control.x);
    row += ',';
    put(a.control.y);
    row += ',';
    if (!planar) put(a.control.z);
    row += ',';
    if (a.edge_src >= 0)
      row += scenario_.regions[static_cast<std::size_t>(a.edge_src)].name;
    row += ',';
    if (a.edge_dst >= 0)
      row += scenario_.regions[static_cast<std::size_t>(a.edge_dst)].name;
    row += ',';
    row += phase_name(a.phase);
    row += '\n';
    out_ << row;
  }
}

JsonlWriter::JsonlWriter(std::ostream& out, const world::Scenario& s)
    : out_(out), scenario_(s) {}

void JsonlWriter::on_event(const Event& e) {
  nlohmann::json j;
  j["t"] = e.t;
  j["type"] = event_name(e.type);
  j["agent"] = scenario_.agents[static_cast<std::size_t>(e.agent)].name;
  switch (e.type) {
    case EventType::TransitionStarted:
      j["from"] = scenario_.regions[static_cast<std::size_t>(e.edge_src)].name;
      j["to"] = scenario_.regions[static_cast<std::size_t>(e.edge_dst)].name;
      break;
    case EventType::RegionExited:
    case EventType::Arrived:
      j["region"] = scenario_.regions[static_cast<std::size_t>(e.region)].name;
      break;
    case EventType::SwitchComplete:
      j["blend"] = e.value;
      break;
    case EventType::CollisionViolation:
      j["other"] = scenario_.agents[static_cast<std::size_t>(e.other)].name;
      j["clearance"] = e.value;
      break;
    case EventType::RegionViolation:
      j["region"] =
          e.region < 0
              ? "workspace"
              : scenario_.regions[static_cast<std::size_t>(e.region)].name;
      j["clearance"] = e.value;
      break;
  }
  out_ << j.dump() << '\n';
}

}  // namespace ltlnav::sim
