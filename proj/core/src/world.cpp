#include "ltlnav/world.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"

namespace ltlnav::world {

using nlohmann::json;

int Scenario::region_index(const std::string& name) const {
  for (std::size_t i = 0; i < regions.size(); ++i)
    if (regions[i].name == name) return static_cast<int>(i);
  return -1;
}

double default_fterm_ceiling(double sensing, double max_agent_radius,
                             int team_size) {
  double plateau = sensing * sensing - 4.0 * max_agent_radius * max_agent_radius;
  return 0.1 * std::pow(plateau, team_size - 1);
}

namespace {

[[noreturn]] void fail(const std::string& msg) { throw ScenarioError(msg); }

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

Vec3 read_point(const json& j, int dim, const std::string& what) {
  if (!j.is_array() || static_cast<int>(j.size()) != dim)
    fail(what + ": expected an array of " + std::to_string(dim) + " numbers");
  for (const auto& c : j)
    if (!c.is_number()) fail(what + ": expected numeric coordinates");
  Vec3 p;
  p.x = j[0].get<double>();
  p.y = j[1].get<double>();
  if (dim == 3) p.z = j[2].get<double>();
  return p;
}

const json& require(const json& j, const char* key, const std::string& what) {
  auto it = j.find(key);
  if (it == j.end()) fail(what + ": missing required field '" + key + "'");
  return *it;
}

double require_number(const json& j, const char* key, const std::string& what) {
  const json& v = require(j, key, what);
  if (!v.is_number()) fail(what + ": field '" + key + "' must be a number");
  return v.get<double>();
}

std::string require_string(const json& j, const char* key,
                           const std::string& what) {
  const json& v = require(j, key, what);
  if (!v.is_string()) fail(what + ": field '" + key + "' must be a string");
  return v.get<std::string>();
}

}  // namespace

Scenario parse_scenario(const std::string& text) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::exception& e) {
    fail(std::string("scenario is not valid JSON: ") + e.what());
  }
  if (!root.is_object()) fail("scenario: top level must be an object");

  Scenario s;

  // workspace
  const json& jw = require(root, "workspace", "scenario");
  {
    const json& jd = require(jw, "dim", "workspace");
    if (!jd.is_number_integer()) fail("workspace: 'dim' must be an integer");
    s.workspace.dim = jd.get<int>();
    if (s.workspace.dim != 2 && s.workspace.dim != 3)
      fail("workspace: 'dim' must be 2 or 3");
    s.workspace.center =
        read_point(require(jw, "center", "workspace"), s.workspace.dim,
                   "workspace center");
    s.workspace.radius = require_number(jw, "radius", "workspace");
    if (s.workspace.radius <= 0) fail("workspace: radius must be positive");
  }
  const int dim = s.workspace.dim;

  // regions
  const json& jregions = require(root, "regions", "scenario");
  if (!jregions.is_array() || jregions.empty())
    fail("scenario: 'regions' must be a nonempty array");
  std::set<std::string> region_names;
  for (const json& jr : jregions) {
    Region r;
    r.name = require_string(jr, "id", "region");
    if (r.name.empty()) fail("region: 'id' must be nonempty");
    if (!region_names.insert(r.name).second)
      fail("region '" + r.name + "': duplicate id");
    r.center = read_point(require(jr, "center", "region '" + r.name + "'"),
                          dim, "region '" + r.name + "' center");
    r.radius = require_number(jr, "radius", "region '" + r.name + "'");
    if (r.radius <= 0) fail("region '" + r.name + "': radius must be positive");
    if (r.radius >= s.workspace.radius)
      fail("region '" + r.name + "': radius " + fmt(r.radius) +
           " does not fit into the workspace (radius " +
           fmt(s.workspace.radius) + ")");
    s.regions.push_back(std::move(r));
  }

  // agents
  const json& jagents = require(root, "agents", "scenario");
  if (!jagents.is_array() || jagents.empty())
    fail("scenario: 'agents' must be a nonempty array");
  std::set<std::string> agent_names;
  for (const json& ja : jagents) {
    AgentSpec a;
    a.name = require_string(ja, "id", "agent");
    if (a.name.empty()) fail("agent: 'id' must be nonempty");
    if (!agent_names.insert(a.name).second)
      fail("agent '" + a.name + "': duplicate id");
    const std::string who = "agent '" + a.name + "'";
    a.radius = require_number(ja, "radius", who);
    if (a.radius <= 0) fail(who + ": radius must be positive");
    a.sensing = require_number(ja, "sensing", who);
    if (a.sensing <= 2 * a.radius)
      fail(who + ": sensing range " + fmt(a.sensing) +
           " must exceed the agent diameter " + fmt(2 * a.radius));
    a.start = read_point(require(ja, "start", who), dim, who + " start");
    a.formula = require_string(ja, "formula", who);
    if (auto it = ja.find("labels"); it != ja.end()) {
      if (!it->is_object()) fail(who + ": 'labels' must be an object");
      for (const auto& [region, atoms] : it->items()) {
        if (std::find_if(s.regions.begin(), s.regions.end(),
                         [&region](const Region& r) {
                           return r.name == region;
                         }) == s.regions.end())
          fail(who + ": labels reference unknown region '" + region + "'");
        if (!atoms.is_array()) fail(who + ": label atoms must be an array");
        std::set<std::string> dedup;
        for (const auto& atom : atoms) {
          if (!atom.is_string() || atom.get<std::string>().empty())
            fail(who + ": label atoms must be nonempty strings");
          dedup.insert(atom.get<std::string>());
        }
        a.labels[region] = {dedup.begin(), dedup.end()};
      }
    }
    if (auto it = ja.find("gains"); it != ja.end()) {
      a.kg = require_number(*it, "kg", who + " gains");
      a.lambda = require_number(*it, "lambda", who + " gains");
    }
    if (a.kg <= 0) fail(who + ": gain kg must be positive");
    if (a.lambda < 1) fail(who + ": lambda must be at least 1");
    if (auto it = ja.find("fterm"); it != ja.end()) {
      if (auto e = it->find("enabled"); e != it->end()) {
        if (!e->is_boolean()) fail(who + ": fterm.enabled must be a boolean");
        a.fterm.enabled = e->get<bool>();
      }
      if (auto e = it->find("eps0"); e != it->end())
        a.fterm.eps0 = e->get<double>();
      if (auto e = it->find("X"); e != it->end()) a.fterm.X = e->get<double>();
    }
    if (a.fterm.enabled && a.fterm.eps0 <= 0)
      fail(who + ": fterm.eps0 must be positive");
    if (a.fterm.X < 0) fail(who + ": fterm.X must not be negative");
    s.agents.push_back(std::move(a));
  }

  // derive default booster ceilings now that the whole team is known
  double max_r = 0;
  for (const AgentSpec& a : s.agents) max_r = std::max(max_r, a.radius);
  for (AgentSpec& a : s.agents)
    if (a.fterm.X <= 0)
      a.fterm.X = default_fterm_ceiling(a.sensing, max_r,
                                        static_cast<int>(s.agents.size()));

  // sim block (all optional)
  if (auto it = root.find("sim"); it != root.end()) {
    const json& js = *it;
    if (!js.is_object()) fail("scenario: 'sim' must be an object");
    if (auto e = js.find("dt"); e != js.end()) s.sim.dt = e->get<double>();
    if (auto e = js.find("max_cycles"); e != js.end())
      s.sim.max_cycles = e->get<int>();
    if (auto e = js.find("dwell"); e != js.end()) s.sim.dwell = e->get<double>();
    if (auto e = js.find("clamp"); e != js.end())
      s.sim.clamp = e->get<double>();
    if (auto e = js.find("max_steps"); e != js.end())
      s.sim.max_steps = e->get<long>();
    if (auto e = js.find("seed"); e != js.end())
      s.sim.seed = e->get<std::uint64_t>();
    if (s.sim.dt <= 0) fail("sim: dt must be positive");
    if (s.sim.max_cycles < 1) fail("sim: max_cycles must be at least 1");
    if (s.sim.dwell < 0) fail("sim: dwell must not be negative");
    if (s.sim.clamp && *s.sim.clamp <= 0) fail("sim: clamp must be positive");
    if (s.sim.max_steps < 1) fail("sim: max_steps must be at least 1");
  }

  return s;
}

Scenario load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail("cannot open scenario file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_scenario(buf.str());
}

std::vector<Finding> validate(const Scenario& s) {
  std::vector<Finding> out;
  auto report = [&out](std::string msg) { out.push_back({std::move(msg)}); };

  const Vec3 p0 = s.workspace.center;
  const double r0 = s.workspace.radius;

  double max_region_r = 0;
  for (const Region& r : s.regions)
    max_region_r = std::max(max_region_r, r.radius);

  for (const Region& r : s.regions) {
    double d = dist(r.center, p0);
    if (d + r.radius > r0)
      report("region '" + r.name + "' pokes out of the workspace: center " +
             fmt(d) + " from p0 plus radius " + fmt(r.radius) + " exceeds " +
             fmt(r0));
    if (d >= r0 - 3 * r.radius)
      report("region '" + r.name + "' too close to the boundary: " + fmt(d) +
             " from p0, needs < " + fmt(r0 - 3 * r.radius) +
             " for a usable approach corridor");
  }
  for (std::size_t i = 0; i < s.regions.size(); ++i)
    for (std::size_t j = i + 1; j < s.regions.size(); ++j) {
      double d = dist(s.regions[i].center, s.regions[j].center);
      if (d <= 4 * max_region_r)
        report("regions '" + s.regions[i].name + "' and '" +
               s.regions[j].name + "' too close: " + fmt(d) +
               " apart, need > " + fmt(4 * max_region_r));
    }

  for (const AgentSpec& a : s.agents) {
    double d = dist(a.start, p0);
    if (d + a.radius > r0)
      report("agent '" + a.name + "' starts outside the workspace");
    for (const auto& [region, atoms] : a.labels) {
      int idx = s.region_index(region);
      if (idx >= 0 && a.radius >= s.regions[static_cast<std::size_t>(idx)].radius)
        report("agent '" + a.name + "' (radius " + fmt(a.radius) +
               ") cannot fit inside region '" + region + "' (radius " +
               fmt(s.regions[static_cast<std::size_t>(idx)].radius) + ")");
    }
  }
  for (std::size_t i = 0; i < s.agents.size(); ++i)
    for (std::size_t j = i + 1; j < s.agents.size(); ++j) {
      const AgentSpec &a = s.agents[i], &b = s.agents[j];
      if (!spheres_disjoint(a.start, a.radius, b.start, b.radius))
        report("agents '" + a.name + "' and '" + b.name +
               "' overlap at their start positions");
    }

  return out;
}

bool in_region(const Vec3& p, double agent_radius, const Region& r) {
  double rr = r.radius - agent_radius;
  if (rr < 0) return false;
  return dist2(p, r.center) <= rr * rr;
}

bool spheres_disjoint(const Vec3& a, double ra, const Vec3& b, double rb) {
  double sum = ra + rb;
  return dist2(a, b) > sum * sum;
}

}  // namespace ltlnav::world
