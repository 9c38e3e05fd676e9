#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "ltlnav/vec.hpp"

namespace ltlnav::world {

// Spherical workspace centered at p0. `dim` is 2 or 3 and only affects
// input/output conventions (planar scenarios keep z = 0 internally).
struct Workspace {
  int dim = 3;
  Vec3 center;
  double radius = 0.0;
};

// Spherical region of interest.
struct Region {
  std::string name;
  Vec3 center;
  double radius = 0.0;
};

// Collision-avoidance booster term configuration. A ceiling X <= 0 selects
// the default, derived from the team geometry at load time.
struct FTermConfig {
  bool enabled = true;
  double eps0 = 0.1;
  double X = 0.0;
};

struct AgentSpec {
  std::string name;
  double radius = 0.0;   // bounding sphere
  double sensing = 0.0;  // neighbor sensing range; must exceed 2 * radius
  Vec3 start;
  std::string formula;
  // region name -> atomic propositions observed there (this agent's view)
  std::map<std::string, std::vector<std::string>> labels;
  double kg = 1.0;
  double lambda = 2.0;
  FTermConfig fterm;
};

struct SimConfig {
  double dt = 0.01;
  int max_cycles = 2;
  double dwell = 0.0;                // minimum stay on a self-transition
  std::optional<double> clamp;       // per-axis |u| bound, off when absent
  long max_steps = 1'000'000;
  std::uint64_t seed = 0;            // consumed by sampling tools only
};

struct Scenario {
  Workspace workspace;
  std::vector<Region> regions;
  std::vector<AgentSpec> agents;
  SimConfig sim;

  // index into `regions`, or -1 when the name is unknown
  int region_index(const std::string& name) const;
};

// Structural problems that make a scenario unusable: malformed JSON, missing
// or mistyped fields, nonpositive radii or dt, a region that cannot fit into
// the workspace at all, sensing ranges below the agent diameter, labels
// naming unknown regions, duplicate names.
struct ScenarioError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

Scenario parse_scenario(const std::string& json_text);
Scenario load_scenario(const std::string& path);

// Soft placement diagnostics; the scenario still loads and runs. Covers
// region containment in the workspace, the pairwise region separation
// d(c_k, c_k') > 4 max r, the boundary margin d(c_k, p0) < r0 - 3 r_k, agent
// start placement and pairwise overlap, and agents too big for a region they
// reference in labels.
struct Finding {
  std::string what;
};
std::vector<Finding> validate(const Scenario& s);

// The agent bounding sphere lies inside the region (closed condition:
// boundary contact counts as inside).
bool in_region(const Vec3& p, double agent_radius, const Region& r);

// Strictly positive gap between two spheres.
bool spheres_disjoint(const Vec3& a, double ra, const Vec3& b, double rb);

// Default booster ceiling for an agent: 0.1 * (d_s^2 - (2 max_r)^2)^(N-1)
// where max_r is the largest bounding radius in the team of N agents.
double default_fterm_ceiling(double sensing, double max_agent_radius,
                             int team_size);

}  // namespace ltlnav::world
