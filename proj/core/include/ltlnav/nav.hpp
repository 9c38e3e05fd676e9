#pragma once

#include <stdexcept>
#include <vector>

#include "ltlnav/vec.hpp"
#include "ltlnav/world.hpp"

namespace ltlnav::nav {

// A teammate as the field sees it: where it is right now and how big it is.
struct Neighbor {
  Vec3 position;
  double radius = 0.0;
};

// Everything needed to evaluate one agent's potential while it steers toward
// one target region. The undesired set lists the regions this edge must not
// touch; the workspace boundary is always an obstacle.
struct FieldContext {
  Vec3 target;
  double agent_radius = 0.0;
  double sensing = 0.0;
  Vec3 workspace_center;
  double workspace_radius = 0.0;
  std::vector<Neighbor> neighbors;
  std::vector<world::Region> undesired;
  double kg = 1.0;
  double lambda = 2.0;
  bool f_enabled = true;
  double eps0 = 0.1;
  double fceiling = 0.0;  // X; the booster vanishes for proximity above it
};

// The field degenerates only when the goal distance and the obstacle
// clearance vanish together (target touching an obstacle boundary).
struct FieldError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Building blocks, exposed so they can be verified independently.

// squared distance to the target
double goal_term(const FieldContext& c, const Vec3& p);

// one neighbor's proximity factor: squared gap to the collision distance,
// frozen at its sensing-range plateau once the neighbor is out of range
double neighbor_term(const FieldContext& c, const Vec3& p, const Neighbor& n);

// product of all neighbor terms (1 when alone)
double proximity_product(const FieldContext& c, const Vec3& p);

// workspace-boundary factor times the undesired-region factors
double obstacle_term(const FieldContext& c, const Vec3& p);

// collision booster f and its slope: eps0*(1 - G/X)^3 on [0, X], 0 above
double booster(const FieldContext& c, double G);
double booster_slope(const FieldContext& c, double G);

// phi = (gamma + f(G)) / (gamma^lambda + G*alpha)^(1/lambda)
double potential(const FieldContext& c, const Vec3& p);

// exact gradient of `potential`
Vec3 gradient(const FieldContext& c, const Vec3& p);

// commanded velocity: -kg * gradient
Vec3 control(const FieldContext& c, const Vec3& p);

// saturation ramp used when transferring between two fields:
// 0 for x <= 0, x on [0, 1], 1 for x >= 1
double switch_blend(double x);

}  // namespace ltlnav::nav
