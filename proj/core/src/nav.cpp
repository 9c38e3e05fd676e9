#include "ltlnav/nav.hpp"

#include <algorithm>
#include <cmath>

namespace ltlnav::nav {

double goal_term(const FieldContext& c, const Vec3& p) {
  return dist2(p, c.target);
}

double neighbor_term(const FieldContext& c, const Vec3& p, const Neighbor& n) {
  double d2 = dist2(p, n.position);
  double rsum = c.agent_radius + n.radius;
  double s2 = c.sensing * c.sensing;
  // out-of-range neighbors contribute a constant plateau, so far-away motion
  // is unaffected; the boundary itself (d == sensing) still counts as seen
  return (d2 <= s2 ? d2 : s2) - rsum * rsum;
}

double proximity_product(const FieldContext& c, const Vec3& p) {
  double g = 1.0;
  for (const Neighbor& n : c.neighbors) g *= neighbor_term(c, p, n);
  return g;
}

double obstacle_term(const FieldContext& c, const Vec3& p) {
  double rin = c.workspace_radius - c.agent_radius;
  double a = rin * rin - dist2(p, c.workspace_center);
  for (const world::Region& r : c.undesired) {
    double rsum = c.agent_radius + r.radius;
    a *= dist2(p, r.center) - rsum * rsum;
  }
  return a;
}

double booster(const FieldContext& c, double G) {
  if (!c.f_enabled || G >= c.fceiling) return 0.0;
  double t = 1.0 - G / c.fceiling;
  return c.eps0 * t * t * t;
}

double booster_slope(const FieldContext& c, double G) {
  if (!c.f_enabled || G >= c.fceiling) return 0.0;
  double t = 1.0 - G / c.fceiling;
  return -3.0 * c.eps0 / c.fceiling * t * t;
}

namespace {

constexpr double kDegenerate = 1e-12;

[[noreturn]] void degenerate() {
  throw FieldError(
      "degenerate navigation field: goal and obstacle terms vanish together");
}

}  // namespace

double potential(const FieldContext& c, const Vec3& p) {
  double gamma = goal_term(c, p);
  double G = proximity_product(c, p);
  double alpha = obstacle_term(c, p);
  double denom = std::pow(gamma, c.lambda) + G * alpha;
  if (denom <= kDegenerate) degenerate();
  return (gamma + booster(c, G)) / std::pow(denom, 1.0 / c.lambda);
}

Vec3 gradient(const FieldContext& c, const Vec3& p) {
  double gamma = goal_term(c, p);
  Vec3 dgamma = 2.0 * (p - c.target);

  // G and its gradient; only neighbors inside the sensing range contribute
  // slope, the plateau part is constant
  double G = 1.0;
  std::size_t nn = c.neighbors.size();
  std::vector<double> beta(nn);
  for (std::size_t j = 0; j < nn; ++j) {
    beta[j] = neighbor_term(c, p, c.neighbors[j]);
    G *= beta[j];
  }
  Vec3 dG;
  double s2 = c.sensing * c.sensing;
  for (std::size_t j = 0; j < nn; ++j) {
    const Neighbor& n = c.neighbors[j];
    if (dist2(p, n.position) > s2) continue;
    double rest = 1.0;
    for (std::size_t l = 0; l < nn; ++l)
      if (l != j) rest *= beta[l];
    dG += rest * 2.0 * (p - n.position);
  }

  // alpha and its gradient via products-except-one
  double rin = c.workspace_radius - c.agent_radius;
  std::size_t nu = c.undesired.size();
  std::vector<double> factor(nu + 1);
  std::vector<Vec3> dfactor(nu + 1);
  factor[0] = rin * rin - dist2(p, c.workspace_center);
  dfactor[0] = -2.0 * (p - c.workspace_center);
  for (std::size_t m = 0; m < nu; ++m) {
    const world::Region& r = c.undesired[m];
    double rsum = c.agent_radius + r.radius;
    factor[m + 1] = dist2(p, r.center) - rsum * rsum;
    dfactor[m + 1] = 2.0 * (p - r.center);
  }
  double alpha = 1.0;
  for (double f : factor) alpha *= f;
  Vec3 dalpha;
  for (std::size_t m = 0; m < factor.size(); ++m) {
    double rest = 1.0;
    for (std::size_t l = 0; l < factor.size(); ++l)
      if (l != m) rest *= factor[l];
    dalpha += rest * dfactor[m];
  }

  double denom = std::pow(gamma, c.lambda) + G * alpha;
  if (denom <= kDegenerate) degenerate();

  double f = booster(c, G);
  double fs = booster_slope(c, G);
  Vec3 dDenom =
      c.lambda * std::pow(gamma, c.lambda - 1.0) * dgamma + alpha * dG + G * dalpha;
  Vec3 num = dgamma + fs * dG - (gamma + f) / (c.lambda * denom) * dDenom;
  return std::pow(denom, -1.0 / c.lambda) * num;
}

Vec3 control(const FieldContext& c, const Vec3& p) {
  return -c.kg * gradient(c, p);
}

double switch_blend(double x) {
  double sat = std::clamp(2.0 * x - 1.0, -1.0, 1.0);
  return 0.5 * (sat + 1.0);
}

}  // namespace ltlnav::nav
