#include "govo/baseline.hpp"

#include <cmath>
#include <stdexcept>

#include "govo/rng.hpp"

namespace govo {

OneMatchMotion motion_from_one_match(const Eigen::Vector2d& p1, const Eigen::Vector2d& p2,
                                     const CameraModel& cam) {
  const double x1c = p1.x() - cam.principal_u;
  const double y1c = p1.y() - cam.principal_v;
  const double x2c = p2.x() - cam.principal_u;
  const double y2c = p2.y() - cam.principal_v;

  const double num = x2c - x1c;
  const double den = y1c + y2c;
  if (num == 0.0 && den == 0.0) return {OneMatchStatus::degenerate, {}};

  double phi = std::atan2(num, den);
  const double c2 = std::cos(2.0 * phi);
  const double s2 = std::sin(2.0 * phi);
  // rx = s*rho*sin(phi), ry = -s*rho*cos(phi)
  const double rx = x1c - x2c * c2 + y2c * s2;
  const double ry = y1c - x2c * s2 - y2c * c2;
  double rho = (std::sin(phi) * rx - std::cos(phi) * ry) / cam.scale();
  if (rho < 0.0) {
    // The pi-shifted branch; cos(2*phi) and sin(2*phi) are unchanged there,
    // so only phi and the sign of rho flip.
    phi = phi > 0.0 ? phi - kPi : phi + kPi;
    rho = -rho;
  }
  if (std::abs(phi) > kPi / 2.0) return {OneMatchStatus::backwards, {}};
  return {OneMatchStatus::ok, {phi, rho}};
}

Estimate one_point_ransac(const MatchSet& matches, const CameraModel& cam, double epsilon,
                          int max_iters, std::uint64_t seed) {
  if (matches.empty()) throw std::invalid_argument("no matches");

  const int n = int(matches.size());
  const double eps2 = epsilon * epsilon;
  SplitMix64 rng(seed);

  int best_count = -1;
  MotionParams best_motion;
  for (int it = 0; it < max_iters; ++it) {
    const int k = int(rng.next_below(std::uint64_t(n)));
    const OneMatchMotion h = motion_from_one_match(matches.first[k], matches.second[k], cam);
    if (!h) continue;

    int count = 0;
    for (int i = 0; i < n; ++i) {
      const Eigen::Vector2d t = transfer_point(matches.second[i], h.motion, cam);
      if ((matches.first[i] - t).squaredNorm() < eps2) ++count;
    }
    if (count > best_count) {
      best_count = count;
      best_motion = h.motion;
    }
  }
  if (best_count < 0) throw std::runtime_error("no valid hypothesis");

  Estimate est;
  est.raw_motion = best_motion;
  est.objective_value = best_count;
  for (int i = 0; i < n; ++i) {
    const Eigen::Vector2d t = transfer_point(matches.second[i], best_motion, cam);
    if ((matches.first[i] - t).squaredNorm() < eps2) est.correspondences.emplace_back(i, i);
  }
  const RefineResult rr =
      refine(est.correspondences, best_motion, cam, matches.first, matches.second);
  est.motion = rr.motion;
  est.degenerate = est.correspondences.empty();
  return est;
}

}  // namespace govo
