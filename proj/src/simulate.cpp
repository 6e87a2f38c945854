#include "govo/simulate.hpp"

#include <cassert>
#include <cmath>

#include "govo/rng.hpp"

namespace govo {

Canvas generate_canvas(int n, double extent_x, double extent_y, std::uint64_t seed) {
  assert(n > 0);
  Canvas canvas;
  canvas.extent_x = extent_x;
  canvas.extent_y = extent_y;
  canvas.seed = seed;
  canvas.points.reserve(n);
  SplitMix64 rng(mix_seed(seed, 0));
  for (int i = 0; i < n; ++i) {
    const double x = rng.uniform(-0.5 * extent_x, 0.5 * extent_x);
    const double y = rng.uniform(-0.5 * extent_y, 0.5 * extent_y);
    canvas.points.emplace_back(x, y);
  }
  return canvas;
}

std::vector<Pose2D> trajectory_poses(const TrajectorySpec& spec) {
  assert(spec.semi_a >= spec.semi_b && spec.semi_b > 0.0);
  const int n = spec.frames();
  std::vector<Pose2D> poses;
  poses.reserve(n);
  for (int k = 0; k < n; ++k) {
    const double tau = double(k) * spec.step_deg * kPi / 180.0;
    Pose2D pose;
    pose.x = spec.semi_a * std::cos(tau);
    pose.y = spec.semi_b * std::sin(tau);
    pose.heading = normalize_angle(std::atan2(spec.semi_b * std::cos(tau),
                                              -spec.semi_a * std::sin(tau)));
    poses.push_back(pose);
  }
  return poses;
}

Observation observe(const Canvas& canvas, const Pose2D& pose, int frame,
                    const CameraModel& cam, double noise_half_width, std::uint64_t seed) {
  Observation obs;
  obs.frame = frame;
  obs.pose = pose;

  const double s = cam.scale();
  const double sh = std::sin(pose.heading);
  const double ch = std::cos(pose.heading);
  const double margin = noise_half_width;
  const double u_lo = margin, u_hi = double(cam.image_width) - margin;
  const double v_lo = margin, v_hi = double(cam.image_height) - margin;

  SplitMix64 rng(mix_seed(seed, std::uint64_t(frame) + 1));
  for (int id = 0; id < int(canvas.points.size()); ++id) {
    const double dx = canvas.points[id].x() - pose.x;
    const double dy = canvas.points[id].y() - pose.y;
    // Camera axes: x right of travel, y backwards, z into the ground.
    const double cam_x = -sh * dx + ch * dy;
    const double cam_y = -ch * dx - sh * dy;
    const double u = s * cam_x + cam.principal_u;
    const double v = s * cam_y + cam.principal_v;
    if (u < u_lo || u > u_hi || v < v_lo || v > v_hi) continue;
    const double nu = noise_half_width > 0.0 ? rng.uniform(-noise_half_width, noise_half_width) : 0.0;
    const double nv = noise_half_width > 0.0 ? rng.uniform(-noise_half_width, noise_half_width) : 0.0;
    obs.ids.push_back(id);
    obs.pixels.emplace_back(u + nu, v + nv);
  }
  return obs;
}

GroundTruthMotion ground_truth_motion(const Pose2D& a, const Pose2D& b) {
  GroundTruthMotion gt;
  gt.motion.phi = 0.5 * normalize_angle(b.heading - a.heading);
  const double dx = b.x - a.x;
  const double dy = b.y - a.y;
  gt.motion.rho = std::hypot(dx, dy);
  if (gt.motion.rho > 0.0) {
    gt.residual = std::abs(normalize_angle(std::atan2(dy, dx) - (a.heading + gt.motion.phi)));
  }
  return gt;
}

}  // namespace govo
