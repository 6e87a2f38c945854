#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "govo/geometry.hpp"

namespace govo {

// Planar feature canvas: points sampled uniformly over a centred rectangle.
struct Canvas {
  std::vector<Eigen::Vector2d> points;  // world metres
  double extent_x = 4.0;
  double extent_y = 4.0;
  std::uint64_t seed = 0;
};

Canvas generate_canvas(int n, double extent_x, double extent_y, std::uint64_t seed);

enum class TrajectoryKind { circular, elliptical };

struct TrajectorySpec {
  TrajectoryKind kind = TrajectoryKind::circular;
  double semi_a = 1.0;    // metres, semi_a >= semi_b > 0
  double semi_b = 1.0;
  double step_deg = 10.0; // parameter-angle step between frames

  int frames() const { return int(std::lround(360.0 / step_deg)); }
  double eccentricity() const { return std::sqrt(1.0 - (semi_b * semi_b) / (semi_a * semi_a)); }
};

// Poses at equal parameter-angle steps along the curve, heading along the
// direction of travel (the camera y axis trails backwards along the
// tangent). Circles keep the stepping exactly arc-uniform.
std::vector<Pose2D> trajectory_poses(const TrajectorySpec& spec);

// One frame of virtual feature measurements.
struct Observation {
  int frame = 0;
  std::vector<int> ids;  // canvas point ids, parallel to pixels
  PointSet pixels;
  Pose2D pose;
};

// Projects the canvas through the downward pinhole at the pose, keeps
// points at least noise_half_width inside the image border (so the noisy
// measurement always stays in bounds), then adds independent uniform noise
// in [-noise_half_width, +noise_half_width] per coordinate. The per-frame
// noise stream is derived from (seed, frame), so frames can be generated
// in any order or in parallel.
Observation observe(const Canvas& canvas, const Pose2D& pose, int frame,
                    const CameraModel& cam, double noise_half_width, std::uint64_t seed);

struct GroundTruthMotion {
  MotionParams motion;
  // Angle between the actual chord direction and the direction the arc
  // model predicts; zero on circular arcs, grows with trajectory
  // eccentricity and step size.
  double residual = 0.0;
};

GroundTruthMotion ground_truth_motion(const Pose2D& a, const Pose2D& b);

}  // namespace govo
