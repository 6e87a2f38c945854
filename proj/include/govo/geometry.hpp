#pragma once

#include <Eigen/Core>
#include <cmath>
#include <numbers>
#include <utility>
#include <vector>

namespace govo {

using PointSet = std::vector<Eigen::Vector2d>;

inline constexpr double kPi = std::numbers::pi;

// Wraps an angle to (-pi, pi].
inline double normalize_angle(double a) {
  a = std::remainder(a, 2.0 * kPi);
  if (a <= -kPi) a += 2.0 * kPi;
  return a;
}

// Non-holonomic planar motion between two successive camera frames: the
// vehicle travels along a circular arc, so rotation and translation are
// coupled and the displacement has only two degrees of freedom.
//   phi  half the heading change (right turn positive), radians
//   rho  chord length between the two camera centres, metres (>= 0)
struct MotionParams {
  double phi = 0.0;
  double rho = 0.0;

  double theta() const { return 2.0 * phi; }

  // Arc radius; undefined at phi == 0 (straight motion).
  double turn_radius() const { return rho / (2.0 * std::sin(phi)); }
};

// Downward-facing pinhole camera at a known, fixed height over the ground
// plane. Square pixels, zero skew, undistorted input.
struct CameraModel {
  double focal = 500.0;        // pixels
  double principal_u = 320.0;  // pixels
  double principal_v = 240.0;  // pixels
  double depth = 0.2;          // metres between camera centre and ground
  int image_width = 640;
  int image_height = 480;

  // Pixel displacement per metre of ground-plane displacement.
  double scale() const { return focal / depth; }
};

// Planar world pose. The world plane shares the camera handedness (z axis
// into the ground), so a right turn (phi > 0) increases the heading.
// heading is the direction of forward travel, wrapped to (-pi, pi].
struct Pose2D {
  double x = 0.0;
  double y = 0.0;
  double heading = 0.0;
};

// Ground-plane homography restricted to the 2-DoF arc motion. The matrix is
// Euclidean (last row [0 0 1], orthonormal rotation block), so point
// transfer is affine and needs no projective division.
struct Homography2DoF {
  double h1 = 1.0, h2 = 0.0, h3 = 0.0;
  double h4 = 0.0, h5 = 1.0, h6 = 0.0;
  // Cached trigonometry of the generating motion.
  double cos2phi = 1.0, sin2phi = 0.0;
  double cosphi = 1.0, sinphi = 0.0;

  // Maps a pixel from the second view into the first.
  Eigen::Vector2d apply(const Eigen::Vector2d& p) const {
    return {h1 * p.x() + h2 * p.y() + h3, h4 * p.x() + h5 * p.y() + h6};
  }

  // Inverse map (first view back to the second); uses the transposed
  // rotation block, exact up to rounding.
  Eigen::Vector2d apply_inverse(const Eigen::Vector2d& p) const {
    const double dx = p.x() - h3;
    const double dy = p.y() - h6;
    return {h1 * dx + h4 * dy, h2 * dx + h5 * dy};
  }

  Eigen::Matrix3d matrix() const;
};

// Relative rotation (about the downward z axis, by 2*phi) and translation
// of the second camera frame expressed in the first.
std::pair<Eigen::Matrix3d, Eigen::Vector3d> pose_from_motion(const MotionParams& m);

Homography2DoF homography_from_motion(const MotionParams& m, const CameraModel& cam);

// Transfers a pixel observed in the second view back into the first view.
// Centred evaluation; kept structurally identical to the interval bounds in
// bounds.hpp so degenerate intervals collapse onto this value exactly.
inline Eigen::Vector2d transfer_point(const Eigen::Vector2d& p2, const MotionParams& m,
                                      const CameraModel& cam) {
  const double s = cam.scale();
  const double c2 = std::cos(2.0 * m.phi);
  const double s2 = std::sin(2.0 * m.phi);
  const double cx = p2.x() - cam.principal_u;
  const double cy = p2.y() - cam.principal_v;
  const double x1 = cx * c2 + (-cy) * s2 + s * (m.rho * std::sin(m.phi)) + cam.principal_u;
  const double y1 = cx * s2 + cy * c2 - s * (m.rho * std::cos(m.phi)) + cam.principal_v;
  return {x1, y1};
}

// Derivative of transfer_point with respect to (phi, rho); column 0 is
// d/dphi, column 1 is d/drho.
inline Eigen::Matrix2d transfer_jacobian(const Eigen::Vector2d& p2, const MotionParams& m,
                                         const CameraModel& cam) {
  const double s = cam.scale();
  const double c2 = std::cos(2.0 * m.phi);
  const double s2 = std::sin(2.0 * m.phi);
  const double cp = std::cos(m.phi);
  const double sp = std::sin(m.phi);
  const double cx = p2.x() - cam.principal_u;
  const double cy = p2.y() - cam.principal_v;
  Eigen::Matrix2d J;
  J(0, 0) = -2.0 * cx * s2 + 2.0 * (-cy) * c2 + s * m.rho * cp;
  J(0, 1) = s * sp;
  J(1, 0) = 2.0 * cx * c2 - 2.0 * cy * s2 + s * m.rho * sp;
  J(1, 1) = -s * cp;
  return J;
}

// Dead-reckoning step: advance by the chord rho along the direction that
// bisects old and new heading, then rotate the heading by 2*phi.
inline Pose2D integrate_motion(const Pose2D& pose, const MotionParams& m) {
  const double dir = pose.heading + m.phi;
  return {pose.x + m.rho * std::cos(dir), pose.y + m.rho * std::sin(dir),
          normalize_angle(pose.heading + 2.0 * m.phi)};
}

}  // namespace govo
