#include "govo/metrics.hpp"

#include <cmath>
#include <stdexcept>

namespace govo {

namespace {

void check_ids(const Trajectory& est, const Trajectory& gt) {
  if (est.size() != gt.size()) throw std::invalid_argument("trajectory sizes differ");
  for (std::size_t k = 0; k < est.size(); ++k) {
    if (est.frames[k] != gt.frames[k]) throw std::invalid_argument("frame ids differ");
    if (k > 0 && est.frames[k] <= est.frames[k - 1]) {
      throw std::invalid_argument("frame ids must be strictly increasing");
    }
  }
}

// a^-1 * b as a planar rigid transform.
Pose2D between(const Pose2D& a, const Pose2D& b) {
  const double ca = std::cos(a.heading), sa = std::sin(a.heading);
  const double dx = b.x - a.x, dy = b.y - a.y;
  return {ca * dx + sa * dy, -sa * dx + ca * dy, normalize_angle(b.heading - a.heading)};
}

}  // namespace

RpeResult rpe(const Trajectory& est, const Trajectory& gt, int delta) {
  check_ids(est, gt);
  if (delta < 1) throw std::invalid_argument("delta must be >= 1");
  if (est.size() <= std::size_t(delta)) throw std::invalid_argument("trajectory too short");

  RpeResult res;
  res.delta = delta;
  double sum_t = 0.0, sum_t2 = 0.0, sum_r = 0.0, sum_r2 = 0.0;
  for (std::size_t k = 0; k + delta < est.size(); ++k) {
    const Pose2D rel_est = between(est.poses[k], est.poses[k + delta]);
    const Pose2D rel_gt = between(gt.poses[k], gt.poses[k + delta]);
    const Pose2D err = between(rel_gt, rel_est);
    const double t = std::hypot(err.x, err.y);
    const double r = std::abs(err.heading);
    res.per_step_translation.push_back(t);
    res.per_step_rotation.push_back(r);
    sum_t += t;
    sum_t2 += t * t;
    sum_r += r;
    sum_r2 += r * r;
  }
  const double n = double(res.per_step_translation.size());
  res.translation_mean = sum_t / n;
  res.translation_rmse = std::sqrt(sum_t2 / n);
  res.rotation_mean = sum_r / n;
  res.rotation_rmse = std::sqrt(sum_r2 / n);
  return res;
}

AteResult ate(const Trajectory& est, const Trajectory& gt) {
  check_ids(est, gt);
  const std::size_t n = est.size();
  if (n < 2) throw std::invalid_argument("need at least 2 poses");

  double ex = 0.0, ey = 0.0, gx = 0.0, gy = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    ex += est.poses[k].x;
    ey += est.poses[k].y;
    gx += gt.poses[k].x;
    gy += gt.poses[k].y;
  }
  ex /= double(n);
  ey /= double(n);
  gx /= double(n);
  gy /= double(n);

  // Closed-form planar Procrustes: rotation maximising the correlation of
  // the centred point sets, no scale.
  double s_cos = 0.0, s_sin = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    const double ax = est.poses[k].x - ex, ay = est.poses[k].y - ey;
    const double bx = gt.poses[k].x - gx, by = gt.poses[k].y - gy;
    s_cos += bx * ax + by * ay;
    s_sin += by * ax - bx * ay;
  }
  const double theta = std::atan2(s_sin, s_cos);
  const double c = std::cos(theta), s = std::sin(theta);

  AteResult res;
  res.align_rotation = theta;
  res.align_tx = gx - (c * ex - s * ey);
  res.align_ty = gy - (s * ex + c * ey);

  double sum = 0.0, sum2 = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    const double ax = c * est.poses[k].x - s * est.poses[k].y + res.align_tx;
    const double ay = s * est.poses[k].x + c * est.poses[k].y + res.align_ty;
    const double d = std::hypot(gt.poses[k].x - ax, gt.poses[k].y - ay);
    sum += d;
    sum2 += d * d;
  }
  res.mean = sum / double(n);
  res.rmse = std::sqrt(sum2 / double(n));
  return res;
}

}  // namespace govo
