#pragma once

#include <vector>

#include "govo/geometry.hpp"

namespace govo {

// Timestamped planar trajectory; frame ids strictly increasing.
struct Trajectory {
  std::vector<int> frames;
  std::vector<Pose2D> poses;

  std::size_t size() const { return frames.size(); }
};

struct RpeResult {
  double translation_mean = 0.0;  // metres
  double translation_rmse = 0.0;
  double rotation_mean = 0.0;     // radians
  double rotation_rmse = 0.0;
  int delta = 1;
  std::vector<double> per_step_translation;
  std::vector<double> per_step_rotation;
};

// Relative pose error over frame steps of size delta: the planar rigid
// discrepancy between estimated and ground-truth relative motions.
// Invariant to independent global rigid transforms of either trajectory.
// Throws std::invalid_argument on mismatched frame ids.
RpeResult rpe(const Trajectory& est, const Trajectory& gt, int delta = 1);

struct AteResult {
  double rmse = 0.0;  // metres
  double mean = 0.0;
  // Rigid alignment applied to the estimate (rotation, then translation).
  double align_rotation = 0.0;
  double align_tx = 0.0;
  double align_ty = 0.0;
};

// Absolute trajectory error: closed-form least-squares rigid 2D alignment
// (rotation + translation, no scale) of the estimate onto the ground
// truth, then RMS of the residual position norms.
// Throws std::invalid_argument on mismatched ids or fewer than 2 poses.
AteResult ate(const Trajectory& est, const Trajectory& gt);

}  // namespace govo
