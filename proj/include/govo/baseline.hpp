#pragma once

#include <cstdint>
#include <vector>

#include "govo/geometry.hpp"
#include "govo/solver.hpp"

namespace govo {

// Putative correspondences between two views. outlier_label is simulation
// metadata (1 = planted wrong match) and is ignored by the estimator.
struct MatchSet {
  std::vector<Eigen::Vector2d> first;
  std::vector<Eigen::Vector2d> second;
  std::vector<std::uint8_t> outlier_label;

  std::size_t size() const { return first.size(); }
  bool empty() const { return first.empty(); }
};

enum class OneMatchStatus { ok, degenerate, backwards };

struct OneMatchMotion {
  OneMatchStatus status = OneMatchStatus::degenerate;
  MotionParams motion;
  explicit operator bool() const { return status == OneMatchStatus::ok; }
};

// Closed-form inversion of the point transfer for a single correspondence:
// the arc motion has 2 DoF and each match provides 2 equations. With
// centred coordinates the half angle follows from
//   (x2' - x1') = sin(phi) * g,   (y1' + y2') = cos(phi) * g,
// and rho by back-substitution; when g < 0 the atan2 branch lands pi away
// and the forward-motion solution is recovered by flipping it. Matches
// whose only solution needs rho < 0 (backwards motion) are rejected, as is
// the fully degenerate configuration where both arguments vanish.
OneMatchMotion motion_from_one_match(const Eigen::Vector2d& p1, const Eigen::Vector2d& p2,
                                     const CameraModel& cam);

// Correspondence-based reference estimator: hypothesise from single
// matches, score by the count of matches with transfer error < epsilon,
// keep the best consensus (lowest iteration index wins ties), then refine
// on its inliers. Deterministic given the seed.
// Throws std::invalid_argument on an empty match set and std::runtime_error
// ("no valid hypothesis") when every sampled hypothesis is degenerate.
Estimate one_point_ransac(const MatchSet& matches, const CameraModel& cam, double epsilon,
                          int max_iters, std::uint64_t seed);

}  // namespace govo
