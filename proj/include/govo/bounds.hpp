#pragma once

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "govo/geometry.hpp"

namespace govo {

// Axis-aligned box in motion-parameter space; the branch-and-bound search
// node. Intervals are kept sign-definite in phi: they never contain 0 in
// their interior, which keeps every trigonometric term monotone.
struct MotionInterval {
  double phi_lo = 0.0, phi_hi = 0.0;  // radians
  double rho_lo = 0.0, rho_hi = 0.0;  // metres
  int depth = 0;                      // branching level

  double phi_width() const { return phi_hi - phi_lo; }
  double rho_width() const { return rho_hi - rho_lo; }
  bool sign_definite() const { return phi_lo >= 0.0 || phi_hi <= 0.0; }
  MotionParams center() const {
    return {0.5 * (phi_lo + phi_hi), 0.5 * (rho_lo + rho_hi)};
  }
  bool contains(const MotionParams& m) const {
    return m.phi >= phi_lo && m.phi <= phi_hi && m.rho >= rho_lo && m.rho <= rho_hi;
  }
};

// Pixel-space box guaranteed to contain the transfer of one point for every
// motion inside a MotionInterval.
struct TransferBox {
  double x_lo = 0.0, x_hi = 0.0;
  double y_lo = 0.0, y_hi = 0.0;

  bool contains(const Eigen::Vector2d& p) const {
    return p.x() >= x_lo && p.x() <= x_hi && p.y() >= y_lo && p.y() <= y_hi;
  }
  bool contains_box(const TransferBox& inner) const {
    return inner.x_lo >= x_lo && inner.x_hi <= x_hi && inner.y_lo >= y_lo &&
           inner.y_hi <= y_hi;
  }
};

// Tight transfer box over an interval of motions. Each coordinate of the
// transfer is a sum of monotone trigonometric terms plus a bilinear
// rho*trig term, so per-term interval extremes land on interval corners.
// Requires iv.sign_definite() and |phi| <= pi/2.
TransferBox transfer_box(const Eigen::Vector2d& p2, const MotionInterval& iv,
                         const CameraModel& cam);

// Uniform-grid range-count index over a fixed point set. Rectangle counts
// are exact (closed rectangles); disc queries use strict < on the radius.
// Read-only after construction, safe to share across threads.
class RangeIndex {
 public:
  RangeIndex() = default;
  RangeIndex(const PointSet& points, double cell_size);

  bool empty() const { return n_points_ == 0; }
  int size() const { return n_points_; }
  double cell_size() const { return cell_; }

  int count_in_rect(double x_lo, double x_hi, double y_lo, double y_hi) const;
  int count_in_disc(const Eigen::Vector2d& c, double radius) const;
  // Appends indices of points with |p - c| < radius, ascending.
  void indices_in_disc(const Eigen::Vector2d& c, double radius,
                       std::vector<int>& out) const;

 private:
  int cell_x(double x) const;
  int cell_y(double y) const;

  int n_points_ = 0;
  double x0_ = 0.0, y0_ = 0.0;
  double cell_ = 1.0;
  int nx_ = 0, ny_ = 0;
  std::vector<double> px_, py_;        // coordinates in cell-sorted order
  std::vector<int> ids_;               // original indices, cell-sorted
  std::vector<int> cell_start_;        // CSR offsets, nx_*ny_ + 1
  std::vector<std::int64_t> prefix_;   // 2D prefix sums of cell counts
};

RangeIndex build_range_index(const PointSet& points, double cell_size);

// Correspondence-less consensus objective: the number of ordered pairs
// (i in P1, j in P2) whose Euclidean distance after transferring p_j into
// the first view falls strictly below epsilon. Pairs are counted, not
// matchings: one p_j may pair with several p_i.
struct ConsensusObjective {
  const PointSet* p1 = nullptr;
  const PointSet* p2 = nullptr;
  CameraModel cam;
  double epsilon = 2.5;                // pixels, > 0
  const RangeIndex* index = nullptr;   // optional, over *p1

  int evaluate(const MotionParams& m) const;
  // Count plus the contributing pairs, each pair sorted ascending in i.
  int pairs_at(const MotionParams& m, std::vector<std::pair<int, int>>& out) const;
};

// Output of one interval evaluation. converged <=> lower == upper.
struct BoundResult {
  int lower = 0;
  int upper = 0;
  bool converged = false;
  std::vector<std::pair<int, int>> center_pairs;

  friend bool operator==(const BoundResult&, const BoundResult&) = default;
};

// Lower bound: the objective sampled at the interval centre.
BoundResult lower_bound(const MotionInterval& iv, const ConsensusObjective& obj);

// Upper bound: per point of P2, count P1 points inside the transfer box
// dilated by epsilon on each side, and sum. Never below the true maximum
// of the objective on the interval.
int upper_bound(const MotionInterval& iv, const ConsensusObjective& obj,
                const RangeIndex& idx);

BoundResult evaluate_interval(const MotionInterval& iv, const ConsensusObjective& obj,
                              const RangeIndex& idx);

// Evaluates one breadth-first level. Intervals are independent, so the
// parallel kernel partitions them across OpenMP threads; results are
// written by input position and are bit-identical to the serial reference
// for any thread count. jobs <= 0 uses the OpenMP default.
std::vector<BoundResult> evaluate_level(std::span<const MotionInterval> intervals,
                                        const ConsensusObjective& obj,
                                        const RangeIndex& idx, int jobs);

// Serial reference implementation, kept for tests and benchmarks.
std::vector<BoundResult> evaluate_level_serial(std::span<const MotionInterval> intervals,
                                               const ConsensusObjective& obj,
                                               const RangeIndex& idx);

}  // namespace govo
