#pragma once

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "govo/bounds.hpp"
#include "govo/geometry.hpp"

namespace govo {

struct SolverConfig {
  // Initial search domain. rho_hi < 0 derives the default from the camera:
  // depth * image_height / (2 * focal), i.e. half the vertical footprint —
  // beyond that the two views barely overlap.
  double phi_lo = -kPi / 4.0;
  double phi_hi = kPi / 4.0;
  double rho_lo = 0.0;
  double rho_hi = -1.0;

  double epsilon = 2.5;  // inlier threshold, pixels

  // Resolution floor: intervals narrower than this on both axes are forced
  // converged (the epsilon-square upper bound keeps a small slack over the
  // disc objective, so exact lower == upper may never happen).
  double min_phi_width = 1e-4;  // radians
  double min_rho_width = 1e-4;  // metres

  int max_levels = 32;
  std::int64_t node_budget = 8'000'000;  // total interval evaluations

  // Warm start: half-widths of the restarted domain around the previous
  // optimum, and the consensus below which the full domain is retried.
  double warm_margin_phi = 0.05;
  double warm_margin_rho = 0.01;
  int min_consensus = 8;

  int parallel_width = 0;  // max concurrently evaluated intervals; 0 = auto

  double index_cell_factor = 2.0;  // RangeIndex cell size = factor * epsilon

  double resolved_rho_hi(const CameraModel& cam) const {
    return rho_hi >= 0.0 ? rho_hi : cam.depth * cam.image_height / (2.0 * cam.focal);
  }
};

struct Estimate {
  MotionParams motion;      // after non-linear refinement
  MotionParams raw_motion;  // average of converged interval centres
  // A sampled motion whose objective equals objective_value exactly; the
  // point the incumbent lower bound was last raised at.
  MotionParams witness_motion;
  int objective_value = 0;  // certified consensus (ordered pairs)
  std::vector<std::pair<int, int>> correspondences;  // (index into P1, index into P2)

  // Diagnostics.
  int levels_used = 0;
  std::int64_t intervals_expanded = 0;
  std::int64_t intervals_pruned = 0;
  double solve_time = 0.0;  // seconds
  bool degenerate = false;  // zero consensus everywhere
  bool certified = true;    // no discarded interval could beat objective_value
  int max_discarded_upper = 0;
  bool multi_modal = false;
  int cluster_count = 1;
  std::vector<MotionParams> cluster_centers;
  bool warm_started = false;
  bool full_domain_fallback = false;
};

// Quadrisection at the midpoints; an axis already at its resolution floor
// is left unsplit. Children are emitted in lexicographic (phi_lo, rho_lo)
// order and partition the parent. Sign-definiteness in phi is preserved.
std::vector<MotionInterval> branch(const MotionInterval& iv, double min_phi_width,
                                   double min_rho_width);

struct RefineResult {
  MotionParams motion;
  double initial_cost = 0.0;
  double final_cost = 0.0;
  int iterations = 0;
  bool insufficient = false;  // fewer than one correspondence
};

// Damped least squares on (phi, rho) minimising the squared Euclidean
// transfer error over the given correspondences, with analytic Jacobian.
// Monotone: final_cost <= initial_cost always. Optional clamp box bounds
// the iterates (phi also stays within [-pi/2, pi/2], rho >= 0).
RefineResult refine(const std::vector<std::pair<int, int>>& correspondences,
                    const MotionParams& init, const CameraModel& cam, const PointSet& p1,
                    const PointSet& p2,
                    const std::optional<MotionInterval>& clamp = std::nullopt);

struct WarmDomain {
  // Sign-definite phi ranges (two when the margin interval straddles 0).
  std::vector<std::pair<double, double>> phi_ranges;
  std::pair<double, double> rho_range;
};

// Previous optimum +- margins, intersected with the full domain, with the
// phi interval split at 0 when it straddles it.
WarmDomain warm_start_domain(const MotionParams& prev, const SolverConfig& cfg,
                             const CameraModel& cam);

// Globally-optimal branch-and-bound consensus maximisation over the motion
// domain: breadth-first, level-synchronous branching with pruning against
// the best centre-sampled consensus. The returned objective_value is the
// exact maximum of the consensus objective over the domain at the achieved
// resolution; correspondences are the merged centre inliers of the winning
// converged intervals, reduced one-to-one, and motion is their non-linear
// refinement. Deterministic for any parallel_width.
// Throws std::invalid_argument("no features") on an empty point set.
Estimate solve(const PointSet& p1, const PointSet& p2, const CameraModel& cam,
               const SolverConfig& cfg,
               const std::optional<MotionParams>& warm = std::nullopt);

struct GridDomain {
  double phi_lo, phi_hi;
  double rho_lo, rho_hi;
};

struct GridResult {
  MotionParams motion;      // argmax (first in row-major order on ties)
  int objective_value = 0;
};

// Exhaustive evaluation of the consensus objective at the centres of an
// n_phi x n_rho grid. Independent oracle for the solver; desk scale only
// (n_phi * n_rho <= 1e6).
GridResult grid_search(const PointSet& p1, const PointSet& p2, const CameraModel& cam,
                       const GridDomain& domain, double epsilon, int n_phi, int n_rho,
                       int jobs = 0);

// Number of bisections until a width reaches the resolution floor; the
// solver's terminal lattice along one axis has 2^k cells.
int terminal_levels(double width, double min_width);

}  // namespace govo
