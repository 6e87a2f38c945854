#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "govo/baseline.hpp"
#include "govo/dataset_io.hpp"
#include "govo/metrics.hpp"
#include "govo/simulate.hpp"
#include "govo/solver.hpp"

namespace govo {

struct SimulateOptions {
  TrajectorySpec traj;
  CameraModel cam;
  int canvas_points = 6000;
  double extent_x = 4.0;
  double extent_y = 4.0;
  double noise = 2.5;
  std::uint64_t seed = 7;
};

Dataset make_dataset(const SimulateOptions& opts);

// Scripted trajectories for the baseline comparison: pure forward motion,
// a constant turn, and a mix of both.
enum class ScenarioKind { straight, turns, combined };
Dataset make_scenario_dataset(ScenarioKind kind, const CameraModel& cam, int canvas_points,
                              double noise, std::uint64_t seed);

struct SolveOptions {
  SolverConfig solver;
  bool warm_start = true;
  bool oracle_check = false;
  int oracle_grid = 200;
};

struct PairRecord {
  int frame_a = 0, frame_b = 0;
  MotionParams motion, raw_motion;
  int objective = 0;
  int correspondences = 0;
  int levels = 0;
  std::int64_t expanded = 0, pruned = 0;
  double ms = 0.0;
  bool degenerate = false, certified = true, multi_modal = false;
  bool warm_started = false, fallback = false;
};

struct SolveRun {
  std::vector<PairRecord> records;
  Trajectory trajectory;      // dead-reckoned from refined motions
  Trajectory raw_trajectory;  // dead-reckoned from pre-refinement motions
  double wall_time = 0.0;
  bool oracle_ok = true;
};

// Processes consecutive frame pairs, warm starting each solve from the
// previous refined motion. The trajectory starts at the ground-truth
// initial pose so estimate and reference share a gauge.
SolveRun solve_dataset(const Dataset& ds, const SolveOptions& opts);

// Disk entry points used by the CLI.
void run_simulate(const SimulateOptions& opts, const std::filesystem::path& out_dir);
SolveRun run_solve(const std::filesystem::path& data_dir,
                   const std::filesystem::path& out_dir, const SolveOptions& opts);

struct EvalResult {
  RpeResult rpe;
  AteResult ate;
};
EvalResult evaluate_trajectories(const Trajectory& est, const Trajectory& gt, int delta);
EvalResult run_eval(const std::filesystem::path& data_dir,
                    const std::filesystem::path& estimate_csv,
                    const std::filesystem::path& out_json, int delta = 1);

// Synthetic matches for the correspondence-based baseline: true matches
// from shared canvas ids, then a fraction replaced by wrong pairings
// (cyclic shuffle) and/or by uniform random points.
MatchSet build_matches(const Observation& a, const Observation& b, double shuffle_rate,
                       double outlier_rate, const CameraModel& cam, std::uint64_t seed);

struct CompareOptions {
  double shuffle_rate = 0.9;
  double outlier_rate = 0.0;
  int ransac_iters = 200;
  double epsilon = 2.5;
  std::uint64_t seed = 1;
  SolverConfig solver;
  bool warm_start = true;
};

struct MethodResult {
  std::string method;
  double rpe_mean = 0.0, rpe_rmse = 0.0;
  double ate_rmse = 0.0, ate_mean = 0.0;
  int failures = 0;
};

struct CompareRun {
  MethodResult consensus;  // correspondence-less solver on raw point sets
  MethodResult ransac;     // 1-point RANSAC on the contaminated matches
};

CompareRun compare_dataset(const Dataset& ds, const CompareOptions& opts);
CompareRun run_compare(const std::filesystem::path& data_dir,
                       const std::filesystem::path& out_dir, const CompareOptions& opts);

struct SweepOptions {
  std::vector<double> b_values{0.6, 0.7, 0.8, 0.9, 1.0};
  std::vector<double> steps_deg{2.0, 5.0, 10.0};
  CameraModel cam;       // see make_sweep_camera()
  int canvas_points = 6000;
  double noise = 2.5;
  std::uint64_t seed = 7;
  SolverConfig solver;
};

struct SweepRow {
  double b = 1.0, eccentricity = 0.0, step_deg = 10.0;
  double mean_rho = 0.0;
  double rpe_before = 0.0, rpe_after = 0.0;
  double model_residual = 0.0;  // radians, arc-model violation
};

// Camera for the eccentricity sweep: flying height 0.5 m widens the ground
// footprint to 0.64 x 0.48 m so that 10-degree steps on a metre-scale
// ellipse (chords up to ~0.17 m) still leave dozens of shared features.
CameraModel make_sweep_camera();

std::vector<SweepRow> eccentricity_sweep(const SweepOptions& opts);
void write_sweep_csv(const std::vector<SweepRow>& rows, const std::filesystem::path& file);

struct BenchResult {
  std::vector<double> pair_ms;
  double p50 = 0.0, p95 = 0.0, mean = 0.0;
  int max_features = 0;
  double wall_time = 0.0;
};

BenchResult run_bench(const std::filesystem::path& data_dir,
                      const std::optional<std::filesystem::path>& out_json,
                      const SolveOptions& opts);

double percentile(std::vector<double> values, double q);  // nearest-rank

}  // namespace govo
