#include "govo/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <numeric>

#include <json.hpp>

#include "govo/rng.hpp"

namespace govo {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

Dataset assemble(const SimulateOptions& opts, const std::vector<Pose2D>& poses,
                 const std::string& kind) {
  Dataset ds;
  ds.meta.seed = opts.seed;
  ds.meta.camera = opts.cam;
  ds.meta.trajectory_kind = kind;
  ds.meta.semi_a = opts.traj.semi_a;
  ds.meta.semi_b = opts.traj.semi_b;
  ds.meta.step_deg = opts.traj.step_deg;
  ds.meta.frames = int(poses.size());
  ds.meta.canvas_points = opts.canvas_points;
  ds.meta.extent_x = opts.extent_x;
  ds.meta.extent_y = opts.extent_y;
  ds.meta.noise_half_width = opts.noise;

  ds.canvas = generate_canvas(opts.canvas_points, opts.extent_x, opts.extent_y, opts.seed);
  ds.gt_poses = poses;
  for (std::size_t k = 0; k < poses.size(); ++k) {
    ds.observations.push_back(
        observe(ds.canvas, poses[k], int(k), opts.cam, opts.noise, opts.seed));
    if (k + 1 < poses.size()) {
      const GroundTruthMotion gt = ground_truth_motion(poses[k], poses[k + 1]);
      ds.gt_motions.push_back(gt.motion);
      ds.gt_residuals.push_back(gt.residual);
    }
  }
  ds.gt_motions.push_back({0.0, 0.0});  // final frame has no successor
  ds.gt_residuals.push_back(0.0);
  return ds;
}

json motion_to_json(const MotionParams& m) {
  return {{"phi", m.phi}, {"rho", m.rho}};
}

json solver_config_to_json(const SolverConfig& cfg, const CameraModel& cam) {
  return {{"phi_lo", cfg.phi_lo},
          {"phi_hi", cfg.phi_hi},
          {"rho_lo", cfg.rho_lo},
          {"rho_hi", cfg.resolved_rho_hi(cam)},
          {"epsilon", cfg.epsilon},
          {"min_phi_width", cfg.min_phi_width},
          {"min_rho_width", cfg.min_rho_width},
          {"max_levels", cfg.max_levels},
          {"node_budget", cfg.node_budget},
          {"warm_margin_phi", cfg.warm_margin_phi},
          {"warm_margin_rho", cfg.warm_margin_rho},
          {"min_consensus", cfg.min_consensus},
          {"parallel_width", cfg.parallel_width},
          {"index_cell_factor", cfg.index_cell_factor}};
}

json record_to_json(const PairRecord& r) {
  return {{"frame_a", r.frame_a},
          {"frame_b", r.frame_b},
          {"motion", motion_to_json(r.motion)},
          {"raw_motion", motion_to_json(r.raw_motion)},
          {"objective", r.objective},
          {"correspondences", r.correspondences},
          {"levels", r.levels},
          {"expanded", r.expanded},
          {"pruned", r.pruned},
          {"ms", r.ms},
          {"degenerate", r.degenerate},
          {"certified", r.certified},
          {"multi_modal", r.multi_modal},
          {"warm_started", r.warm_started},
          {"full_domain_fallback", r.fallback}};
}

void write_json(const json& j, const fs::path& file) {
  std::ofstream out(file, std::ios::binary);
  if (!out) throw DatasetError("cannot write " + file.string());
  out << j.dump(2) << "\n";
}

}  // namespace

Dataset make_dataset(const SimulateOptions& opts) {
  const std::vector<Pose2D> poses = trajectory_poses(opts.traj);
  return assemble(opts, poses,
                  opts.traj.kind == TrajectoryKind::circular ? "circle" : "ellipse");
}

Dataset make_scenario_dataset(ScenarioKind kind, const CameraModel& cam, int canvas_points,
                              double noise, std::uint64_t seed) {
  std::vector<MotionParams> motions;
  Pose2D pose{-0.6, -0.3, 0.0};
  switch (kind) {
    case ScenarioKind::straight:
      motions.assign(40, {0.0, 0.03});
      pose = {-0.6, 0.0, 0.0};
      break;
    case ScenarioKind::turns:
      motions.assign(40, {0.02, 0.03});
      pose = {-0.5, -0.5, 0.0};
      break;
    case ScenarioKind::combined:
      motions.assign(15, {0.0, 0.03});
      motions.insert(motions.end(), 12, {0.025, 0.03});
      motions.insert(motions.end(), 13, {0.0, 0.03});
      break;
  }
  std::vector<Pose2D> poses{pose};
  for (const MotionParams& m : motions) poses.push_back(integrate_motion(poses.back(), m));

  SimulateOptions opts;
  opts.cam = cam;
  opts.canvas_points = canvas_points;
  opts.noise = noise;
  opts.seed = seed;
  opts.traj.step_deg = 360.0;  // unused for scripted poses
  return assemble(opts, poses, "scripted");
}

SolveRun solve_dataset(const Dataset& ds, const SolveOptions& opts) {
  if (ds.observations.size() < 2) throw DatasetError("dataset has fewer than 2 frames");

  const auto t0 = std::chrono::steady_clock::now();
  SolveRun run;
  Pose2D pose = ds.gt_poses.front();
  Pose2D raw_pose = pose;
  run.trajectory.frames.push_back(0);
  run.trajectory.poses.push_back(pose);
  run.raw_trajectory.frames.push_back(0);
  run.raw_trajectory.poses.push_back(raw_pose);

  std::optional<MotionParams> prev;
  for (std::size_t k = 0; k + 1 < ds.observations.size(); ++k) {
    const PointSet& p1 = ds.observations[k].pixels;
    const PointSet& p2 = ds.observations[k + 1].pixels;
    const Estimate est =
        solve(p1, p2, ds.meta.camera, opts.solver, opts.warm_start ? prev : std::nullopt);

    if (opts.oracle_check) {
      GridDomain domain{opts.solver.phi_lo, opts.solver.phi_hi, opts.solver.rho_lo,
                        opts.solver.resolved_rho_hi(ds.meta.camera)};
      if (est.warm_started && !est.full_domain_fallback && prev) {
        const WarmDomain wd = warm_start_domain(*prev, opts.solver, ds.meta.camera);
        domain = {wd.phi_ranges.front().first, wd.phi_ranges.back().second,
                  wd.rho_range.first, wd.rho_range.second};
      }
      const GridResult oracle =
          grid_search(p1, p2, ds.meta.camera, domain, opts.solver.epsilon, opts.oracle_grid,
                      opts.oracle_grid, opts.solver.parallel_width);
      if (oracle.objective_value > est.objective_value) run.oracle_ok = false;
    }

    prev = est.motion;
    pose = integrate_motion(pose, est.motion);
    raw_pose = integrate_motion(raw_pose, est.raw_motion);
    run.trajectory.frames.push_back(int(k + 1));
    run.trajectory.poses.push_back(pose);
    run.raw_trajectory.frames.push_back(int(k + 1));
    run.raw_trajectory.poses.push_back(raw_pose);

    PairRecord rec;
    rec.frame_a = int(k);
    rec.frame_b = int(k + 1);
    rec.motion = est.motion;
    rec.raw_motion = est.raw_motion;
    rec.objective = est.objective_value;
    rec.correspondences = int(est.correspondences.size());
    rec.levels = est.levels_used;
    rec.expanded = est.intervals_expanded;
    rec.pruned = est.intervals_pruned;
    rec.ms = est.solve_time * 1000.0;
    rec.degenerate = est.degenerate;
    rec.certified = est.certified;
    rec.multi_modal = est.multi_modal;
    rec.warm_started = est.warm_started;
    rec.fallback = est.full_domain_fallback;
    run.records.push_back(rec);
  }
  run.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return run;
}

void run_simulate(const SimulateOptions& opts, const fs::path& out_dir) {
  write_dataset(make_dataset(opts), out_dir);
}

SolveRun run_solve(const fs::path& data_dir, const fs::path& out_dir,
                   const SolveOptions& opts) {
  const Dataset ds = load_dataset(data_dir);
  const SolveRun run = solve_dataset(ds, opts);

  fs::create_directories(out_dir);
  write_trajectory_csv(run.trajectory, out_dir / "trajectory.csv");
  write_trajectory_csv(run.raw_trajectory, out_dir / "trajectory_raw.csv");

  json report;
  report["config"] = solver_config_to_json(opts.solver, ds.meta.camera);
  report["config"]["warm_start"] = opts.warm_start;
  report["config"]["oracle_check"] = opts.oracle_check;
  report["dataset"] = data_dir.string();
  json pairs = json::array();
  for (const PairRecord& r : run.records) pairs.push_back(record_to_json(r));
  report["pairs"] = pairs;

  std::vector<double> ms;
  std::int64_t expanded = 0, pruned = 0;
  for (const PairRecord& r : run.records) {
    ms.push_back(r.ms);
    expanded += r.expanded;
    pruned += r.pruned;
  }
  report["aggregate"] = {{"pairs", run.records.size()},
                         {"wall_time_s", run.wall_time},
                         {"total_expanded", expanded},
                         {"total_pruned", pruned},
                         {"median_ms", percentile(ms, 0.5)},
                         {"p95_ms", percentile(ms, 0.95)},
                         {"oracle_ok", run.oracle_ok}};
  write_json(report, out_dir / "report.json");
  return run;
}

EvalResult evaluate_trajectories(const Trajectory& est, const Trajectory& gt, int delta) {
  return {rpe(est, gt, delta), ate(est, gt)};
}

EvalResult run_eval(const fs::path& data_dir, const fs::path& estimate_csv,
                    const fs::path& out_json, int delta) {
  const Dataset ds = load_dataset(data_dir);
  const Trajectory est = load_trajectory_csv(estimate_csv);
  const EvalResult res = evaluate_trajectories(est, ds.ground_truth_trajectory(), delta);

  json j;
  j["rpe"] = {{"translation_mean", res.rpe.translation_mean},
              {"translation_rmse", res.rpe.translation_rmse},
              {"rotation_mean", res.rpe.rotation_mean},
              {"rotation_rmse", res.rpe.rotation_rmse},
              {"delta", res.rpe.delta},
              {"per_step_translation", res.rpe.per_step_translation}};
  j["ate"] = {{"rmse", res.ate.rmse},
              {"mean", res.ate.mean},
              {"align_rotation", res.ate.align_rotation},
              {"align_tx", res.ate.align_tx},
              {"align_ty", res.ate.align_ty}};
  write_json(j, out_json);
  return res;
}

MatchSet build_matches(const Observation& a, const Observation& b, double shuffle_rate,
                       double outlier_rate, const CameraModel& cam, std::uint64_t seed) {
  MatchSet ms;
  // ids are ascending within a frame; intersect with two pointers.
  std::size_t i = 0, j = 0;
  while (i < a.ids.size() && j < b.ids.size()) {
    if (a.ids[i] < b.ids[j]) {
      ++i;
    } else if (a.ids[i] > b.ids[j]) {
      ++j;
    } else {
      ms.first.push_back(a.pixels[i]);
      ms.second.push_back(b.pixels[j]);
      ms.outlier_label.push_back(0);
      ++i;
      ++j;
    }
  }

  const int n = int(ms.size());
  if (n == 0) return ms;
  SplitMix64 rng(mix_seed(seed, 0x5eedull + std::uint64_t(a.frame)));

  std::vector<int> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  for (int k = n - 1; k > 0; --k) {
    std::swap(perm[k], perm[int(rng.next_below(std::uint64_t(k) + 1))]);
  }

  const int shuffled = int(std::lround(shuffle_rate * n));
  if (shuffled >= 2) {
    // Cyclic rotation of the second points among the selected matches makes
    // every one of them a wrong pairing.
    const Eigen::Vector2d saved = ms.second[perm[0]];
    for (int k = 0; k + 1 < shuffled; ++k) ms.second[perm[k]] = ms.second[perm[k + 1]];
    ms.second[perm[shuffled - 1]] = saved;
    for (int k = 0; k < shuffled; ++k) ms.outlier_label[perm[k]] = 1;
  }

  const int outliers = std::min(n - shuffled, int(std::lround(outlier_rate * n)));
  for (int k = 0; k < outliers; ++k) {
    const int idx = perm[shuffled + k];
    ms.second[idx] = {rng.uniform(0.0, double(cam.image_width)),
                      rng.uniform(0.0, double(cam.image_height))};
    ms.outlier_label[idx] = 1;
  }
  return ms;
}

CompareRun compare_dataset(const Dataset& ds, const CompareOptions& opts) {
  if (ds.observations.size() < 2) throw DatasetError("dataset has fewer than 2 frames");
  const Trajectory gt = ds.ground_truth_trajectory();

  CompareRun out;
  out.consensus.method = "govo";
  out.ransac.method = "one_point_ransac";

  // Correspondence-less route: raw point sets.
  SolveOptions so;
  so.solver = opts.solver;
  so.solver.epsilon = opts.epsilon;
  so.warm_start = opts.warm_start;
  const SolveRun govo_run = solve_dataset(ds, so);

  // Correspondence-based route: contaminated synthetic matches.
  Trajectory ransac_traj;
  Pose2D pose = ds.gt_poses.front();
  ransac_traj.frames.push_back(0);
  ransac_traj.poses.push_back(pose);
  int failures = 0;
  for (std::size_t k = 0; k + 1 < ds.observations.size(); ++k) {
    const MatchSet matches =
        build_matches(ds.observations[k], ds.observations[k + 1], opts.shuffle_rate,
                      opts.outlier_rate, ds.meta.camera, mix_seed(opts.seed, k));
    MotionParams m{0.0, 0.0};
    if (!matches.empty()) {
      try {
        const Estimate est = one_point_ransac(matches, ds.meta.camera, opts.epsilon,
                                              opts.ransac_iters, mix_seed(opts.seed, k ^ 0xabcdull));
        m = est.motion;
      } catch (const std::runtime_error&) {
        ++failures;
      }
    } else {
      ++failures;
    }
    pose = integrate_motion(pose, m);
    ransac_traj.frames.push_back(int(k + 1));
    ransac_traj.poses.push_back(pose);
  }

  const EvalResult ge = evaluate_trajectories(govo_run.trajectory, gt, 1);
  out.consensus.rpe_mean = ge.rpe.translation_mean;
  out.consensus.rpe_rmse = ge.rpe.translation_rmse;
  out.consensus.ate_rmse = ge.ate.rmse;
  out.consensus.ate_mean = ge.ate.mean;

  const EvalResult re = evaluate_trajectories(ransac_traj, gt, 1);
  out.ransac.rpe_mean = re.rpe.translation_mean;
  out.ransac.rpe_rmse = re.rpe.translation_rmse;
  out.ransac.ate_rmse = re.ate.rmse;
  out.ransac.ate_mean = re.ate.mean;
  out.ransac.failures = failures;
  return out;
}

CompareRun run_compare(const fs::path& data_dir, const fs::path& out_dir,
                       const CompareOptions& opts) {
  const Dataset ds = load_dataset(data_dir);
  const CompareRun run = compare_dataset(ds, opts);

  fs::create_directories(out_dir);
  json j;
  j["config"] = {{"shuffle_rate", opts.shuffle_rate},
                 {"outlier_rate", opts.outlier_rate},
                 {"ransac_iters", opts.ransac_iters},
                 {"epsilon", opts.epsilon},
                 {"seed", opts.seed}};
  auto method_json = [](const MethodResult& m) {
    return json{{"method", m.method},         {"rpe_mean", m.rpe_mean},
                {"rpe_rmse", m.rpe_rmse},     {"ate_rmse", m.ate_rmse},
                {"ate_mean", m.ate_mean},     {"failures", m.failures}};
  };
  j["results"] = json::array({method_json(run.consensus), method_json(run.ransac)});
  write_json(j, out_dir / "comparison.json");

  std::ofstream csv(out_dir / "comparison.csv", std::ios::binary);
  csv << "method,rpe_mean_m,rpe_rmse_m,ate_rmse_m,ate_mean_m,failures\n";
  for (const MethodResult* m : {&run.consensus, &run.ransac}) {
    csv << m->method << ',' << format_double(m->rpe_mean) << ','
        << format_double(m->rpe_rmse) << ',' << format_double(m->ate_rmse) << ','
        << format_double(m->ate_mean) << ',' << m->failures << '\n';
  }
  return run;
}

CameraModel make_sweep_camera() {
  CameraModel cam;
  cam.depth = 0.5;
  return cam;
}

std::vector<SweepRow> eccentricity_sweep(const SweepOptions& opts) {
  std::vector<SweepRow> rows;
  for (const double b : opts.b_values) {
    for (const double step : opts.steps_deg) {
      SimulateOptions sim;
      sim.traj.kind = b == 1.0 ? TrajectoryKind::circular : TrajectoryKind::elliptical;
      sim.traj.semi_a = 1.0;
      sim.traj.semi_b = b;
      sim.traj.step_deg = step;
      sim.cam = opts.cam;
      sim.canvas_points = opts.canvas_points;
      sim.noise = opts.noise;
      sim.seed = opts.seed;
      const Dataset ds = make_dataset(sim);

      SolveOptions so;
      so.solver = opts.solver;
      const SolveRun run = solve_dataset(ds, so);
      const Trajectory gt = ds.ground_truth_trajectory();

      SweepRow row;
      row.b = b;
      row.eccentricity = sim.traj.eccentricity();
      row.step_deg = step;
      row.rpe_before = rpe(run.raw_trajectory, gt, 1).translation_mean;
      row.rpe_after = rpe(run.trajectory, gt, 1).translation_mean;
      double rho_sum = 0.0, res_sum = 0.0;
      const std::size_t steps = ds.gt_motions.size() - 1;
      for (std::size_t k = 0; k < steps; ++k) {
        rho_sum += ds.gt_motions[k].rho;
        res_sum += ds.gt_residuals[k];
      }
      row.mean_rho = rho_sum / double(steps);
      row.model_residual = res_sum / double(steps);
      rows.push_back(row);
    }
  }
  return rows;
}

void write_sweep_csv(const std::vector<SweepRow>& rows, const fs::path& file) {
  std::ofstream csv(file, std::ios::binary);
  if (!csv) throw DatasetError("cannot write " + file.string());
  csv << "b_m,eccentricity,step_deg,mean_baseline_m,rpe_before_m,rpe_after_m,"
         "model_residual_rad\n";
  for (const SweepRow& r : rows) {
    csv << format_double(r.b) << ',' << format_double(r.eccentricity) << ','
        << format_double(r.step_deg) << ',' << format_double(r.mean_rho) << ','
        << format_double(r.rpe_before) << ',' << format_double(r.rpe_after) << ','
        << format_double(r.model_residual) << '\n';
  }
}

BenchResult run_bench(const fs::path& data_dir, const std::optional<fs::path>& out_json,
                      const SolveOptions& opts) {
  const Dataset ds = load_dataset(data_dir);

  BenchResult res;
  for (const Observation& obs : ds.observations) {
    res.max_features = std::max(res.max_features, int(obs.pixels.size()));
  }

  const auto t0 = std::chrono::steady_clock::now();
  const SolveRun run = solve_dataset(ds, opts);
  res.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  for (const PairRecord& r : run.records) res.pair_ms.push_back(r.ms);
  res.p50 = percentile(res.pair_ms, 0.5);
  res.p95 = percentile(res.pair_ms, 0.95);
  res.mean = std::accumulate(res.pair_ms.begin(), res.pair_ms.end(), 0.0) /
             double(std::max<std::size_t>(1, res.pair_ms.size()));

  if (out_json) {
    json j;
    j["pairs"] = res.pair_ms.size();
    j["max_features"] = res.max_features;
    j["p50_ms"] = res.p50;
    j["p95_ms"] = res.p95;
    j["mean_ms"] = res.mean;
    j["wall_time_s"] = res.wall_time;
    j["pair_ms"] = res.pair_ms;
    write_json(j, *out_json);
  }
  return res;
}

double percentile(std::vector<double> values, double q) {
  if (values.empty()) return 0.0;
  std::sort(values.begin(), values.end());
  const std::size_t rank =
      std::min(values.size() - 1,
               std::size_t(std::max(0.0, std::ceil(q * double(values.size())) - 1.0)));
  return values[rank];
}

}  // namespace govo
