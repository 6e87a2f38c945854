// Command-line surface: dataset generation, per-pair solving, trajectory
// evaluation, baseline comparison and benchmarking, glued together from the
// pipeline library. Exit codes: 0 success, 1 runtime failure (including
// oracle violations), 2 invalid configuration, 3 missing dataset.

#include <cstdio>
#include <exception>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "govo/pipeline.hpp"

using namespace govo;

namespace {

struct DomainFlag {
  std::string text;
  bool parse(double& lo, double& hi) const {
    const auto colon = text.find(':');
    if (colon == std::string::npos) return false;
    try {
      lo = std::stod(text.substr(0, colon));
      hi = std::stod(text.substr(colon + 1));
    } catch (const std::exception&) {
      return false;
    }
    return lo < hi;
  }
};

void add_camera_flags(CLI::App* cmd, CameraModel& cam) {
  cmd->add_option("--focal", cam.focal, "Focal length [pix]")->capture_default_str();
  cmd->add_option("--depth", cam.depth, "Camera-to-ground distance [m]")
      ->capture_default_str();
  cmd->add_option("--width", cam.image_width, "Image width [pix]")->capture_default_str();
  cmd->add_option("--height", cam.image_height, "Image height [pix]")->capture_default_str();
  cmd->add_option("--principal-u", cam.principal_u, "Principal point u [pix]")
      ->capture_default_str();
  cmd->add_option("--principal-v", cam.principal_v, "Principal point v [pix]")
      ->capture_default_str();
}

void add_solver_flags(CLI::App* cmd, SolverConfig& cfg, DomainFlag& phi, DomainFlag& rho,
                      int& jobs) {
  cmd->add_option("--epsilon", cfg.epsilon, "Inlier threshold [pix]")->capture_default_str();
  cmd->add_option("--domain-phi", phi.text, "Search domain lo:hi [rad]");
  cmd->add_option("--domain-rho", rho.text, "Search domain lo:hi [m]");
  cmd->add_option("--min-phi-width", cfg.min_phi_width, "Resolution floor [rad]")
      ->capture_default_str();
  cmd->add_option("--min-rho-width", cfg.min_rho_width, "Resolution floor [m]")
      ->capture_default_str();
  cmd->add_option("--max-levels", cfg.max_levels, "Branching depth cap")
      ->capture_default_str();
  cmd->add_option("--min-consensus", cfg.min_consensus,
                  "Warm-start fallback threshold [pairs]")
      ->capture_default_str();
  cmd->add_option("--jobs", jobs, "Max concurrently evaluated intervals (0 = auto)")
      ->capture_default_str();
}

int apply_domains(const DomainFlag& phi, const DomainFlag& rho, SolverConfig& cfg) {
  if (!phi.text.empty()) {
    if (!phi.parse(cfg.phi_lo, cfg.phi_hi)) {
      std::fprintf(stderr, "error: --domain-phi expects lo:hi with lo < hi\n");
      return 2;
    }
  }
  if (!rho.text.empty()) {
    if (!rho.parse(cfg.rho_lo, cfg.rho_hi)) {
      std::fprintf(stderr, "error: --domain-rho expects lo:hi with lo < hi\n");
      return 2;
    }
    if (cfg.rho_lo < 0.0) {
      std::fprintf(stderr, "error: rho domain must be non-negative\n");
      return 2;
    }
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Globally-optimal correspondence-less planar visual odometry"};
  app.require_subcommand(1);
  app.set_config("--config", "",
                 "key=value config file, one [section] per subcommand; flags override");
  app.allow_config_extras(CLI::config_extras_mode::error);

  // --- simulate ------------------------------------------------------------
  SimulateOptions sim;
  std::string traj_kind = "circle";
  std::string sim_out;
  auto* cmd_sim = app.add_subcommand("simulate", "Generate a synthetic dataset");
  cmd_sim->add_option("--trajectory", traj_kind, "circle | ellipse")
      ->check(CLI::IsMember({"circle", "ellipse"}))
      ->capture_default_str();
  cmd_sim->add_option("--points", sim.canvas_points, "Canvas point count")
      ->capture_default_str();
  cmd_sim->add_option("--noise", sim.noise, "Uniform noise half-width [pix]")
      ->capture_default_str();
  cmd_sim->add_option("--seed", sim.seed, "Generator seed")->capture_default_str();
  cmd_sim->add_option("--step", sim.traj.step_deg, "Frame step [deg]")->capture_default_str();
  cmd_sim->add_option("--semi-a", sim.traj.semi_a, "Semi-axis a [m]")->capture_default_str();
  cmd_sim->add_option("--semi-b", sim.traj.semi_b, "Semi-axis b [m]")->capture_default_str();
  cmd_sim->add_option("--extent", sim.extent_x, "Canvas extent [m]")->capture_default_str();
  cmd_sim->add_option("--out", sim_out, "Output dataset directory")->required();
  add_camera_flags(cmd_sim, sim.cam);

  // --- solve ---------------------------------------------------------------
  SolveOptions sol;
  DomainFlag sol_phi, sol_rho;
  int sol_jobs = 0;
  std::string sol_data, sol_out;
  bool no_warm = false;
  auto* cmd_sol = app.add_subcommand("solve", "Estimate per-pair motion and a trajectory");
  cmd_sol->add_option("--data", sol_data, "Dataset directory")->required();
  cmd_sol->add_option("--out", sol_out, "Output directory")->required();
  cmd_sol->add_flag("--no-warm-start", no_warm, "Search the full domain for every pair");
  cmd_sol->add_flag("--oracle-check", sol.oracle_check,
                    "Cross-check each pair against the exhaustive grid oracle");
  cmd_sol->add_option("--oracle-grid", sol.oracle_grid, "Oracle grid cells per axis")
      ->capture_default_str();
  add_solver_flags(cmd_sol, sol.solver, sol_phi, sol_rho, sol_jobs);

  // --- eval ----------------------------------------------------------------
  std::string eval_data, eval_est, eval_out = "metrics.json";
  int eval_delta = 1;
  auto* cmd_eval = app.add_subcommand("eval", "Score a trajectory against ground truth");
  cmd_eval->add_option("--data", eval_data, "Dataset directory")->required();
  cmd_eval->add_option("--est", eval_est, "Estimated trajectory CSV")->required();
  cmd_eval->add_option("--out", eval_out, "Output metrics JSON")->capture_default_str();
  cmd_eval->add_option("--delta", eval_delta, "RPE frame step")->capture_default_str();

  // --- compare ---------------------------------------------------------------
  CompareOptions cmp;
  DomainFlag cmp_phi, cmp_rho;
  int cmp_jobs = 0;
  std::string cmp_data, cmp_out;
  bool sweep_ecc = false;
  SweepOptions sweep;
  sweep.cam = make_sweep_camera();
  auto* cmd_cmp = app.add_subcommand(
      "compare", "Correspondence-less solver vs 1-point RANSAC, or parameter sweeps");
  cmd_cmp->add_option("--data", cmp_data, "Dataset directory");
  cmd_cmp->add_option("--out", cmp_out, "Output directory")->required();
  cmd_cmp->add_option("--shuffle-rate", cmp.shuffle_rate,
                      "Fraction of matches re-paired wrongly")
      ->capture_default_str();
  cmd_cmp->add_option("--outlier-rate", cmp.outlier_rate,
                      "Fraction of matches replaced by random points")
      ->capture_default_str();
  cmd_cmp->add_option("--ransac-iters", cmp.ransac_iters, "RANSAC iterations")
      ->capture_default_str();
  cmd_cmp->add_option("--seed", cmp.seed, "Contamination / sampling seed")
      ->capture_default_str();
  cmd_cmp->add_flag("--sweep-eccentricity", sweep_ecc,
                    "Run the ellipse eccentricity x step-size sweep instead");
  cmd_cmp->add_option("--points", sweep.canvas_points, "Sweep canvas point count")
      ->capture_default_str();
  cmd_cmp->add_option("--noise", sweep.noise, "Sweep noise half-width [pix]")
      ->capture_default_str();
  cmd_cmp->add_option("--sweep-depth", sweep.cam.depth, "Sweep camera height [m]")
      ->capture_default_str();
  {
    SolverConfig& cfg = cmp.solver;
    cmd_cmp->add_option("--epsilon", cmp.epsilon, "Inlier threshold [pix]")
        ->capture_default_str();
    cmd_cmp->add_option("--domain-phi", cmp_phi.text, "Search domain lo:hi [rad]");
    cmd_cmp->add_option("--domain-rho", cmp_rho.text, "Search domain lo:hi [m]");
    cmd_cmp->add_option("--jobs", cmp_jobs, "Max concurrently evaluated intervals")
        ->capture_default_str();
    (void)cfg;
  }

  // --- bench -----------------------------------------------------------------
  std::string bench_data, bench_out;
  SolveOptions bench_opts;
  DomainFlag bench_phi, bench_rho;
  int bench_jobs = 0;
  bool bench_no_warm = false;
  auto* cmd_bench = app.add_subcommand("bench", "Per-pair timing over a dataset");
  cmd_bench->add_option("--data", bench_data, "Dataset directory")->required();
  cmd_bench->add_option("--out", bench_out, "Output JSON (optional)");
  cmd_bench->add_flag("--no-warm-start", bench_no_warm, "Disable warm starting");
  add_solver_flags(cmd_bench, bench_opts.solver, bench_phi, bench_rho, bench_jobs);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (cmd_sim->parsed()) {
      sim.traj.kind = traj_kind == "circle" ? TrajectoryKind::circular
                                            : TrajectoryKind::elliptical;
      if (sim.traj.kind == TrajectoryKind::circular) sim.traj.semi_b = sim.traj.semi_a;
      sim.extent_y = sim.extent_x;
      run_simulate(sim, sim_out);
      std::printf("dataset: %s (%d frames, %d canvas points, seed %llu)\n", sim_out.c_str(),
                  sim.traj.frames(), sim.canvas_points,
                  static_cast<unsigned long long>(sim.seed));
      return 0;
    }

    if (cmd_sol->parsed()) {
      if (const int rc = apply_domains(sol_phi, sol_rho, sol.solver)) return rc;
      sol.warm_start = !no_warm;
      sol.solver.parallel_width = sol_jobs;
      const SolveRun run = run_solve(sol_data, sol_out, sol);
      std::printf("%zu pairs in %.2f s, trajectory: %s/trajectory.csv\n", run.records.size(),
                  run.wall_time, sol_out.c_str());
      if (sol.oracle_check && !run.oracle_ok) {
        std::fprintf(stderr, "error: grid oracle exceeded the solver objective\n");
        return 1;
      }
      return 0;
    }

    if (cmd_eval->parsed()) {
      const EvalResult res = run_eval(eval_data, eval_est, eval_out, eval_delta);
      std::printf("RPE mean %.6f m (rmse %.6f), ATE rmse %.6f m -> %s\n",
                  res.rpe.translation_mean, res.rpe.translation_rmse, res.ate.rmse,
                  eval_out.c_str());
      return 0;
    }

    if (cmd_cmp->parsed()) {
      if (sweep_ecc) {
        const auto rows = eccentricity_sweep(sweep);
        std::filesystem::create_directories(cmp_out);
        write_sweep_csv(rows, std::filesystem::path(cmp_out) / "sweep_eccentricity.csv");
        std::printf("%zu sweep rows -> %s/sweep_eccentricity.csv\n", rows.size(),
                    cmp_out.c_str());
        return 0;
      }
      if (cmp_data.empty()) {
        std::fprintf(stderr, "error: --data is required unless --sweep-eccentricity\n");
        return 2;
      }
      if (const int rc = apply_domains(cmp_phi, cmp_rho, cmp.solver)) return rc;
      cmp.solver.parallel_width = cmp_jobs;
      cmp.solver.epsilon = cmp.epsilon;
      const CompareRun run = run_compare(cmp_data, cmp_out, cmp);
      std::printf("govo:   RPE %.4f m, ATE %.4f m\nransac: RPE %.4f m, ATE %.4f m (%d failures)\n",
                  run.consensus.rpe_mean, run.consensus.ate_rmse, run.ransac.rpe_mean,
                  run.ransac.ate_rmse, run.ransac.failures);
      return 0;
    }

    if (cmd_bench->parsed()) {
      if (const int rc = apply_domains(bench_phi, bench_rho, bench_opts.solver)) return rc;
      bench_opts.warm_start = !bench_no_warm;
      bench_opts.solver.parallel_width = bench_jobs;
      const std::optional<std::filesystem::path> out =
          bench_out.empty() ? std::nullopt
                            : std::optional<std::filesystem::path>(bench_out);
      const BenchResult res = run_bench(bench_data, out, bench_opts);
      std::printf("pairs %zu, max features %d\n", res.pair_ms.size(), res.max_features);
      std::printf("per-pair solve: P50 %.2f ms, P95 %.2f ms, mean %.2f ms\n", res.p50,
                  res.p95, res.mean);
      return 0;
    }
  } catch (const DatasetError& e) {
    std::fprintf(stderr, "dataset error: %s\n", e.what());
    return 3;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
