#pragma once

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include "govo/geometry.hpp"
#include "govo/metrics.hpp"
#include "govo/simulate.hpp"

namespace govo {

// Raised when a dataset directory is missing or malformed; the CLI maps it
// to its own exit code.
struct DatasetError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct DatasetMeta {
  int format_version = 1;
  std::string rng = "splitmix64";
  std::uint64_t seed = 0;
  CameraModel camera;
  std::string trajectory_kind = "circle";  // circle | ellipse | scripted
  double semi_a = 1.0;
  double semi_b = 1.0;
  double step_deg = 10.0;
  int frames = 0;
  int canvas_points = 0;
  double extent_x = 4.0;
  double extent_y = 4.0;
  double noise_half_width = 2.5;
};

// In-memory dataset: what simulate produces and solve/compare consume.
// gt_motions[k] is the motion from frame k to k+1; the final entry is zero.
struct Dataset {
  DatasetMeta meta;
  Canvas canvas;
  std::vector<Observation> observations;
  std::vector<Pose2D> gt_poses;
  std::vector<MotionParams> gt_motions;
  std::vector<double> gt_residuals;  // arc-model violation per step

  Trajectory ground_truth_trajectory() const;
};

// Dataset directory layout:
//   meta.json
//   canvas.csv          id,x,y           (metres)
//   frames/NNNN.csv     id,u,v           (pixels)
//   groundtruth.csv     frame,x,y,heading,phi,rho
// CSV files carry a header row, UTF-8, '.' decimal separator, %.17g floats.
void write_dataset(const Dataset& ds, const std::filesystem::path& dir);
Dataset load_dataset(const std::filesystem::path& dir);

// Estimated trajectory CSV: frame,x,y,heading.
void write_trajectory_csv(const Trajectory& traj, const std::filesystem::path& file);
Trajectory load_trajectory_csv(const std::filesystem::path& file);

std::string format_double(double v);  // shortest round-trippable decimal

}  // namespace govo
