#include "govo/dataset_io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace govo {

namespace fs = std::filesystem;
using nlohmann::json;

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

Trajectory Dataset::ground_truth_trajectory() const {
  Trajectory t;
  for (std::size_t k = 0; k < gt_poses.size(); ++k) {
    t.frames.push_back(int(k));
    t.poses.push_back(gt_poses[k]);
  }
  return t;
}

namespace {

std::ofstream open_out(const fs::path& file) {
  std::ofstream out(file, std::ios::binary);  // '\n' endings on all platforms
  if (!out) throw DatasetError("cannot write " + file.string());
  return out;
}

std::ifstream open_in(const fs::path& file) {
  std::ifstream in(file);
  if (!in) throw DatasetError("missing file " + file.string());
  return in;
}

std::vector<std::vector<std::string>> read_csv(const fs::path& file,
                                               std::size_t expected_cols) {
  std::ifstream in = open_in(file);
  std::vector<std::vector<std::string>> rows;
  std::string line;
  bool header = true;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (header) {
      header = false;
      continue;
    }
    std::vector<std::string> fields;
    std::stringstream ss(line);
    std::string field;
    while (std::getline(ss, field, ',')) fields.push_back(field);
    if (fields.size() != expected_cols) {
      throw DatasetError("bad row in " + file.string() + ": " + line);
    }
    rows.push_back(std::move(fields));
  }
  return rows;
}

std::string frame_file_name(int frame) {
  char buf[16];
  std::snprintf(buf, sizeof(buf), "%04d.csv", frame);
  return buf;
}

json camera_to_json(const CameraModel& cam) {
  return {{"focal", cam.focal},
          {"principal_u", cam.principal_u},
          {"principal_v", cam.principal_v},
          {"depth", cam.depth},
          {"image_width", cam.image_width},
          {"image_height", cam.image_height}};
}

CameraModel camera_from_json(const json& j) {
  CameraModel cam;
  cam.focal = j.at("focal");
  cam.principal_u = j.at("principal_u");
  cam.principal_v = j.at("principal_v");
  cam.depth = j.at("depth");
  cam.image_width = j.at("image_width");
  cam.image_height = j.at("image_height");
  return cam;
}

}  // namespace

void write_dataset(const Dataset& ds, const fs::path& dir) {
  fs::create_directories(dir / "frames");

  {
    json meta;
    meta["format_version"] = ds.meta.format_version;
    meta["rng"] = ds.meta.rng;
    meta["seed"] = ds.meta.seed;
    meta["camera"] = camera_to_json(ds.meta.camera);
    meta["trajectory"] = {{"kind", ds.meta.trajectory_kind},
                          {"semi_a", ds.meta.semi_a},
                          {"semi_b", ds.meta.semi_b},
                          {"step_deg", ds.meta.step_deg},
                          {"frames", ds.meta.frames}};
    meta["canvas"] = {{"points", ds.meta.canvas_points},
                      {"extent_x", ds.meta.extent_x},
                      {"extent_y", ds.meta.extent_y}};
    meta["noise_half_width"] = ds.meta.noise_half_width;
    std::ofstream out = open_out(dir / "meta.json");
    out << meta.dump(2) << "\n";
  }

  {
    std::ofstream out = open_out(dir / "canvas.csv");
    out << "id,x,y\n";
    for (std::size_t i = 0; i < ds.canvas.points.size(); ++i) {
      out << i << ',' << format_double(ds.canvas.points[i].x()) << ','
          << format_double(ds.canvas.points[i].y()) << '\n';
    }
  }

  for (const Observation& obs : ds.observations) {
    std::ofstream out = open_out(dir / "frames" / frame_file_name(obs.frame));
    out << "id,u,v\n";
    for (std::size_t k = 0; k < obs.pixels.size(); ++k) {
      out << obs.ids[k] << ',' << format_double(obs.pixels[k].x()) << ','
          << format_double(obs.pixels[k].y()) << '\n';
    }
  }

  {
    std::ofstream out = open_out(dir / "groundtruth.csv");
    out << "frame,x,y,heading,phi,rho\n";
    for (std::size_t k = 0; k < ds.gt_poses.size(); ++k) {
      const MotionParams m = k < ds.gt_motions.size() ? ds.gt_motions[k] : MotionParams{};
      out << k << ',' << format_double(ds.gt_poses[k].x) << ','
          << format_double(ds.gt_poses[k].y) << ',' << format_double(ds.gt_poses[k].heading)
          << ',' << format_double(m.phi) << ',' << format_double(m.rho) << '\n';
    }
  }
}

Dataset load_dataset(const fs::path& dir) {
  if (!fs::exists(dir / "meta.json")) throw DatasetError("no dataset at " + dir.string());

  Dataset ds;
  {
    std::ifstream in = open_in(dir / "meta.json");
    json meta = json::parse(in);
    ds.meta.format_version = meta.value("format_version", 1);
    ds.meta.rng = meta.value("rng", "splitmix64");
    ds.meta.seed = meta.value("seed", std::uint64_t(0));
    ds.meta.camera = camera_from_json(meta.at("camera"));
    const json& traj = meta.at("trajectory");
    ds.meta.trajectory_kind = traj.value("kind", "circle");
    ds.meta.semi_a = traj.value("semi_a", 1.0);
    ds.meta.semi_b = traj.value("semi_b", 1.0);
    ds.meta.step_deg = traj.value("step_deg", 10.0);
    ds.meta.frames = traj.value("frames", 0);
    const json& canvas = meta.at("canvas");
    ds.meta.canvas_points = canvas.value("points", 0);
    ds.meta.extent_x = canvas.value("extent_x", 4.0);
    ds.meta.extent_y = canvas.value("extent_y", 4.0);
    ds.meta.noise_half_width = meta.value("noise_half_width", 2.5);
  }

  if (fs::exists(dir / "canvas.csv")) {
    for (const auto& row : read_csv(dir / "canvas.csv", 3)) {
      ds.canvas.points.emplace_back(std::stod(row[1]), std::stod(row[2]));
    }
    ds.canvas.extent_x = ds.meta.extent_x;
    ds.canvas.extent_y = ds.meta.extent_y;
    ds.canvas.seed = ds.meta.seed;
  }

  for (const auto& row : read_csv(dir / "groundtruth.csv", 6)) {
    ds.gt_poses.push_back({std::stod(row[1]), std::stod(row[2]), std::stod(row[3])});
    ds.gt_motions.push_back({std::stod(row[4]), std::stod(row[5])});
  }

  for (int frame = 0; frame < int(ds.gt_poses.size()); ++frame) {
    const fs::path file = dir / "frames" / frame_file_name(frame);
    if (!fs::exists(file)) throw DatasetError("missing frame " + file.string());
    Observation obs;
    obs.frame = frame;
    obs.pose = ds.gt_poses[frame];
    for (const auto& row : read_csv(file, 3)) {
      obs.ids.push_back(std::stoi(row[0]));
      obs.pixels.emplace_back(std::stod(row[1]), std::stod(row[2]));
    }
    ds.observations.push_back(std::move(obs));
  }
  return ds;
}

void write_trajectory_csv(const Trajectory& traj, const fs::path& file) {
  std::ofstream out = open_out(file);
  out << "frame,x,y,heading\n";
  for (std::size_t k = 0; k < traj.size(); ++k) {
    out << traj.frames[k] << ',' << format_double(traj.poses[k].x) << ','
        << format_double(traj.poses[k].y) << ',' << format_double(traj.poses[k].heading)
        << '\n';
  }
}

Trajectory load_trajectory_csv(const fs::path& file) {
  Trajectory traj;
  for (const auto& row : read_csv(file, 4)) {
    traj.frames.push_back(std::stoi(row[0]));
    traj.poses.push_back({std::stod(row[1]), std::stod(row[2]), std::stod(row[3])});
  }
  return traj;
}

}  // namespace govo
