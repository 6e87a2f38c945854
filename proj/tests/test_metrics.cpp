#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Dense>
#include <Eigen/Geometry>
#include <cmath>

#include "govo/metrics.hpp"
#include "govo/rng.hpp"

using namespace govo;

namespace {

Trajectory random_walk(SplitMix64& rng, int n) {
  Trajectory t;
  Pose2D pose{rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0), rng.uniform(-kPi, kPi)};
  for (int k = 0; k < n; ++k) {
    t.frames.push_back(k);
    t.poses.push_back(pose);
    pose = integrate_motion(pose, {rng.uniform(-0.1, 0.1), rng.uniform(0.0, 0.2)});
  }
  return t;
}

Trajectory rigidly_transformed(const Trajectory& t, double angle, double tx, double ty) {
  Trajectory out;
  const double c = std::cos(angle), s = std::sin(angle);
  for (std::size_t k = 0; k < t.size(); ++k) {
    out.frames.push_back(t.frames[k]);
    out.poses.push_back({c * t.poses[k].x - s * t.poses[k].y + tx,
                         s * t.poses[k].x + c * t.poses[k].y + ty,
                         normalize_angle(t.poses[k].heading + angle)});
  }
  return out;
}

Eigen::Isometry2d to_isometry(const Pose2D& p) {
  return Eigen::Translation2d(p.x, p.y) * Eigen::Rotation2Dd(p.heading);
}

}  // namespace

TEST_CASE("identical trajectories score zero") {
  SplitMix64 rng(1);
  const Trajectory t = random_walk(rng, 30);
  const RpeResult r = rpe(t, t, 1);
  CHECK(r.translation_mean == doctest::Approx(0.0));
  CHECK(r.rotation_mean == doctest::Approx(0.0));
  const AteResult a = ate(t, t);
  CHECK(a.rmse < 1e-12);
}

TEST_CASE("uniform 1 mm per-step inflation gives exactly 1 mm mean RPE") {
  Trajectory gt, est;
  for (int k = 0; k < 20; ++k) {
    gt.frames.push_back(k);
    gt.poses.push_back({0.1 * k, 0.0, 0.0});
    est.frames.push_back(k);
    est.poses.push_back({0.101 * k, 0.0, 0.0});
  }
  const RpeResult r = rpe(est, gt, 1);
  CHECK(r.translation_mean == doctest::Approx(0.001).epsilon(1e-12));
  CHECK(r.translation_rmse == doctest::Approx(0.001).epsilon(1e-12));
  CHECK(r.rotation_mean == doctest::Approx(0.0));
}

TEST_CASE("rpe matches an independent SE(2) composition oracle") {
  SplitMix64 rng(2);
  for (int trial = 0; trial < 20; ++trial) {
    const Trajectory est = random_walk(rng, 25);
    const Trajectory gt = random_walk(rng, 25);
    for (int delta : {1, 3}) {
      const RpeResult r = rpe(est, gt, delta);
      double sum = 0.0;
      int n = 0;
      for (std::size_t k = 0; k + delta < est.size(); ++k) {
        const Eigen::Isometry2d rel_est =
            to_isometry(est.poses[k]).inverse() * to_isometry(est.poses[k + delta]);
        const Eigen::Isometry2d rel_gt =
            to_isometry(gt.poses[k]).inverse() * to_isometry(gt.poses[k + delta]);
        const Eigen::Isometry2d err = rel_gt.inverse() * rel_est;
        sum += err.translation().norm();
        CHECK(r.per_step_translation[k] == doctest::Approx(err.translation().norm()).epsilon(1e-12));
        ++n;
      }
      CHECK(r.translation_mean == doctest::Approx(sum / n).epsilon(1e-12));
    }
  }
}

TEST_CASE("rpe is invariant to independent rigid transforms of either input") {
  SplitMix64 rng(3);
  const Trajectory est = random_walk(rng, 20);
  const Trajectory gt = random_walk(rng, 20);
  const RpeResult base = rpe(est, gt, 1);
  const RpeResult moved =
      rpe(rigidly_transformed(est, 1.1, 3.0, -2.0), rigidly_transformed(gt, -0.7, 0.5, 9.0), 1);
  CHECK(moved.translation_mean == doctest::Approx(base.translation_mean).epsilon(1e-9));
  CHECK(moved.rotation_mean == doctest::Approx(base.rotation_mean).epsilon(1e-9));
}

TEST_CASE("ate removes global rigid offsets entirely") {
  SplitMix64 rng(4);
  const Trajectory gt = random_walk(rng, 40);
  const Trajectory est = rigidly_transformed(gt, 0.8, -4.0, 2.5);
  const AteResult a = ate(est, gt);
  CHECK(a.rmse < 1e-9);
  CHECK(a.mean < 1e-9);
}

TEST_CASE("ate matches the umeyama alignment oracle") {
  SplitMix64 rng(5);
  for (int trial = 0; trial < 20; ++trial) {
    const Trajectory gt = random_walk(rng, 30);
    Trajectory est = rigidly_transformed(gt, rng.uniform(-2.0, 2.0), rng.uniform(-3.0, 3.0),
                                         rng.uniform(-3.0, 3.0));
    for (auto& p : est.poses) {
      p.x += rng.uniform(-0.05, 0.05);
      p.y += rng.uniform(-0.05, 0.05);
    }

    Eigen::MatrixXd src(2, est.size()), dst(2, est.size());
    for (std::size_t k = 0; k < est.size(); ++k) {
      src.col(k) = Eigen::Vector2d(est.poses[k].x, est.poses[k].y);
      dst.col(k) = Eigen::Vector2d(gt.poses[k].x, gt.poses[k].y);
    }
    const Eigen::Matrix3d T = Eigen::umeyama(src, dst, false);
    double sum2 = 0.0;
    for (std::size_t k = 0; k < est.size(); ++k) {
      const Eigen::Vector3d aligned = T * Eigen::Vector3d(est.poses[k].x, est.poses[k].y, 1.0);
      sum2 += (dst.col(k) - aligned.head<2>()).squaredNorm();
    }
    const double expected_rmse = std::sqrt(sum2 / double(est.size()));
    CHECK(ate(est, gt).rmse == doctest::Approx(expected_rmse).epsilon(1e-9));
  }
}

TEST_CASE("single displaced pose among 100 yields centimetre-scale ATE") {
  Trajectory gt, est;
  for (int k = 0; k < 100; ++k) {
    const double angle = 2.0 * kPi * k / 100.0;
    gt.frames.push_back(k);
    gt.poses.push_back({std::cos(angle), std::sin(angle), 0.0});
    est.frames.push_back(k);
    est.poses.push_back(gt.poses.back());
  }
  est.poses[42].x += 0.1;  // 10 cm outlier
  const AteResult a = ate(est, gt);
  CHECK(a.rmse > 0.005);
  CHECK(a.rmse < 0.015);
}

TEST_CASE("metric preconditions are enforced") {
  Trajectory a, b;
  a.frames = {0, 1};
  a.poses = {{0, 0, 0}, {1, 0, 0}};
  b.frames = {0, 2};
  b.poses = a.poses;
  CHECK_THROWS_AS(rpe(a, b, 1), std::invalid_argument);
  CHECK_THROWS_AS(ate(a, b), std::invalid_argument);

  Trajectory one;
  one.frames = {0};
  one.poses = {{0, 0, 0}};
  CHECK_THROWS_AS(ate(one, one), std::invalid_argument);
  CHECK_THROWS_AS(rpe(a, a, 0), std::invalid_argument);
}
