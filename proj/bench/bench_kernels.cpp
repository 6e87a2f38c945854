// Micro-benchmark of the data-parallel kernels against their serial
// reference implementations: level-synchronous bound evaluation (OpenMP vs
// serial) and the indexed consensus objective vs the naive double loop.
// Results are verified for equality before timings are reported.

#include <chrono>
#include <cstdio>
#include <string>
#include <vector>

#include "govo/bounds.hpp"
#include "govo/rng.hpp"
#include "govo/solver.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

using namespace govo;

namespace {

double now_seconds() {
  return std::chrono::duration<double>(
             std::chrono::steady_clock::now().time_since_epoch())
      .count();
}

struct Workload {
  PointSet p1, p2;
  CameraModel cam;
  RangeIndex index;
  std::vector<MotionInterval> intervals;
};

Workload make_workload(int points, int intervals_per_axis) {
  Workload w;
  SplitMix64 rng(2024);
  w.cam.focal = 500.0;
  w.cam.depth = 0.2;
  const MotionParams truth{0.04, 0.03};
  for (int i = 0; i < points; ++i) {
    w.p2.emplace_back(rng.uniform(0.0, 640.0), rng.uniform(0.0, 480.0));
    const Eigen::Vector2d t = transfer_point(w.p2.back(), truth, w.cam);
    w.p1.emplace_back(t.x() + rng.uniform(-2.5, 2.5), t.y() + rng.uniform(-2.5, 2.5));
  }
  w.index = RangeIndex(w.p1, 5.0);

  // One full level of a uniform subdivision of the right-turn domain.
  const double phi_hi = kPi / 4.0, rho_hi = 0.096;
  const int n = intervals_per_axis;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      w.intervals.push_back({phi_hi * i / n, phi_hi * (i + 1) / n, rho_hi * j / n,
                             rho_hi * (j + 1) / n, 0});
    }
  }
  return w;
}

int brute_objective(const Workload& w, const MotionParams& m, double eps) {
  int count = 0;
  const double eps2 = eps * eps;
  for (const auto& q : w.p2) {
    const Eigen::Vector2d t = transfer_point(q, m, w.cam);
    for (const auto& p : w.p1) {
      if ((p - t).squaredNorm() < eps2) ++count;
    }
  }
  return count;
}

}  // namespace

int main(int argc, char** argv) {
  int repeats = 5;
  if (argc > 1) repeats = std::max(1, std::atoi(argv[1]));

#ifdef _OPENMP
  const int hw = omp_get_max_threads();
#else
  const int hw = 1;
#endif
  std::printf("kernel benchmark (%d hardware threads, %d repeats)\n\n", hw, repeats);

  {
    const Workload w = make_workload(200, 32);  // 1024 intervals per level
    const ConsensusObjective obj{&w.p1, &w.p2, w.cam, 2.5, &w.index};

    const double t0 = now_seconds();
    std::vector<BoundResult> serial;
    for (int r = 0; r < repeats; ++r) serial = evaluate_level_serial(w.intervals, obj, w.index);
    const double serial_ms = (now_seconds() - t0) * 1000.0 / repeats;

    std::printf("level evaluation, %zu intervals, %zu+%zu points\n", w.intervals.size(),
                w.p1.size(), w.p2.size());
    std::printf("  %-14s %8.2f ms\n", "serial", serial_ms);
    for (const int jobs : {1, 2, 4, hw}) {
      const double t1 = now_seconds();
      std::vector<BoundResult> parallel;
      for (int r = 0; r < repeats; ++r) parallel = evaluate_level(w.intervals, obj, w.index, jobs);
      const double par_ms = (now_seconds() - t1) * 1000.0 / repeats;
      const bool ok = parallel == serial;
      std::printf("  %-2d %-11s %8.2f ms   %5.2fx   %s\n", jobs, "jobs", par_ms,
                  serial_ms / par_ms, ok ? "bit-identical" : "MISMATCH");
      if (!ok) return 1;
    }
  }

  std::printf("\nconsensus objective, indexed vs naive double loop\n");
  for (const int n : {50, 200, 800}) {
    const Workload w = make_workload(n, 1);
    const ConsensusObjective obj{&w.p1, &w.p2, w.cam, 2.5, &w.index};
    SplitMix64 rng(99);
    std::vector<MotionParams> probes;
    for (int i = 0; i < 200; ++i) {
      probes.push_back({rng.uniform(0.0, 0.2), rng.uniform(0.0, 0.09)});
    }

    long sum_idx = 0, sum_brute = 0;
    const double t0 = now_seconds();
    for (int r = 0; r < repeats; ++r) {
      for (const auto& m : probes) sum_idx += obj.evaluate(m);
    }
    const double idx_us = (now_seconds() - t0) * 1e6 / (repeats * probes.size());
    const double t1 = now_seconds();
    for (int r = 0; r < repeats; ++r) {
      for (const auto& m : probes) sum_brute += brute_objective(w, m, 2.5);
    }
    const double brute_us = (now_seconds() - t1) * 1e6 / (repeats * probes.size());
    std::printf("  n=%-4d  indexed %8.2f us   naive %8.2f us   %5.1fx   %s\n", n, idx_us,
                brute_us, brute_us / idx_us, sum_idx == sum_brute ? "equal" : "MISMATCH");
    if (sum_idx != sum_brute) return 1;
  }
  return 0;
}
