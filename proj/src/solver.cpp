#include "govo/solver.hpp"

#include <algorithm>
#include <cassert>
#include <chrono>
#include <cmath>
#include <numeric>
#include <stdexcept>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace govo {

namespace {

struct ConvergedEntry {
  MotionInterval iv;
  int lower = 0;
  std::vector<std::pair<int, int>> pairs;
};

struct SearchOutcome {
  int best = 0;
  bool have_witness = false;
  MotionParams witness;
  std::vector<std::pair<int, int>> witness_pairs;
  std::vector<ConvergedEntry> winners;  // converged, lower == best
  int levels = 0;
  std::int64_t expanded = 0;
  std::int64_t pruned = 0;
  std::int64_t nodes = 0;
  bool certified = true;
  int max_discarded_upper = 0;
};

bool interval_less(const MotionInterval& a, const MotionInterval& b) {
  if (a.phi_lo != b.phi_lo) return a.phi_lo < b.phi_lo;
  if (a.rho_lo != b.rho_lo) return a.rho_lo < b.rho_lo;
  if (a.phi_hi != b.phi_hi) return a.phi_hi < b.phi_hi;
  return a.rho_hi < b.rho_hi;
}

bool at_floor(const MotionInterval& iv, const SolverConfig& cfg) {
  return iv.phi_width() <= cfg.min_phi_width && iv.rho_width() <= cfg.min_rho_width;
}

std::vector<MotionInterval> make_roots(double phi_lo, double phi_hi, double rho_lo,
                                       double rho_hi) {
  std::vector<MotionInterval> roots;
  if (phi_lo < 0.0 && phi_hi > 0.0) {
    roots.push_back({phi_lo, 0.0, rho_lo, rho_hi, 0});
    roots.push_back({0.0, phi_hi, rho_lo, rho_hi, 0});
  } else {
    roots.push_back({phi_lo, phi_hi, rho_lo, rho_hi, 0});
  }
  return roots;
}

SearchOutcome run_search(std::vector<MotionInterval> active, const ConsensusObjective& obj,
                         const RangeIndex& idx, const SolverConfig& cfg) {
  SearchOutcome out;
  std::vector<MotionInterval> next;

  while (!active.empty()) {
    std::sort(active.begin(), active.end(), interval_less);
    const std::vector<BoundResult> results =
        evaluate_level(active, obj, idx, cfg.parallel_width);
    out.nodes += std::int64_t(active.size());
    ++out.levels;

    // Best lower bound first (ties keep the lexicographically first witness).
    bool best_grew = false;
    for (size_t k = 0; k < active.size(); ++k) {
      if (!out.have_witness || results[k].lower > out.best) {
        best_grew = out.have_witness && results[k].lower > out.best;
        out.best = results[k].lower;
        out.witness = active[k].center();
        out.witness_pairs = results[k].center_pairs;
        out.have_witness = true;
      }
    }
    if (best_grew) {
      std::erase_if(out.winners,
                    [&](const ConvergedEntry& e) { return e.lower < out.best; });
    }

    next.clear();
    std::vector<const MotionInterval*> expandable;
    std::vector<const BoundResult*> expandable_bounds;
    for (size_t k = 0; k < active.size(); ++k) {
      const bool converged = results[k].converged || at_floor(active[k], cfg);
      if (converged) {
        if (results[k].lower == out.best) {
          out.winners.push_back({active[k], results[k].lower, results[k].center_pairs});
        }
        continue;
      }
      if (results[k].upper < out.best) {
        ++out.pruned;
        out.max_discarded_upper = std::max(out.max_discarded_upper, results[k].upper);
        continue;
      }
      // upper == best intervals stay in: they may hold ties of the optimum
      // whose centres have not been sampled yet.
      expandable.push_back(&active[k]);
      expandable_bounds.push_back(&results[k]);
    }

    if (expandable.empty()) break;

    if (out.levels >= cfg.max_levels || out.nodes >= cfg.node_budget) {
      for (const BoundResult* r : expandable_bounds) {
        ++out.pruned;
        out.max_discarded_upper = std::max(out.max_discarded_upper, r->upper);
        if (r->upper > out.best) out.certified = false;  // budget cut only
      }
      break;
    }

    for (const MotionInterval* iv : expandable) {
      ++out.expanded;
      for (const MotionInterval& child : branch(*iv, cfg.min_phi_width, cfg.min_rho_width)) {
        next.push_back(child);
      }
    }
    active.swap(next);
  }
  return out;
}

// Union-find clustering of the winning intervals; intervals touching within
// one resolution step are one mode.
std::vector<std::vector<int>> cluster_winners(const std::vector<ConvergedEntry>& winners,
                                              const SolverConfig& cfg) {
  const int n = int(winners.size());
  std::vector<int> parent(n);
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](int a) {
    while (parent[a] != a) a = parent[a] = parent[parent[a]];
    return a;
  };
  const double tol_phi = cfg.min_phi_width;
  const double tol_rho = cfg.min_rho_width;
  for (int a = 0; a < n; ++a) {
    for (int b = a + 1; b < n; ++b) {
      const MotionInterval& A = winners[a].iv;
      const MotionInterval& B = winners[b].iv;
      const bool touch = A.phi_lo - tol_phi <= B.phi_hi && B.phi_lo - tol_phi <= A.phi_hi &&
                         A.rho_lo - tol_rho <= B.rho_hi && B.rho_lo - tol_rho <= A.rho_hi;
      if (touch) parent[find(a)] = find(b);
    }
  }
  std::vector<std::vector<int>> clusters;
  std::vector<int> root_to_cluster(n, -1);
  for (int a = 0; a < n; ++a) {
    const int r = find(a);
    if (root_to_cluster[r] < 0) {
      root_to_cluster[r] = int(clusters.size());
      clusters.emplace_back();
    }
    clusters[root_to_cluster[r]].push_back(a);
  }
  // Largest first; ties resolved by the lexicographically first member
  // (winners arrive sorted by construction order, which follows the
  // deterministic level ordering).
  std::sort(clusters.begin(), clusters.end(),
            [&](const std::vector<int>& x, const std::vector<int>& y) {
              if (x.size() != y.size()) return x.size() > y.size();
              return interval_less(winners[x.front()].iv, winners[y.front()].iv);
            });
  return clusters;
}

double pair_cost(const std::vector<std::pair<int, int>>& pairs, const MotionParams& m,
                 const CameraModel& cam, const PointSet& p1, const PointSet& p2) {
  double cost = 0.0;
  for (const auto& [i, j] : pairs) {
    const Eigen::Vector2d t = transfer_point(p2[j], m, cam);
    cost += (p1[i] - t).squaredNorm();
  }
  return cost;
}

Estimate package(const SearchOutcome& sr, const ConsensusObjective& obj,
                 const SolverConfig& cfg, const MotionParams& domain_center) {
  const PointSet& p1 = *obj.p1;
  const PointSet& p2 = *obj.p2;

  Estimate est;
  est.objective_value = sr.best;
  est.levels_used = sr.levels;
  est.intervals_expanded = sr.expanded;
  est.intervals_pruned = sr.pruned;
  est.certified = sr.certified;
  est.max_discarded_upper = sr.max_discarded_upper;
  est.witness_motion = sr.have_witness ? sr.witness : domain_center;

  if (sr.best <= 0) {
    est.degenerate = true;
    est.raw_motion = domain_center;
    est.motion = domain_center;
    est.cluster_count = 0;
    return est;
  }

  MotionParams raw;
  std::vector<std::pair<int, int>> merged;
  std::optional<MotionInterval> clamp;

  if (!sr.winners.empty()) {
    const auto clusters = cluster_winners(sr.winners, cfg);
    est.cluster_count = int(clusters.size());
    est.multi_modal = clusters.size() > 1;
    for (const auto& cluster : clusters) {
      MotionParams c{0.0, 0.0};
      for (int k : cluster) {
        const MotionParams ck = sr.winners[k].iv.center();
        c.phi += ck.phi;
        c.rho += ck.rho;
      }
      c.phi /= double(cluster.size());
      c.rho /= double(cluster.size());
      est.cluster_centers.push_back(c);
    }
    raw = est.cluster_centers.front();

    MotionInterval box = sr.winners[clusters.front().front()].iv;
    for (int k : clusters.front()) {
      const MotionInterval& iv = sr.winners[k].iv;
      box.phi_lo = std::min(box.phi_lo, iv.phi_lo);
      box.phi_hi = std::max(box.phi_hi, iv.phi_hi);
      box.rho_lo = std::min(box.rho_lo, iv.rho_lo);
      box.rho_hi = std::max(box.rho_hi, iv.rho_hi);
      for (const auto& pr : sr.winners[k].pairs) merged.push_back(pr);
    }
    box.phi_lo -= cfg.min_phi_width;
    box.phi_hi += cfg.min_phi_width;
    box.rho_lo = std::max(0.0, box.rho_lo - cfg.min_rho_width);
    box.rho_hi += cfg.min_rho_width;
    clamp = box;
  } else {
    // The witness interval was split before converging; fall back to the
    // recorded best centre.
    raw = sr.witness;
    merged = sr.witness_pairs;
    est.cluster_count = 1;
    est.cluster_centers.push_back(raw);
    clamp = MotionInterval{raw.phi - cfg.min_phi_width, raw.phi + cfg.min_phi_width,
                           std::max(0.0, raw.rho - cfg.min_rho_width),
                           raw.rho + cfg.min_rho_width, 0};
  }
  est.raw_motion = raw;

  std::sort(merged.begin(), merged.end());
  merged.erase(std::unique(merged.begin(), merged.end()), merged.end());

  // One-to-one reduction by ascending transfer distance at the raw motion:
  // duplicated points would be double-counted by the least-squares step.
  struct Scored {
    double d2;
    int i, j;
  };
  std::vector<Scored> scored;
  scored.reserve(merged.size());
  for (const auto& [i, j] : merged) {
    const Eigen::Vector2d t = transfer_point(p2[j], raw, obj.cam);
    scored.push_back({(p1[i] - t).squaredNorm(), i, j});
  }
  std::sort(scored.begin(), scored.end(), [](const Scored& a, const Scored& b) {
    if (a.d2 != b.d2) return a.d2 < b.d2;
    if (a.i != b.i) return a.i < b.i;
    return a.j < b.j;
  });
  std::vector<char> used_i(p1.size(), 0), used_j(p2.size(), 0);
  std::vector<std::pair<int, int>> reduced;
  for (const Scored& s : scored) {
    if (used_i[s.i] || used_j[s.j]) continue;
    used_i[s.i] = used_j[s.j] = 1;
    reduced.emplace_back(s.i, s.j);
  }
  std::sort(reduced.begin(), reduced.end());
  est.correspondences = std::move(reduced);

  const RefineResult rr = refine(est.correspondences, raw, obj.cam, p1, p2, clamp);
  est.motion = rr.motion;
  return est;
}

}  // namespace

std::vector<MotionInterval> branch(const MotionInterval& iv, double min_phi_width,
                                   double min_rho_width) {
  const bool split_phi = iv.phi_width() > min_phi_width;
  const bool split_rho = iv.rho_width() > min_rho_width;
  assert(split_phi || split_rho);

  const double phi_mid = 0.5 * (iv.phi_lo + iv.phi_hi);
  const double rho_mid = 0.5 * (iv.rho_lo + iv.rho_hi);
  const int d = iv.depth + 1;

  std::vector<MotionInterval> children;
  if (split_phi && split_rho) {
    children = {{iv.phi_lo, phi_mid, iv.rho_lo, rho_mid, d},
                {iv.phi_lo, phi_mid, rho_mid, iv.rho_hi, d},
                {phi_mid, iv.phi_hi, iv.rho_lo, rho_mid, d},
                {phi_mid, iv.phi_hi, rho_mid, iv.rho_hi, d}};
  } else if (split_phi) {
    children = {{iv.phi_lo, phi_mid, iv.rho_lo, iv.rho_hi, d},
                {phi_mid, iv.phi_hi, iv.rho_lo, iv.rho_hi, d}};
  } else {
    children = {{iv.phi_lo, iv.phi_hi, iv.rho_lo, rho_mid, d},
                {iv.phi_lo, iv.phi_hi, rho_mid, iv.rho_hi, d}};
  }
  return children;
}

RefineResult refine(const std::vector<std::pair<int, int>>& correspondences,
                    const MotionParams& init, const CameraModel& cam, const PointSet& p1,
                    const PointSet& p2, const std::optional<MotionInterval>& clamp) {
  RefineResult res;
  res.motion = init;
  if (correspondences.empty()) {
    res.insufficient = true;
    return res;
  }

  const double s = cam.scale();
  const double u0 = cam.principal_u;
  const double v0 = cam.principal_v;

  auto clamp_params = [&](MotionParams m) {
    m.phi = std::clamp(m.phi, -kPi / 2.0, kPi / 2.0);
    m.rho = std::max(m.rho, 0.0);
    if (clamp) {
      m.phi = std::clamp(m.phi, clamp->phi_lo, clamp->phi_hi);
      m.rho = std::clamp(m.rho, clamp->rho_lo, clamp->rho_hi);
    }
    return m;
  };

  auto cost_at = [&](const MotionParams& m) {
    return pair_cost(correspondences, m, cam, p1, p2);
  };

  MotionParams m = clamp_params(init);
  double cost = cost_at(m);
  res.initial_cost = cost;

  double lambda = 1e-6;
  for (int it = 0; it < 100; ++it) {
    const double c2 = std::cos(2.0 * m.phi);
    const double s2 = std::sin(2.0 * m.phi);
    const double cp = std::cos(m.phi);
    const double sp = std::sin(m.phi);

    // Normal equations of the transfer-error residuals, 2x2.
    double a00 = 0.0, a01 = 0.0, a11 = 0.0, g0 = 0.0, g1 = 0.0;
    for (const auto& [i, j] : correspondences) {
      const double cx = p2[j].x() - u0;
      const double cy = p2[j].y() - v0;
      const double tx = cx * c2 + (-cy) * s2 + s * (m.rho * sp) + u0;
      const double ty = cx * s2 + cy * c2 - s * (m.rho * cp) + v0;
      const double rx = tx - p1[i].x();
      const double ry = ty - p1[i].y();
      const Eigen::Matrix2d J = transfer_jacobian(p2[j], m, cam);
      a00 += J(0, 0) * J(0, 0) + J(1, 0) * J(1, 0);
      a01 += J(0, 0) * J(0, 1) + J(1, 0) * J(1, 1);
      a11 += J(0, 1) * J(0, 1) + J(1, 1) * J(1, 1);
      g0 += J(0, 0) * rx + J(1, 0) * ry;
      g1 += J(0, 1) * rx + J(1, 1) * ry;
    }

    bool accepted = false;
    for (int attempt = 0; attempt < 12; ++attempt) {
      const double d00 = a00 + lambda * (1.0 + a00);
      const double d11 = a11 + lambda * (1.0 + a11);
      const double det = d00 * d11 - a01 * a01;
      if (det == 0.0) {
        lambda = std::max(lambda * 10.0, 1e-9);
        continue;
      }
      const double dphi = -(d11 * g0 - a01 * g1) / det;
      const double drho = -(-a01 * g0 + d00 * g1) / det;
      const MotionParams trial = clamp_params({m.phi + dphi, m.rho + drho});
      const double trial_cost = cost_at(trial);
      if (trial_cost < cost) {
        const double improvement = cost - trial_cost;
        m = trial;
        cost = trial_cost;
        lambda = std::max(lambda / 3.0, 1e-12);
        accepted = true;
        ++res.iterations;
        if (improvement <= 1e-15 * (cost + 1e-30)) it = 100;  // converged
        break;
      }
      lambda *= 10.0;
      if (lambda > 1e12) break;
    }
    if (!accepted) break;
  }

  res.motion = m;
  res.final_cost = cost;
  return res;
}

WarmDomain warm_start_domain(const MotionParams& prev, const SolverConfig& cfg,
                             const CameraModel& cam) {
  WarmDomain wd;
  const double rho_hi = cfg.resolved_rho_hi(cam);
  double phi_lo = std::max(cfg.phi_lo, prev.phi - cfg.warm_margin_phi);
  double phi_hi = std::min(cfg.phi_hi, prev.phi + cfg.warm_margin_phi);
  double r_lo = std::max(cfg.rho_lo, prev.rho - cfg.warm_margin_rho);
  double r_hi = std::min(rho_hi, prev.rho + cfg.warm_margin_rho);
  if (phi_lo < phi_hi && r_lo < r_hi) {
    if (phi_lo < 0.0 && phi_hi > 0.0) {
      wd.phi_ranges = {{phi_lo, 0.0}, {0.0, phi_hi}};
    } else {
      wd.phi_ranges = {{phi_lo, phi_hi}};
    }
    wd.rho_range = {r_lo, r_hi};
  }
  return wd;
}

Estimate solve(const PointSet& p1, const PointSet& p2, const CameraModel& cam,
               const SolverConfig& cfg, const std::optional<MotionParams>& warm) {
  if (p1.empty() || p2.empty()) throw std::invalid_argument("no features");
  if (cfg.epsilon <= 0.0 || cfg.min_phi_width <= 0.0 || cfg.min_rho_width <= 0.0 ||
      cfg.max_levels < 1 || cfg.phi_lo >= cfg.phi_hi || cfg.rho_lo < 0.0) {
    throw std::invalid_argument("invalid solver config");
  }

  const auto t0 = std::chrono::steady_clock::now();

  const RangeIndex idx = build_range_index(p1, cfg.index_cell_factor * cfg.epsilon);
  const ConsensusObjective obj{&p1, &p2, cam, cfg.epsilon, &idx};

  const double rho_hi = cfg.resolved_rho_hi(cam);
  const MotionParams full_center{0.5 * (cfg.phi_lo + cfg.phi_hi),
                                 0.5 * (cfg.rho_lo + rho_hi)};

  auto run_full = [&]() {
    const SearchOutcome sr =
        run_search(make_roots(cfg.phi_lo, cfg.phi_hi, cfg.rho_lo, rho_hi), obj, idx, cfg);
    return package(sr, obj, cfg, full_center);
  };

  Estimate est;
  if (warm) {
    const WarmDomain wd = warm_start_domain(*warm, cfg, cam);
    if (!wd.phi_ranges.empty()) {
      std::vector<MotionInterval> roots;
      for (const auto& [lo, hi] : wd.phi_ranges) {
        roots.push_back({lo, hi, wd.rho_range.first, wd.rho_range.second, 0});
      }
      const MotionParams warm_center{
          0.5 * (wd.phi_ranges.front().first + wd.phi_ranges.back().second),
          0.5 * (wd.rho_range.first + wd.rho_range.second)};
      const SearchOutcome sr = run_search(std::move(roots), obj, idx, cfg);
      est = package(sr, obj, cfg, warm_center);
      est.warm_started = true;
      if (est.objective_value < cfg.min_consensus) {
        est = run_full();
        est.full_domain_fallback = true;
      }
    } else {
      est = run_full();
      est.full_domain_fallback = true;
    }
  } else {
    est = run_full();
  }

  est.solve_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return est;
}

GridResult grid_search(const PointSet& p1, const PointSet& p2, const CameraModel& cam,
                       const GridDomain& domain, double epsilon, int n_phi, int n_rho,
                       int jobs) {
  assert(std::int64_t(n_phi) * n_rho <= 1'000'000);
  const RangeIndex idx = build_range_index(p1, 2.0 * epsilon);
  const ConsensusObjective obj{&p1, &p2, cam, epsilon, &idx};

  const double dphi = (domain.phi_hi - domain.phi_lo) / n_phi;
  const double drho = (domain.rho_hi - domain.rho_lo) / n_rho;

  std::vector<int> row_best(n_phi, -1);
  std::vector<int> row_arg(n_phi, 0);
#ifdef _OPENMP
  const int threads = jobs > 0 ? jobs : omp_get_max_threads();
#pragma omp parallel for schedule(dynamic) num_threads(threads)
#else
  (void)jobs;
#endif
  for (int i = 0; i < n_phi; ++i) {
    const double phi = domain.phi_lo + (i + 0.5) * dphi;
    int best = -1, arg = 0;
    for (int j = 0; j < n_rho; ++j) {
      const double rho = domain.rho_lo + (j + 0.5) * drho;
      const int v = obj.evaluate({phi, rho});
      if (v > best) {
        best = v;
        arg = j;
      }
    }
    row_best[i] = best;
    row_arg[i] = arg;
  }

  GridResult res;
  res.objective_value = -1;
  for (int i = 0; i < n_phi; ++i) {  // row-major first on ties
    if (row_best[i] > res.objective_value) {
      res.objective_value = row_best[i];
      res.motion = {domain.phi_lo + (i + 0.5) * dphi, domain.rho_lo + (row_arg[i] + 0.5) * drho};
    }
  }
  return res;
}

int terminal_levels(double width, double min_width) {
  int k = 0;
  while (width > min_width && k < 60) {
    width *= 0.5;
    ++k;
  }
  return k;
}

}  // namespace govo
