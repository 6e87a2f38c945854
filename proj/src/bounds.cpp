#include "govo/bounds.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace govo {

namespace {

struct ValueInterval {
  double lo, hi;
};

// Scalar times interval; the extreme is one of the two endpoint products.
inline ValueInterval scale_interval(double c, ValueInterval t) {
  const double a = c * t.lo;
  const double b = c * t.hi;
  return {std::min(a, b), std::max(a, b)};
}

// [r_lo, r_hi] * [t_lo, t_hi] with r >= 0. The product is bilinear, so its
// extremes over the box are attained at corners.
inline ValueInterval product_interval(double r_lo, double r_hi, ValueInterval t) {
  const double a = r_lo * t.lo;
  const double b = r_lo * t.hi;
  const double c = r_hi * t.lo;
  const double d = r_hi * t.hi;
  return {std::min(std::min(a, b), std::min(c, d)),
          std::max(std::max(a, b), std::max(c, d))};
}

}  // namespace

TransferBox transfer_box(const Eigen::Vector2d& p2, const MotionInterval& iv,
                         const CameraModel& cam) {
  assert(iv.sign_definite());
  const double s = cam.scale();

  // Straight motion: the transfer slides purely along -y by s*rho.
  if (iv.phi_lo == 0.0 && iv.phi_hi == 0.0) {
    return {p2.x(), p2.x(), p2.y() - s * iv.rho_hi, p2.y() - s * iv.rho_lo};
  }

  // cos(2*phi) is monotone on a sign-definite interval with |phi| <= pi/2.
  const double c2a = std::cos(2.0 * iv.phi_lo);
  const double c2b = std::cos(2.0 * iv.phi_hi);
  const ValueInterval c2{std::min(c2a, c2b), std::max(c2a, c2b)};

  // sin(2*phi) is monotone up to |2*phi| = pi/2; past that the extreme +-1
  // sits inside the interval and must be taken explicitly.
  const double s2a = std::sin(2.0 * iv.phi_lo);
  const double s2b = std::sin(2.0 * iv.phi_hi);
  ValueInterval s2{std::min(s2a, s2b), std::max(s2a, s2b)};
  if (iv.phi_lo < kPi / 4.0 && kPi / 4.0 < iv.phi_hi) s2.hi = 1.0;
  if (iv.phi_lo < -kPi / 4.0 && -kPi / 4.0 < iv.phi_hi) s2.lo = -1.0;

  // sin is increasing on [-pi/2, pi/2]; cos is monotone on the
  // sign-definite interval.
  const ValueInterval s1{std::sin(iv.phi_lo), std::sin(iv.phi_hi)};
  const double c1a = std::cos(iv.phi_lo);
  const double c1b = std::cos(iv.phi_hi);
  const ValueInterval c1{std::min(c1a, c1b), std::max(c1a, c1b)};

  const double cx = p2.x() - cam.principal_u;   // x2 - u0
  const double cy = p2.y() - cam.principal_v;   // y2 - v0
  const double cyn = cam.principal_v - p2.y();  // v0 - y2

  const ValueInterval x_t1 = scale_interval(cx, c2);
  const ValueInterval x_t2 = scale_interval(cyn, s2);
  const ValueInterval x_t3 = product_interval(iv.rho_lo, iv.rho_hi, s1);

  const ValueInterval y_t1 = scale_interval(cx, s2);
  const ValueInterval y_t2 = scale_interval(cy, c2);
  const ValueInterval y_t3 = product_interval(iv.rho_lo, iv.rho_hi, c1);

  TransferBox box;
  box.x_lo = x_t1.lo + x_t2.lo + s * x_t3.lo + cam.principal_u;
  box.x_hi = x_t1.hi + x_t2.hi + s * x_t3.hi + cam.principal_u;
  box.y_lo = y_t1.lo + y_t2.lo - s * y_t3.hi + cam.principal_v;
  box.y_hi = y_t1.hi + y_t2.hi - s * y_t3.lo + cam.principal_v;
  return box;
}

RangeIndex::RangeIndex(const PointSet& points, double cell_size) {
  n_points_ = int(points.size());
  if (n_points_ == 0) return;

  double x_min = points[0].x(), x_max = points[0].x();
  double y_min = points[0].y(), y_max = points[0].y();
  for (const auto& p : points) {
    x_min = std::min(x_min, p.x());
    x_max = std::max(x_max, p.x());
    y_min = std::min(y_min, p.y());
    y_max = std::max(y_max, p.y());
  }

  cell_ = std::max(cell_size, 1e-9);
  // Cap the grid so degenerate cell sizes cannot blow up memory.
  const double span = std::max(x_max - x_min, y_max - y_min);
  const int max_cells_per_axis = 2048;
  if (span / cell_ > max_cells_per_axis) cell_ = span / max_cells_per_axis;

  x0_ = x_min;
  y0_ = y_min;
  nx_ = std::max(1, int(std::floor((x_max - x0_) / cell_)) + 1);
  ny_ = std::max(1, int(std::floor((y_max - y0_) / cell_)) + 1);

  std::vector<int> counts(size_t(nx_) * ny_, 0);
  std::vector<int> cell_of(n_points_);
  for (int i = 0; i < n_points_; ++i) {
    const int cxi = cell_x(points[i].x());
    const int cyi = cell_y(points[i].y());
    cell_of[i] = cyi * nx_ + cxi;
    ++counts[cell_of[i]];
  }

  cell_start_.assign(size_t(nx_) * ny_ + 1, 0);
  for (size_t c = 0; c < counts.size(); ++c) cell_start_[c + 1] = cell_start_[c] + counts[c];

  px_.resize(n_points_);
  py_.resize(n_points_);
  ids_.resize(n_points_);
  std::vector<int> cursor(cell_start_.begin(), cell_start_.end() - 1);
  for (int i = 0; i < n_points_; ++i) {  // ascending i keeps cells index-sorted
    const int slot = cursor[cell_of[i]]++;
    px_[slot] = points[i].x();
    py_[slot] = points[i].y();
    ids_[slot] = i;
  }

  // 2D prefix sums over per-cell counts: whole blocks of interior cells are
  // counted in O(1) per query.
  prefix_.assign(size_t(nx_ + 1) * (ny_ + 1), 0);
  for (int cy = 0; cy < ny_; ++cy) {
    for (int cx = 0; cx < nx_; ++cx) {
      prefix_[size_t(cy + 1) * (nx_ + 1) + (cx + 1)] =
          counts[size_t(cy) * nx_ + cx] + prefix_[size_t(cy) * (nx_ + 1) + (cx + 1)] +
          prefix_[size_t(cy + 1) * (nx_ + 1) + cx] - prefix_[size_t(cy) * (nx_ + 1) + cx];
    }
  }
}

int RangeIndex::cell_x(double x) const {
  const int c = int(std::floor((x - x0_) / cell_));
  return std::clamp(c, 0, nx_ - 1);
}

int RangeIndex::cell_y(double y) const {
  const int c = int(std::floor((y - y0_) / cell_));
  return std::clamp(c, 0, ny_ - 1);
}

int RangeIndex::count_in_rect(double x_lo, double x_hi, double y_lo, double y_hi) const {
  if (n_points_ == 0 || x_lo > x_hi || y_lo > y_hi) return 0;

  const int cx_lo = cell_x(x_lo), cx_hi = cell_x(x_hi);
  const int cy_lo = cell_y(y_lo), cy_hi = cell_y(y_hi);

  // Cells fully inside the rectangle (never the clamped border cells).
  int ix_lo = (x0_ + cx_lo * cell_ >= x_lo) ? cx_lo : cx_lo + 1;
  int ix_hi = (x0_ + (cx_hi + 1) * cell_ <= x_hi) ? cx_hi : cx_hi - 1;
  int iy_lo = (y0_ + cy_lo * cell_ >= y_lo) ? cy_lo : cy_lo + 1;
  int iy_hi = (y0_ + (cy_hi + 1) * cell_ <= y_hi) ? cy_hi : cy_hi - 1;

  std::int64_t count = 0;
  if (ix_lo <= ix_hi && iy_lo <= iy_hi) {
    count += prefix_[size_t(iy_hi + 1) * (nx_ + 1) + (ix_hi + 1)] -
             prefix_[size_t(iy_lo) * (nx_ + 1) + (ix_hi + 1)] -
             prefix_[size_t(iy_hi + 1) * (nx_ + 1) + ix_lo] +
             prefix_[size_t(iy_lo) * (nx_ + 1) + ix_lo];
  } else {
    ix_lo = cx_hi + 1;  // empty interior: test every covered cell
    ix_hi = cx_lo - 1;
    iy_lo = cy_hi + 1;
    iy_hi = cy_lo - 1;
  }

  for (int cy = cy_lo; cy <= cy_hi; ++cy) {
    for (int cx = cx_lo; cx <= cx_hi; ++cx) {
      if (cx >= ix_lo && cx <= ix_hi && cy >= iy_lo && cy <= iy_hi) continue;
      const size_t c = size_t(cy) * nx_ + cx;
      for (int k = cell_start_[c]; k < cell_start_[c + 1]; ++k) {
        if (px_[k] >= x_lo && px_[k] <= x_hi && py_[k] >= y_lo && py_[k] <= y_hi) ++count;
      }
    }
  }
  return int(count);
}

int RangeIndex::count_in_disc(const Eigen::Vector2d& c, double radius) const {
  if (n_points_ == 0) return 0;
  const double r2 = radius * radius;
  const int cx_lo = cell_x(c.x() - radius), cx_hi = cell_x(c.x() + radius);
  const int cy_lo = cell_y(c.y() - radius), cy_hi = cell_y(c.y() + radius);
  int count = 0;
  for (int cy = cy_lo; cy <= cy_hi; ++cy) {
    for (int cx = cx_lo; cx <= cx_hi; ++cx) {
      const size_t cell = size_t(cy) * nx_ + cx;
      for (int k = cell_start_[cell]; k < cell_start_[cell + 1]; ++k) {
        const double dx = px_[k] - c.x();
        const double dy = py_[k] - c.y();
        if (dx * dx + dy * dy < r2) ++count;
      }
    }
  }
  return count;
}

void RangeIndex::indices_in_disc(const Eigen::Vector2d& c, double radius,
                                 std::vector<int>& out) const {
  if (n_points_ == 0) return;
  const double r2 = radius * radius;
  const int cx_lo = cell_x(c.x() - radius), cx_hi = cell_x(c.x() + radius);
  const int cy_lo = cell_y(c.y() - radius), cy_hi = cell_y(c.y() + radius);
  const size_t first = out.size();
  for (int cy = cy_lo; cy <= cy_hi; ++cy) {
    for (int cx = cx_lo; cx <= cx_hi; ++cx) {
      const size_t cell = size_t(cy) * nx_ + cx;
      for (int k = cell_start_[cell]; k < cell_start_[cell + 1]; ++k) {
        const double dx = px_[k] - c.x();
        const double dy = py_[k] - c.y();
        if (dx * dx + dy * dy < r2) out.push_back(ids_[k]);
      }
    }
  }
  std::sort(out.begin() + first, out.end());
}

RangeIndex build_range_index(const PointSet& points, double cell_size) {
  return RangeIndex(points, cell_size);
}

int ConsensusObjective::evaluate(const MotionParams& m) const {
  const double eps2 = epsilon * epsilon;
  int count = 0;
  if (index && !index->empty()) {
    for (const auto& q : *p2) count += index->count_in_disc(transfer_point(q, m, cam), epsilon);
    return count;
  }
  for (const auto& q : *p2) {
    const Eigen::Vector2d t = transfer_point(q, m, cam);
    for (const auto& p : *p1) {
      const double dx = p.x() - t.x();
      const double dy = p.y() - t.y();
      if (dx * dx + dy * dy < eps2) ++count;
    }
  }
  return count;
}

int ConsensusObjective::pairs_at(const MotionParams& m,
                                 std::vector<std::pair<int, int>>& out) const {
  out.clear();
  const double eps2 = epsilon * epsilon;
  std::vector<int> hits;
  for (int j = 0; j < int(p2->size()); ++j) {
    const Eigen::Vector2d t = transfer_point((*p2)[j], m, cam);
    hits.clear();
    if (index && !index->empty()) {
      index->indices_in_disc(t, epsilon, hits);
    } else {
      for (int i = 0; i < int(p1->size()); ++i) {
        const double dx = (*p1)[i].x() - t.x();
        const double dy = (*p1)[i].y() - t.y();
        if (dx * dx + dy * dy < eps2) hits.push_back(i);
      }
    }
    for (int i : hits) out.emplace_back(i, j);
  }
  return int(out.size());
}

BoundResult lower_bound(const MotionInterval& iv, const ConsensusObjective& obj) {
  BoundResult r;
  r.lower = obj.pairs_at(iv.center(), r.center_pairs);
  r.upper = r.lower;
  r.converged = true;
  return r;
}

int upper_bound(const MotionInterval& iv, const ConsensusObjective& obj,
                const RangeIndex& idx) {
  int total = 0;
  for (const auto& q : *obj.p2) {
    const TransferBox box = transfer_box(q, iv, obj.cam);
    total += idx.count_in_rect(box.x_lo - obj.epsilon, box.x_hi + obj.epsilon,
                               box.y_lo - obj.epsilon, box.y_hi + obj.epsilon);
  }
  return total;
}

BoundResult evaluate_interval(const MotionInterval& iv, const ConsensusObjective& obj,
                              const RangeIndex& idx) {
  BoundResult r;
  r.lower = obj.pairs_at(iv.center(), r.center_pairs);
  r.upper = upper_bound(iv, obj, idx);
  r.converged = (r.lower == r.upper);
  return r;
}

std::vector<BoundResult> evaluate_level(std::span<const MotionInterval> intervals,
                                        const ConsensusObjective& obj,
                                        const RangeIndex& idx, int jobs) {
  std::vector<BoundResult> out(intervals.size());
#ifdef _OPENMP
  const int threads = jobs > 0 ? jobs : omp_get_max_threads();
#pragma omp parallel for schedule(dynamic, 4) num_threads(threads) \
    if (intervals.size() > 8)
  for (std::int64_t i = 0; i < std::int64_t(intervals.size()); ++i) {
    out[i] = evaluate_interval(intervals[i], obj, idx);
  }
#else
  (void)jobs;
  for (size_t i = 0; i < intervals.size(); ++i) {
    out[i] = evaluate_interval(intervals[i], obj, idx);
  }
#endif
  return out;
}

std::vector<BoundResult> evaluate_level_serial(std::span<const MotionInterval> intervals,
                                               const ConsensusObjective& obj,
                                               const RangeIndex& idx) {
  std::vector<BoundResult> out(intervals.size());
  for (size_t i = 0; i < intervals.size(); ++i) {
    out[i] = evaluate_interval(intervals[i], obj, idx);
  }
  return out;
}

}  // namespace govo
