/*
 * Copyright 2026 The ellid Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

// Minimum-volume enclosing ellipse by Khachiyan's barycentric coordinate
// ascent, with Todd-Yildirim away steps.

#include <ellid/error.hpp>
#include <ellid/geometry.hpp>

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <span>
#include <vector>

namespace ellid {

struct MveeConfig {
  double epsilon = 0.05;
  // 0 means 10 * |points|.
  int max_iters = 0;
  // Ridge scale for flat point sets, relative to spread^2.
  double regularization = 1e-8;
  // Radius of the disk returned for one or two distinct points.
  double min_radius = 0.05;
};

struct MveeResult {
  GeneralEllipse ellipse;
  std::vector<Vec2> points;     // deduplicated input, sorted
  std::vector<double> weights;  // dual weights aligned with `points`
  int iterations = 0;
  bool degenerate_span = false;
  bool iteration_limit = false;
  bool fallback_disk = false;
};

namespace detail {

inline std::vector<Vec2> dedup_points(std::span<const Vec2> points, double tol = 1e-12) {
  std::vector<Vec2> sorted(points.begin(), points.end());
  std::sort(sorted.begin(), sorted.end(), [](const Vec2& a, const Vec2& b) {
    return a.x() < b.x() || (a.x() == b.x() && a.y() < b.y());
  });
  std::vector<Vec2> out;
  out.reserve(sorted.size());
  for (const auto& p : sorted) {
    bool dup = false;
    // Sorted by x, so only a short tail can be within tol.
    for (auto it = out.rbegin(); it != out.rend() && p.x() - it->x() <= tol; ++it) {
      if ((p - *it).lpNorm<Eigen::Infinity>() <= tol) {
        dup = true;
        break;
      }
    }
    if (!dup) out.push_back(p);
  }
  return out;
}

}  // namespace detail

/// Disk enclosing one or two points, at least `min_radius` wide.
inline GeneralEllipse min_radius_disk(std::span<const Vec2> points, double min_radius) {
  Vec2 c = Vec2::Zero();
  for (const auto& p : points) c += p;
  if (!points.empty()) c /= static_cast<double>(points.size());
  double r = min_radius;
  for (const auto& p : points) r = std::max(r, (p - c).norm());
  GeneralEllipse g;
  g.A = Mat2::Identity() / r;
  g.b = -g.A * c;
  return g;
}

/// Khachiyan MVEE of a planar point set.
///
/// Stops once the largest lifted Mahalanobis distance is within
/// (1 + epsilon)(d + 1) and no support point sits below (1 - epsilon)(d + 1).
/// The returned ellipse is rescaled so that every input point satisfies
/// ||A p + b|| <= 1. Throws TooFewPoints with fewer than three distinct points.
inline MveeResult khachiyan_mvee(std::span<const Vec2> input, const MveeConfig& cfg = {}) {
  constexpr int d = 2;
  MveeResult res;
  res.points = detail::dedup_points(input);
  const auto& pts = res.points;
  const int n = static_cast<int>(pts.size());
  if (n < 3) throw Error(ErrorCode::kTooFewPoints, "MVEE needs at least 3 distinct points");

  Vec2 lo = pts[0], hi = pts[0];
  for (const auto& p : pts) {
    lo = lo.cwiseMin(p);
    hi = hi.cwiseMax(p);
  }
  const double spread = std::max((hi - lo).maxCoeff(), 1e-300);

  // Work in coordinates centered on the bounding box for conditioning.
  const Vec2 origin = 0.5 * (lo + hi);
  Eigen::Matrix<double, 3, Eigen::Dynamic> q(3, n);
  for (int i = 0; i < n; ++i) {
    q.col(i) << pts[i] - origin, 1.0;
  }

  {
    Vec2 mean = Vec2::Zero();
    for (int i = 0; i < n; ++i) mean += q.col(i).head<2>();
    mean /= n;
    Mat2 cov = Mat2::Zero();
    for (int i = 0; i < n; ++i) {
      const Vec2 c = q.col(i).head<2>() - mean;
      cov += c * c.transpose();
    }
    cov /= n;
    res.degenerate_span = cov.determinant() <= 1e-12 * cov.trace() * cov.trace();
  }
  const double ridge = res.degenerate_span ? cfg.regularization * spread * spread : 0.0;

  Eigen::VectorXd u = Eigen::VectorXd::Constant(n, 1.0 / n);
  Eigen::VectorXd m(n);
  const int max_iters = cfg.max_iters > 0 ? cfg.max_iters : 10 * n;
  const double stop = (1.0 + cfg.epsilon) * (d + 1);

  auto lifted_scatter = [&]() {
    Eigen::Matrix3d x = q * u.asDiagonal() * q.transpose();
    x(0, 0) += ridge;
    x(1, 1) += ridge;
    return x;
  };

  int it = 0;
  for (;; ++it) {
    const Eigen::Matrix3d x = lifted_scatter();
    const Eigen::LDLT<Eigen::Matrix3d> ldlt(x);
    m = (q.array() * ldlt.solve(q).array()).colwise().sum().transpose();

    int jmax = 0;
    m.maxCoeff(&jmax);
    const double m_max = m(jmax);
    // Away candidate among points in the support.
    int jmin = -1;
    for (int i = 0; i < n; ++i) {
      if (u(i) > 0.0 && (jmin < 0 || m(i) < m(jmin))) jmin = i;
    }
    // Both gaps small: no point far outside, no support point deep inside.
    if (m_max <= stop && m(jmin) >= (1.0 - cfg.epsilon) * (d + 1)) break;
    if (it >= max_iters) {
      res.iteration_limit = true;
      break;
    }

    const double eps_plus = m_max / (d + 1) - 1.0;
    const double eps_minus = 1.0 - m(jmin) / (d + 1);
    if (eps_plus >= eps_minus || u(jmin) >= 1.0) {
      const double step = (m_max - d - 1) / ((d + 1) * (m_max - 1));
      u *= (1.0 - step);
      u(jmax) += step;
    } else {
      const double m_min = m(jmin);
      double step = (d + 1 - m_min) / ((d + 1) * (m_min - 1));
      const double cap = u(jmin) / (1.0 - u(jmin));
      const bool drop = step >= cap;
      step = std::min(step, cap);
      u *= (1.0 + step);
      u(jmin) -= step;
      if (drop) u(jmin) = 0.0;
    }
  }
  res.iterations = it;

  const Eigen::Matrix3d x = lifted_scatter();
  Vec2 c = Vec2::Zero();
  for (int i = 0; i < n; ++i) c += u(i) * q.col(i).head<2>();
  Mat2 sigma = x.topLeftCorner<2, 2>() - c * c.transpose();
  sigma = 0.5 * (sigma + sigma.transpose());
  // Shape (x - c)' M (x - c) <= 1 with M = sigma^-1 / d.
  Mat2 shape = sigma.inverse() / d;
  double worst = 0.0;
  for (int i = 0; i < n; ++i) {
    const Vec2 r = q.col(i).head<2>() - c;
    worst = std::max(worst, r.dot(shape * r));
  }
  if (worst > 1.0) shape /= worst;

  Eigen::SelfAdjointEigenSolver<Mat2> eig(shape);
  const Vec2 sq = eig.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  res.ellipse.A = eig.eigenvectors() * sq.asDiagonal() * eig.eigenvectors().transpose();
  res.ellipse.b = -res.ellipse.A * (c + origin);

  // Guard against rounding in the square root: the contract is exact coverage.
  double worst_norm = 0.0;
  for (const auto& p : pts) worst_norm = std::max(worst_norm, res.ellipse.norm_at(p));
  if (worst_norm > 1.0) {
    res.ellipse.A /= worst_norm;
    res.ellipse.b /= worst_norm;
  }

  res.weights.assign(u.data(), u.data() + n);
  return res;
}

/// MVEE with the small-set fallback: one or two distinct points yield a disk.
inline MveeResult enclosing_ellipse(std::span<const Vec2> points, const MveeConfig& cfg = {}) {
  const auto distinct = detail::dedup_points(points);
  if (distinct.size() >= 3) return khachiyan_mvee(points, cfg);
  if (distinct.empty()) throw Error(ErrorCode::kEmptyInput, "no points to enclose");
  MveeResult res;
  res.points = distinct;
  res.ellipse = min_radius_disk(distinct, cfg.min_radius);
  res.weights.assign(distinct.size(), 1.0 / static_cast<double>(distinct.size()));
  res.fallback_disk = true;
  return res;
}

}  // namespace ellid
