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

// Ellipse representations and the small amount of planar geometry the
// identification pipeline needs.
//
// Three interconvertible forms describe the same closed set:
//   general:    { x : ||A x + b|| <= 1 },              A symmetric positive definite
//   quadratic:  { x : x'Aq x + 2 bq'x + cq <= 0 }
//   standard:   { x : (x-xc)' R(t)' H R(t) (x-xc) <= 1 },  H = diag(1/r1^2, 1/r2^2)
//
// R(t) = [cos t, sin t; -sin t, cos t] maps world offsets into the ellipse
// frame, so t is the counter-clockwise angle of the r1 (minor) axis measured
// from +x and the major axis points along t + pi/2. Canonical form keeps
// r1 <= r2 and t in [0, pi).

#include <Eigen/Dense>

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <span>
#include <vector>

namespace ellid {

using Vec2 = Eigen::Vector2d;
using Mat2 = Eigen::Matrix2d;

namespace tol {
inline constexpr double kBoundaryBand = 1e-9;
inline constexpr double kRoundTrip = 1e-8;
inline constexpr double kNearCircular = 1e-9;
}  // namespace tol

/// Reduces an orientation to [0, pi).
inline double wrap_pi(double theta) {
  constexpr double pi = std::numbers::pi;
  double t = std::fmod(theta, pi);
  if (t < 0.0) t += pi;
  if (t >= pi) t -= pi;
  return t;
}

/// Signed shortest difference a - b on the mod-pi circle, in [-pi/2, pi/2).
inline double angle_diff_pi(double a, double b) {
  constexpr double pi = std::numbers::pi;
  double d = std::fmod(a - b, pi);
  if (d < -pi / 2) d += pi;
  if (d >= pi / 2) d -= pi;
  return d;
}

inline Mat2 rotation(double theta) {
  const double c = std::cos(theta);
  const double s = std::sin(theta);
  Mat2 r;
  r << c, s, -s, c;
  return r;
}

struct GeneralEllipse {
  Mat2 A = Mat2::Identity();
  Vec2 b = Vec2::Zero();

  /// ||A p + b||.
  double norm_at(const Vec2& p) const { return (A * p + b).norm(); }
};

struct QuadraticEllipse {
  Mat2 Aq = Mat2::Identity();
  Vec2 bq = Vec2::Zero();
  double cq = -1.0;

  double value_at(const Vec2& p) const {
    return p.dot(Aq * p) + 2.0 * bq.dot(p) + cq;
  }
};

struct StandardEllipse {
  Vec2 center = Vec2::Zero();
  double r1 = 1.0;  // minor semi-axis
  double r2 = 1.0;  // major semi-axis
  double theta = 0.0;

  /// Shape matrix R' H R, so that membership is d' M d <= 1 for d = p - center.
  Mat2 shape_matrix() const {
    const Mat2 r = rotation(theta);
    const Eigen::Vector2d h(1.0 / (r1 * r1), 1.0 / (r2 * r2));
    return r.transpose() * h.asDiagonal() * r;
  }

  /// Squared normalized radius (p - c)' R' H R (p - c).
  double level_at(const Vec2& p) const {
    const Vec2 q = rotation(theta) * (p - center);
    return (q.x() / r1) * (q.x() / r1) + (q.y() / r2) * (q.y() / r2);
  }

  /// Unit vector along the major axis.
  Vec2 major_axis() const { return Vec2(-std::sin(theta), std::cos(theta)); }
};

struct OrientedBox {
  Vec2 center = Vec2::Zero();
  Vec2 half_extents = Vec2::Ones();
  double angle = 0.0;  // CCW angle of the first box axis

  double area() const { return 4.0 * half_extents.x() * half_extents.y(); }

  Vec2 axis(int k) const {
    const double c = std::cos(angle), s = std::sin(angle);
    return k == 0 ? Vec2(c, s) : Vec2(-s, c);
  }

  bool contains(const Vec2& p) const {
    const Vec2 d = p - center;
    return std::abs(axis(0).dot(d)) <= half_extents.x() &&
           std::abs(axis(1).dot(d)) <= half_extents.y();
  }
};

inline bool is_valid(const StandardEllipse& e) {
  return std::isfinite(e.center.x()) && std::isfinite(e.center.y()) && e.r1 > 0.0 &&
         e.r1 <= e.r2 && std::isfinite(e.r2) && e.theta >= 0.0 &&
         e.theta < std::numbers::pi;
}

inline bool is_near_circular(const StandardEllipse& e) {
  return e.r2 / e.r1 - 1.0 < tol::kNearCircular;
}

/// Builds a canonical standard ellipse from two semi-axes given along an
/// arbitrary frame angle (axis `a` along `angle`, axis `b` perpendicular).
inline StandardEllipse make_ellipse(const Vec2& center, double a, double b, double angle) {
  StandardEllipse e;
  e.center = center;
  if (a <= b) {
    e.r1 = a;
    e.r2 = b;
    e.theta = wrap_pi(angle);
  } else {
    e.r1 = b;
    e.r2 = a;
    e.theta = wrap_pi(angle + std::numbers::pi / 2);
  }
  if (is_near_circular(e)) e.theta = 0.0;
  return e;
}

inline QuadraticEllipse general_to_quadratic(const GeneralEllipse& e) {
  QuadraticEllipse q;
  q.Aq = e.A.transpose() * e.A;
  q.bq = e.A.transpose() * e.b;
  q.cq = e.b.squaredNorm() - 1.0;
  return q;
}

/// Eigen-decomposes the normalized quadratic. Near-circular results get
/// theta = 0 (check with is_near_circular).
inline StandardEllipse quadratic_to_standard(const QuadraticEllipse& q) {
  const Mat2 aq = 0.5 * (q.Aq + q.Aq.transpose());
  const Vec2 center = -aq.ldlt().solve(q.bq);
  const double k = -q.bq.dot(center) - q.cq;  // bq' Aq^-1 bq - cq
  const Mat2 m = aq / k;
  Eigen::SelfAdjointEigenSolver<Mat2> eig(m);
  const Vec2 lambda = eig.eigenvalues();  // ascending
  const Vec2 minor_dir = eig.eigenvectors().col(1);
  StandardEllipse e;
  e.center = center;
  e.r1 = 1.0 / std::sqrt(lambda(1));
  e.r2 = 1.0 / std::sqrt(lambda(0));
  e.theta = wrap_pi(std::atan2(minor_dir.y(), minor_dir.x()));
  if (is_near_circular(e)) e.theta = 0.0;
  return e;
}

inline GeneralEllipse standard_to_general(const StandardEllipse& e) {
  const Mat2 r = rotation(e.theta);
  const Eigen::Vector2d hs(1.0 / e.r1, 1.0 / e.r2);
  GeneralEllipse g;
  g.A = r.transpose() * hs.asDiagonal() * r;
  g.b = -g.A * e.center;
  return g;
}

inline QuadraticEllipse standard_to_quadratic(const StandardEllipse& e) {
  return general_to_quadratic(standard_to_general(e));
}

inline StandardEllipse general_to_standard(const GeneralEllipse& g) {
  return quadratic_to_standard(general_to_quadratic(g));
}

inline bool contains(const StandardEllipse& e, const Vec2& p, double inflate = 0.0) {
  const double s = 1.0 + inflate;
  return e.level_at(p) <= s * s;
}

inline double area(const StandardEllipse& e) { return std::numbers::pi * e.r1 * e.r2; }

inline double area(const GeneralEllipse& g) {
  return std::numbers::pi / std::abs(g.A.determinant());
}

/// n points xc + R(theta)' (r1 cos phi_k, r2 sin phi_k), phi_k = 2 pi k / n.
inline std::vector<Vec2> boundary_sample(const StandardEllipse& e, int n) {
  std::vector<Vec2> out;
  if (n <= 0) return out;
  out.reserve(static_cast<std::size_t>(n));
  const Mat2 rt = rotation(e.theta).transpose();
  for (int k = 0; k < n; ++k) {
    const double phi = 2.0 * std::numbers::pi * k / n;
    out.push_back(e.center + rt * Vec2(e.r1 * std::cos(phi), e.r2 * std::sin(phi)));
  }
  return out;
}

/// Box aligned with the principal axes of the point covariance, fit tightly
/// around the points.
inline OrientedBox pca_box(std::span<const Vec2> pts) {
  OrientedBox box;
  if (pts.empty()) return box;
  Vec2 mean = Vec2::Zero();
  for (const auto& p : pts) mean += p;
  mean /= static_cast<double>(pts.size());
  Mat2 cov = Mat2::Zero();
  for (const auto& p : pts) cov += (p - mean) * (p - mean).transpose();
  Eigen::SelfAdjointEigenSolver<Mat2> eig(cov);
  const Vec2 major = eig.eigenvectors().col(1);
  box.angle = std::atan2(major.y(), major.x());
  const Vec2 u0 = box.axis(0), u1 = box.axis(1);
  double lo0 = u0.dot(pts[0]), hi0 = lo0, lo1 = u1.dot(pts[0]), hi1 = lo1;
  for (const auto& p : pts) {
    const double a = u0.dot(p), b = u1.dot(p);
    lo0 = std::min(lo0, a);
    hi0 = std::max(hi0, a);
    lo1 = std::min(lo1, b);
    hi1 = std::max(hi1, b);
  }
  box.center = u0 * (0.5 * (lo0 + hi0)) + u1 * (0.5 * (lo1 + hi1));
  // Pad by a few ulps of the coordinate scale so reprojection is exact.
  const double pad = 1e-12 * (1.0 + box.center.lpNorm<Eigen::Infinity>() +
                              std::max(hi0 - lo0, hi1 - lo1));
  box.half_extents = Vec2(0.5 * (hi0 - lo0) + pad, 0.5 * (hi1 - lo1) + pad);
  return box;
}

namespace detail {
inline bool ellipse_less(const StandardEllipse& a, const StandardEllipse& b) {
  const std::array<double, 5> ka{a.center.x(), a.center.y(), a.r1, a.r2, a.theta};
  const std::array<double, 5> kb{b.center.x(), b.center.y(), b.r1, b.r2, b.theta};
  return ka < kb;
}
}  // namespace detail

inline constexpr int kObbSamples = 64;

/// Oriented bounding box of two ellipses from 64 boundary samples each.
/// Inputs are put in a canonical order first so the result does not depend
/// on argument order.
inline OrientedBox obb_of_pair(const StandardEllipse& e1, const StandardEllipse& e2) {
  const bool swap = detail::ellipse_less(e2, e1);
  const StandardEllipse& first = swap ? e2 : e1;
  const StandardEllipse& second = swap ? e1 : e2;
  std::vector<Vec2> pts = boundary_sample(first, kObbSamples);
  const std::vector<Vec2> more = boundary_sample(second, kObbSamples);
  pts.insert(pts.end(), more.begin(), more.end());
  return pca_box(pts);
}

}  // namespace ellid
