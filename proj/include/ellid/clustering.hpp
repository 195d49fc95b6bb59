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

// Point-cloud clustering: variational Bayesian Gaussian mixture with
// automatic component pruning, plus k-means and DBSCAN baselines.

#include <ellid/error.hpp>
#include <ellid/geometry.hpp>

#include <Eigen/Dense>
#include <boost/math/special_functions/digamma.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <optional>
#include <random>
#include <span>
#include <unordered_map>
#include <vector>

namespace ellid {

struct VigmmConfig {
  int n_max = 30;
  // Dirichlet concentration; <= 0 selects 1 / n_max.
  double dirichlet_alpha0 = 0.0;
  double beta0 = 1.0;
  double nu0 = 3.0;
  // Wishart scale; unset selects I / (nu0 * per-axis data variance).
  std::optional<Mat2> w0;
  double elbo_tol = 1e-4;  // relative
  int max_iters = 200;
  // Effective threshold is max(weight_prune_threshold, 2 / |points|).
  double weight_prune_threshold = 1e-2;
  std::uint64_t seed = 0;
  // Post-convergence component removal, see fit_vigmm. Off by default: with
  // the data-scaled prior it also fuses distinct nearby objects, and the
  // refinement step already merges the halves of a split cluster.
  bool deletion_moves = false;
};

/// Variational posterior of one mixture component: Dirichlet count alpha and
/// Normal-Wishart (mean, beta, W, nu).
struct GaussianPosterior {
  double alpha = 1.0;
  double beta = 1.0;
  double nu = 3.0;
  Vec2 mean = Vec2::Zero();
  Mat2 W = Mat2::Identity();
};

struct ClusterComponent {
  double weight = 0.0;
  Vec2 mean = Vec2::Zero();
  Mat2 covariance = Mat2::Identity();
};

struct ClusterResult {
  std::vector<ClusterComponent> components;
  std::vector<int> assignments;  // component index per point
  std::vector<double> elbo_trace;
  std::vector<double> sse_trace;  // k-means objective per Lloyd iteration
  // Total iterations; for VIGMM elbo_trace holds only the final ascent run.
  int iterations = 0;
  int deletions = 0;
  bool converged = false;
  // Surviving components' posteriors (VIGMM only), aligned with components.
  std::vector<GaussianPosterior> posterior;

  std::size_t size() const { return components.size(); }

  /// Points grouped by assigned component, in input order.
  std::vector<std::vector<Vec2>> groups(std::span<const Vec2> points) const {
    std::vector<std::vector<Vec2>> out(components.size());
    for (std::size_t i = 0; i < points.size(); ++i) {
      out[static_cast<std::size_t>(assignments[i])].push_back(points[i]);
    }
    return out;
  }
};

namespace detail {

inline std::vector<Vec2> kmeanspp_centers(std::span<const Vec2> points, int k,
                                          std::mt19937_64& rng) {
  const std::size_t n = points.size();
  std::vector<Vec2> centers;
  centers.reserve(static_cast<std::size_t>(k));
  std::uniform_int_distribution<std::size_t> pick(0, n - 1);
  centers.push_back(points[pick(rng)]);
  std::vector<double> d2(n);
  for (std::size_t i = 0; i < n; ++i) d2[i] = (points[i] - centers[0]).squaredNorm();
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  while (static_cast<int>(centers.size()) < k) {
    double total = 0.0;
    for (double v : d2) total += v;
    std::size_t chosen = 0;
    if (total <= 0.0) {
      chosen = pick(rng);
    } else {
      double target = unit(rng) * total;
      chosen = n - 1;
      for (std::size_t i = 0; i < n; ++i) {
        target -= d2[i];
        if (target < 0.0) {
          chosen = i;
          break;
        }
      }
    }
    centers.push_back(points[chosen]);
    for (std::size_t i = 0; i < n; ++i) {
      d2[i] = std::min(d2[i], (points[i] - centers.back()).squaredNorm());
    }
  }
  return centers;
}

inline int nearest_center(const Vec2& p, std::span<const Vec2> centers) {
  int best = 0;
  double best_d = std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < centers.size(); ++j) {
    const double d = (p - centers[j]).squaredNorm();
    if (d < best_d) {
      best_d = d;
      best = static_cast<int>(j);
    }
  }
  return best;
}

inline ClusterComponent moment_component(std::span<const Vec2> pts, double weight) {
  ClusterComponent c;
  c.weight = weight;
  if (pts.empty()) return c;
  c.mean = Vec2::Zero();
  for (const auto& p : pts) c.mean += p;
  c.mean /= static_cast<double>(pts.size());
  Mat2 cov = Mat2::Zero();
  for (const auto& p : pts) cov += (p - c.mean) * (p - c.mean).transpose();
  cov /= static_cast<double>(pts.size());
  // Keep singleton and collinear clusters SPD.
  c.covariance = cov + Mat2::Identity() * (1e-9 * (1.0 + cov.trace()));
  return c;
}

inline ClusterResult from_labels(std::span<const Vec2> points, std::vector<int> labels, int k) {
  ClusterResult res;
  std::vector<std::vector<Vec2>> groups(static_cast<std::size_t>(k));
  for (std::size_t i = 0; i < points.size(); ++i) {
    groups[static_cast<std::size_t>(labels[i])].push_back(points[i]);
  }
  const double n = static_cast<double>(points.size());
  for (const auto& g : groups) {
    res.components.push_back(moment_component(g, static_cast<double>(g.size()) / n));
  }
  res.assignments = std::move(labels);
  return res;
}

constexpr int kDim = 2;

inline double ln_wishart_norm(const Mat2& w, double nu) {
  double s = 0.0;
  for (int i = 1; i <= kDim; ++i) s += std::lgamma((nu + 1 - i) / 2.0);
  return -0.5 * nu * std::log(w.determinant()) -
         (0.5 * nu * kDim * std::numbers::ln2 +
          kDim * (kDim - 1) / 4.0 * std::log(std::numbers::pi) + s);
}

inline double expected_ln_det_precision(const GaussianPosterior& q) {
  double s = 0.0;
  for (int i = 1; i <= kDim; ++i) s += boost::math::digamma((q.nu + 1 - i) / 2.0);
  return s + kDim * std::numbers::ln2 + std::log(q.W.determinant());
}

struct Sufficient {
  std::vector<double> nk;
  std::vector<Vec2> xbar;
  std::vector<Mat2> s;
};

inline Sufficient sufficient_stats(std::span<const Vec2> points, const Eigen::MatrixXd& r) {
  const int k = static_cast<int>(r.cols());
  Sufficient st;
  st.nk.assign(static_cast<std::size_t>(k), 0.0);
  st.xbar.assign(static_cast<std::size_t>(k), Vec2::Zero());
  st.s.assign(static_cast<std::size_t>(k), Mat2::Zero());
  for (int j = 0; j < k; ++j) {
    double nk = 0.0;
    Vec2 sum = Vec2::Zero();
    for (std::size_t i = 0; i < points.size(); ++i) {
      nk += r(static_cast<Eigen::Index>(i), j);
      sum += r(static_cast<Eigen::Index>(i), j) * points[i];
    }
    st.nk[j] = nk;
    if (nk > 1e-12) {
      const Vec2 xb = sum / nk;
      Mat2 s = Mat2::Zero();
      for (std::size_t i = 0; i < points.size(); ++i) {
        const Vec2 d = points[i] - xb;
        s += r(static_cast<Eigen::Index>(i), j) * d * d.transpose();
      }
      st.xbar[j] = xb;
      st.s[j] = s / nk;
    }
  }
  return st;
}

struct Prior {
  double alpha0;
  double beta0;
  double nu0;
  Vec2 m0;
  Mat2 w0;
  Mat2 w0_inv;
};

inline std::vector<GaussianPosterior> m_step(const Sufficient& st, const Prior& pr) {
  std::vector<GaussianPosterior> q(st.nk.size());
  for (std::size_t j = 0; j < q.size(); ++j) {
    const double nk = st.nk[j];
    auto& c = q[j];
    c.alpha = pr.alpha0 + nk;
    c.beta = pr.beta0 + nk;
    c.nu = pr.nu0 + nk;
    c.mean = (pr.beta0 * pr.m0 + nk * st.xbar[j]) / c.beta;
    const Vec2 dm = st.xbar[j] - pr.m0;
    Mat2 w_inv = pr.w0_inv + nk * st.s[j] + (pr.beta0 * nk / (pr.beta0 + nk)) * dm * dm.transpose();
    w_inv = 0.5 * (w_inv + w_inv.transpose());
    c.W = w_inv.inverse();
  }
  return q;
}

/// Unnormalized log responsibilities ln rho_nk.
inline Eigen::MatrixXd log_rho(std::span<const Vec2> points,
                               std::span<const GaussianPosterior> q) {
  const Eigen::Index n = static_cast<Eigen::Index>(points.size());
  const Eigen::Index k = static_cast<Eigen::Index>(q.size());
  double alpha_sum = 0.0;
  for (const auto& c : q) alpha_sum += c.alpha;
  const double psi_sum = boost::math::digamma(alpha_sum);
  Eigen::MatrixXd out(n, k);
  for (Eigen::Index j = 0; j < k; ++j) {
    const auto& c = q[static_cast<std::size_t>(j)];
    const double e_ln_pi = boost::math::digamma(c.alpha) - psi_sum;
    const double e_ln_lam = expected_ln_det_precision(c);
    const double base = e_ln_pi + 0.5 * e_ln_lam -
                        0.5 * kDim * std::log(2.0 * std::numbers::pi) - 0.5 * kDim / c.beta;
    for (Eigen::Index i = 0; i < n; ++i) {
      const Vec2 d = points[static_cast<std::size_t>(i)] - c.mean;
      out(i, j) = base - 0.5 * c.nu * d.dot(c.W * d);
    }
  }
  return out;
}

inline Eigen::MatrixXd normalize_rows(Eigen::MatrixXd lr) {
  for (Eigen::Index i = 0; i < lr.rows(); ++i) {
    const double mx = lr.row(i).maxCoeff();
    lr.row(i) = (lr.row(i).array() - mx).exp();
    lr.row(i) /= lr.row(i).sum();
  }
  return lr;
}

inline double elbo(const Sufficient& st, std::span<const GaussianPosterior> q,
                   const Eigen::MatrixXd& r, const Prior& pr) {
  constexpr double d = kDim;
  const double ln2pi = std::log(2.0 * std::numbers::pi);
  const std::size_t k = q.size();
  double alpha_sum = 0.0;
  for (const auto& c : q) alpha_sum += c.alpha;
  const double psi_sum = boost::math::digamma(alpha_sum);

  double e_lik = 0.0, e_z = 0.0, e_pi = 0.0, e_mulam = 0.0;
  double q_pi = 0.0, q_mulam = 0.0;
  double sum_e_ln_pi = 0.0, sum_lgamma_alpha = 0.0;
  for (std::size_t j = 0; j < k; ++j) {
    const auto& c = q[j];
    const double e_ln_pi = boost::math::digamma(c.alpha) - psi_sum;
    const double e_ln_lam = expected_ln_det_precision(c);
    const Vec2 dx = st.xbar[j] - c.mean;
    e_lik += 0.5 * st.nk[j] *
             (e_ln_lam - d / c.beta - c.nu * (st.s[j] * c.W).trace() - c.nu * dx.dot(c.W * dx) -
              d * ln2pi);
    e_z += st.nk[j] * e_ln_pi;
    sum_e_ln_pi += e_ln_pi;
    const Vec2 dm = c.mean - pr.m0;
    e_mulam += 0.5 * (d * std::log(pr.beta0 / (2.0 * std::numbers::pi)) + e_ln_lam -
                      d * pr.beta0 / c.beta - pr.beta0 * c.nu * dm.dot(c.W * dm));
    e_mulam += 0.5 * (pr.nu0 - d - 1.0) * e_ln_lam - 0.5 * c.nu * (pr.w0_inv * c.W).trace();
    q_pi += (c.alpha - 1.0) * e_ln_pi;
    sum_lgamma_alpha += std::lgamma(c.alpha);
    const double entropy =
        -ln_wishart_norm(c.W, c.nu) - 0.5 * (c.nu - d - 1.0) * e_ln_lam + 0.5 * c.nu * d;
    q_mulam += 0.5 * e_ln_lam + 0.5 * d * std::log(c.beta / (2.0 * std::numbers::pi)) -
               0.5 * d - entropy;
  }
  const double kd = static_cast<double>(k);
  e_pi = std::lgamma(kd * pr.alpha0) - kd * std::lgamma(pr.alpha0) +
         (pr.alpha0 - 1.0) * sum_e_ln_pi;
  e_mulam += kd * ln_wishart_norm(pr.w0, pr.nu0);
  q_pi += std::lgamma(alpha_sum) - sum_lgamma_alpha;
  double q_z = 0.0;
  for (Eigen::Index i = 0; i < r.rows(); ++i) {
    for (Eigen::Index j = 0; j < r.cols(); ++j) {
      const double v = r(i, j);
      if (v > 0.0) q_z += v * std::log(v);
    }
  }
  return e_lik + e_z + e_pi + e_mulam - q_z - q_pi - q_mulam;
}

}  // namespace detail

/// Row-normalized responsibilities of each point under a fitted posterior.
inline Eigen::MatrixXd responsibilities(std::span<const Vec2> points,
                                        std::span<const GaussianPosterior> posterior) {
  return detail::normalize_rows(detail::log_rho(points, posterior));
}

/// Mean-field variational fit of a Gaussian mixture with at most n_max
/// components. Components whose expected weight falls below the prune
/// threshold are dropped after convergence; points are then hard-assigned to
/// their most responsible surviving component.
inline ClusterResult fit_vigmm(std::span<const Vec2> points, const VigmmConfig& cfg = {}) {
  if (points.empty()) throw Error(ErrorCode::kEmptyInput, "no points to cluster");
  if (cfg.n_max < 1) throw Error(ErrorCode::kInvalidConfig, "n_max must be >= 1");
  if (cfg.nu0 <= 1.0) throw Error(ErrorCode::kInvalidConfig, "nu0 must exceed 1");
  const std::size_t n = points.size();
  const int k = std::min<int>(cfg.n_max, static_cast<int>(n));

  detail::Prior pr;
  pr.alpha0 = cfg.dirichlet_alpha0 > 0.0 ? cfg.dirichlet_alpha0 : 1.0 / cfg.n_max;
  pr.beta0 = cfg.beta0;
  pr.nu0 = cfg.nu0;
  pr.m0 = Vec2::Zero();
  for (const auto& p : points) pr.m0 += p;
  pr.m0 /= static_cast<double>(n);
  if (cfg.w0) {
    pr.w0 = *cfg.w0;
  } else {
    double var = 0.0;
    for (const auto& p : points) var += (p - pr.m0).squaredNorm();
    var /= static_cast<double>(n) * detail::kDim;
    var = std::max(var, 1e-2);
    pr.w0 = Mat2::Identity() / (cfg.nu0 * var);
  }
  pr.w0_inv = pr.w0.inverse();

  std::mt19937_64 rng(cfg.seed);
  const auto centers = detail::kmeanspp_centers(points, k, rng);
  Eigen::MatrixXd r = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n), k);
  for (std::size_t i = 0; i < n; ++i) {
    r(static_cast<Eigen::Index>(i), detail::nearest_center(points[i], centers)) = 1.0;
  }

  const double threshold = std::max(cfg.weight_prune_threshold, 2.0 / static_cast<double>(n));

  // Coordinate ascent from given responsibilities until the ELBO settles.
  struct Run {
    std::vector<GaussianPosterior> q;
    std::vector<double> trace;
    int iterations = 0;
    bool converged = false;
  };
  auto ascend = [&](Eigen::MatrixXd resp) {
    Run run;
    for (int it = 0; it < cfg.max_iters; ++it) {
      const auto st = detail::sufficient_stats(points, resp);
      run.q = detail::m_step(st, pr);
      run.trace.push_back(detail::elbo(st, run.q, resp, pr));
      run.iterations = it + 1;
      const auto& tr = run.trace;
      if (tr.size() >= 2) {
        const double delta = tr.back() - tr[tr.size() - 2];
        if (std::abs(delta) < cfg.elbo_tol * std::abs(tr.back())) {
          run.converged = true;
          break;
        }
      }
      resp = responsibilities(points, run.q);
    }
    return run;
  };

  Run best = ascend(std::move(r));
  ClusterResult res;
  res.iterations = best.iterations;
  // Mean field gets stuck with one cluster split in two: neither half can
  // take over the other's points by small steps. Try removing each surviving
  // component (its points go to the rest under the current posterior) and
  // keep the removal when the re-converged bound is higher. The component
  // count stays n_max throughout, so bounds are comparable.
  for (int round = 0; cfg.deletion_moves && round < k; ++round) {
    double alpha_sum = 0.0;
    for (const auto& c : best.q) alpha_sum += c.alpha;
    std::vector<std::pair<double, int>> order;
    for (int j = 0; j < k; ++j) {
      const double w = best.q[static_cast<std::size_t>(j)].alpha / alpha_sum;
      if (w >= threshold) order.emplace_back(w, j);
    }
    if (order.size() < 2) break;
    std::sort(order.begin(), order.end());
    const Eigen::MatrixXd lr = detail::log_rho(points, best.q);
    bool accepted = false;
    for (const auto& [w, j] : order) {
      Eigen::MatrixXd trial = lr;
      trial.col(j).setConstant(-std::numeric_limits<double>::infinity());
      Run cand = ascend(detail::normalize_rows(std::move(trial)));
      res.iterations += cand.iterations;
      if (cand.trace.back() > best.trace.back() + std::abs(best.trace.back()) * cfg.elbo_tol) {
        best = std::move(cand);
        ++res.deletions;
        accepted = true;
        break;
      }
    }
    if (!accepted) break;
  }
  const auto& q = best.q;
  res.elbo_trace = std::move(best.trace);
  res.converged = best.converged;

  double alpha_sum = 0.0;
  for (const auto& c : q) alpha_sum += c.alpha;
  std::vector<GaussianPosterior> kept;
  for (const auto& c : q) {
    if (c.alpha / alpha_sum >= threshold) kept.push_back(c);
  }
  if (kept.empty()) {
    kept.push_back(*std::max_element(q.begin(), q.end(), [](const auto& a, const auto& b) {
      return a.alpha < b.alpha;
    }));
  }

  double kept_alpha = 0.0;
  for (const auto& c : kept) kept_alpha += c.alpha;
  for (const auto& c : kept) {
    ClusterComponent comp;
    comp.weight = c.alpha / kept_alpha;
    comp.mean = c.mean;
    comp.covariance = (c.nu * c.W).inverse();
    res.components.push_back(comp);
  }
  const Eigen::MatrixXd lr = detail::log_rho(points, kept);
  res.assignments.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    Eigen::Index best = 0;
    lr.row(static_cast<Eigen::Index>(i)).maxCoeff(&best);
    res.assignments[i] = static_cast<int>(best);
  }
  res.posterior = std::move(kept);
  return res;
}

/// Lloyd's algorithm from k-means++ seeds.
inline ClusterResult kmeans_baseline(std::span<const Vec2> points, int k, std::uint64_t seed,
                                     int max_iters = 100) {
  if (points.empty()) throw Error(ErrorCode::kEmptyInput, "no points to cluster");
  if (k < 1 || static_cast<std::size_t>(k) > points.size()) {
    throw Error(ErrorCode::kInvalidConfig, "k-means needs 1 <= k <= |points|");
  }
  std::mt19937_64 rng(seed);
  auto centers = detail::kmeanspp_centers(points, k, rng);
  std::vector<int> labels(points.size(), -1);
  std::vector<double> sse_trace;
  int it = 0;
  bool converged = false;
  for (; it < max_iters; ++it) {
    bool changed = false;
    double sse = 0.0;
    for (std::size_t i = 0; i < points.size(); ++i) {
      const int j = detail::nearest_center(points[i], centers);
      if (j != labels[i]) changed = true;
      labels[i] = j;
      sse += (points[i] - centers[static_cast<std::size_t>(j)]).squaredNorm();
    }
    sse_trace.push_back(sse);
    if (!changed && it > 0) {
      converged = true;
      break;
    }
    std::vector<Vec2> sums(static_cast<std::size_t>(k), Vec2::Zero());
    std::vector<int> counts(static_cast<std::size_t>(k), 0);
    for (std::size_t i = 0; i < points.size(); ++i) {
      sums[static_cast<std::size_t>(labels[i])] += points[i];
      ++counts[static_cast<std::size_t>(labels[i])];
    }
    for (std::size_t j = 0; j < centers.size(); ++j) {
      if (counts[j] > 0) centers[j] = sums[j] / counts[j];
    }
  }
  auto res = detail::from_labels(points, std::move(labels), k);
  for (std::size_t j = 0; j < centers.size(); ++j) res.components[j].mean = centers[j];
  res.sse_trace = std::move(sse_trace);
  res.iterations = it + (converged ? 1 : 0);
  res.converged = converged;
  return res;
}

/// Density-based clustering. Noise points are attached to the cluster with
/// the nearest centroid so that every point ends up in some cluster.
inline ClusterResult dbscan_baseline(std::span<const Vec2> points, double eps, int min_pts) {
  if (points.empty()) throw Error(ErrorCode::kEmptyInput, "no points to cluster");
  if (eps <= 0.0 || min_pts < 1) throw Error(ErrorCode::kInvalidConfig, "bad DBSCAN parameters");
  const std::size_t n = points.size();

  auto cell_of = [eps](const Vec2& p) {
    return std::pair<std::int64_t, std::int64_t>(
        static_cast<std::int64_t>(std::floor(p.x() / eps)),
        static_cast<std::int64_t>(std::floor(p.y() / eps)));
  };
  auto key = [](std::int64_t cx, std::int64_t cy) {
    return static_cast<std::uint64_t>(cx) * 0x9E3779B97F4A7C15ULL ^ static_cast<std::uint64_t>(cy);
  };
  std::unordered_map<std::uint64_t, std::vector<std::size_t>> grid;
  for (std::size_t i = 0; i < n; ++i) {
    const auto [cx, cy] = cell_of(points[i]);
    grid[key(cx, cy)].push_back(i);
  }
  const double eps2 = eps * eps;
  auto neighbors = [&](std::size_t i) {
    std::vector<std::size_t> out;
    const auto [cx, cy] = cell_of(points[i]);
    for (std::int64_t dx = -1; dx <= 1; ++dx) {
      for (std::int64_t dy = -1; dy <= 1; ++dy) {
        auto it = grid.find(key(cx + dx, cy + dy));
        if (it == grid.end()) continue;
        for (std::size_t j : it->second) {
          if ((points[j] - points[i]).squaredNorm() <= eps2) out.push_back(j);
        }
      }
    }
    std::sort(out.begin(), out.end());
    return out;
  };

  constexpr int kUnvisited = -2, kNoise = -1;
  std::vector<int> label(n, kUnvisited);
  int clusters = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (label[i] != kUnvisited) continue;
    auto nb = neighbors(i);
    if (static_cast<int>(nb.size()) < min_pts) {
      label[i] = kNoise;
      continue;
    }
    const int c = clusters++;
    label[i] = c;
    std::vector<std::size_t> frontier(nb.begin(), nb.end());
    for (std::size_t f = 0; f < frontier.size(); ++f) {
      const std::size_t j = frontier[f];
      if (label[j] == kNoise) label[j] = c;
      if (label[j] != kUnvisited) continue;
      label[j] = c;
      auto nb2 = neighbors(j);
      if (static_cast<int>(nb2.size()) >= min_pts) {
        frontier.insert(frontier.end(), nb2.begin(), nb2.end());
      }
    }
  }

  if (clusters == 0) {
    return detail::from_labels(points, std::vector<int>(n, 0), 1);
  }
  std::vector<Vec2> centroid(static_cast<std::size_t>(clusters), Vec2::Zero());
  std::vector<int> count(static_cast<std::size_t>(clusters), 0);
  for (std::size_t i = 0; i < n; ++i) {
    if (label[i] >= 0) {
      centroid[static_cast<std::size_t>(label[i])] += points[i];
      ++count[static_cast<std::size_t>(label[i])];
    }
  }
  for (int c = 0; c < clusters; ++c) centroid[c] /= count[c];
  for (std::size_t i = 0; i < n; ++i) {
    if (label[i] < 0) label[i] = detail::nearest_center(points[i], centroid);
  }
  return detail::from_labels(points, std::move(label), clusters);
}

}  // namespace ellid
