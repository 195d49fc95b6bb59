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

// Frame-to-frame ellipse association and constant-velocity Kalman tracking
// of pose [x, y, theta] and rates [vx, vy, omega].

#include <ellid/error.hpp>
#include <ellid/geometry.hpp>

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <span>
#include <tuple>
#include <vector>

namespace ellid {

struct FeatureVector {
  Vec2 center = Vec2::Zero();
  double r1 = 1.0;
  double r2 = 1.0;
  double theta = 0.0;

  static FeatureVector from(const StandardEllipse& e) { return {e.center, e.r1, e.r2, e.theta}; }
  StandardEllipse ellipse() const { return {center, r1, r2, theta}; }
};

/// Optional per-component scales for the feature distance. Unit weights give
/// the plain Euclidean distance over (xc, r1, r2, theta).
struct FeatureWeights {
  double position = 1.0;
  double r1 = 1.0;
  double r2 = 1.0;
  double theta = 1.0;
};

inline double feature_distance(const FeatureVector& a, const FeatureVector& b,
                               const FeatureWeights& w = {}) {
  const double dth = std::abs(angle_diff_pi(a.theta, b.theta));
  const double dr1 = a.r1 - b.r1;
  const double dr2 = a.r2 - b.r2;
  return std::sqrt(w.position * (a.center - b.center).squaredNorm() + w.r1 * dr1 * dr1 +
                   w.r2 * dr2 * dr2 + w.theta * dth * dth);
}

struct Match {
  std::optional<std::size_t> prev;  // nullopt: new object
  std::size_t curr = 0;
  double distance = 0.0;
};

struct MatchResult {
  std::vector<Match> matches;  // one per current feature, ordered by curr
  std::vector<std::size_t> unmatched_prev;
};

/// Greedy one-to-one association by globally ascending distance. Pairs
/// farther apart than `gate` are never matched.
inline MatchResult match_frames(std::span<const FeatureVector> prev,
                                std::span<const FeatureVector> curr, double gate,
                                const FeatureWeights& w = {}) {
  std::vector<std::tuple<double, std::size_t, std::size_t>> cand;
  for (std::size_t i = 0; i < prev.size(); ++i) {
    for (std::size_t j = 0; j < curr.size(); ++j) {
      const double d = feature_distance(prev[i], curr[j], w);
      if (d <= gate) cand.emplace_back(d, i, j);
    }
  }
  std::sort(cand.begin(), cand.end());
  std::vector<bool> prev_used(prev.size(), false);
  MatchResult res;
  res.matches.resize(curr.size());
  for (std::size_t j = 0; j < curr.size(); ++j) res.matches[j].curr = j;
  std::vector<bool> curr_used(curr.size(), false);
  for (const auto& [d, i, j] : cand) {
    if (prev_used[i] || curr_used[j]) continue;
    prev_used[i] = curr_used[j] = true;
    res.matches[j].prev = i;
    res.matches[j].distance = d;
  }
  for (std::size_t i = 0; i < prev.size(); ++i) {
    if (!prev_used[i]) res.unmatched_prev.push_back(i);
  }
  return res;
}

struct Motion {
  Vec2 velocity = Vec2::Zero();
  double omega = 0.0;
};

/// Finite-difference velocity between matched features. The angular rate
/// follows the shortest mod-pi path, so |omega| above pi / (2 dt) aliases.
inline Motion estimate_motion(const FeatureVector& prev, const FeatureVector& curr, double dt) {
  if (!(dt > 0.0)) throw Error(ErrorCode::kZeroDt, "motion estimate needs dt > 0");
  return {(curr.center - prev.center) / dt, angle_diff_pi(curr.theta, prev.theta) / dt};
}

using TrackState = Eigen::Matrix<double, 6, 1>;
using TrackCov = Eigen::Matrix<double, 6, 6>;

struct Track {
  int id = 0;
  TrackState state = TrackState::Zero();  // x, y, theta, vx, vy, omega
  TrackCov covariance = TrackCov::Identity();
  double r1 = 1.0;
  double r2 = 1.0;
  double last_seen = 0.0;
  int age = 0;
  int missed = 0;

  Vec2 position() const { return state.head<2>(); }
  Vec2 velocity() const { return state.segment<2>(3); }
  double theta() const { return state(2); }
  double omega() const { return state(5); }
  FeatureVector feature() const { return {position(), r1, r2, theta()}; }
  StandardEllipse ellipse() const { return {position(), r1, r2, theta()}; }
};

struct TrackerConfig {
  double gate_distance = 1.0;
  double process_noise_pos = 1.0;
  double process_noise_ang = 1.0;
  double meas_noise_pos = 0.01;
  double meas_noise_ang = 0.01;
  int max_missed = 3;
  // Initial variance of the unobserved rates of a newborn track.
  double init_var_vel = 100.0;
  double init_var_omega = 10.0;
  FeatureWeights weights;
};

/// Ellipse of a track extrapolated with its constant velocities.
inline StandardEllipse predict_ellipse(const Track& t, double horizon_dt) {
  StandardEllipse e;
  e.center = t.position() + t.velocity() * horizon_dt;
  e.r1 = t.r1;
  e.r2 = t.r2;
  e.theta = wrap_pi(t.theta() + t.omega() * horizon_dt);
  if (is_near_circular(e)) e.theta = 0.0;
  return e;
}

struct TrackSet {
  std::vector<Track> tracks;
  int next_id = 0;
};

namespace detail {

inline TrackCov process_noise(const TrackerConfig& cfg, double dt) {
  TrackCov q = TrackCov::Zero();
  const double a = dt * dt * dt / 3.0, b = dt * dt / 2.0, c = dt;
  for (int k = 0; k < 3; ++k) {
    const double s = k < 2 ? cfg.process_noise_pos : cfg.process_noise_ang;
    q(k, k) = s * a;
    q(k, k + 3) = q(k + 3, k) = s * b;
    q(k + 3, k + 3) = s * c;
  }
  return q;
}

inline void kf_predict(Track& t, double dt, const TrackerConfig& cfg) {
  if (dt <= 0.0) return;
  TrackCov f = TrackCov::Identity();
  f.topRightCorner<3, 3>() = Eigen::Matrix3d::Identity() * dt;
  t.state = f * t.state;
  t.state(2) = wrap_pi(t.state(2));
  t.covariance = f * t.covariance * f.transpose() + process_noise(cfg, dt);
}

inline void kf_update(Track& t, const FeatureVector& z, const TrackerConfig& cfg) {
  Eigen::Vector3d innov(z.center.x() - t.state(0), z.center.y() - t.state(1),
                        angle_diff_pi(z.theta, t.state(2)));
  const Eigen::Matrix3d r =
      Eigen::Vector3d(cfg.meas_noise_pos, cfg.meas_noise_pos, cfg.meas_noise_ang).asDiagonal();
  const Eigen::Matrix3d s = t.covariance.topLeftCorner<3, 3>() + r;
  const Eigen::Matrix<double, 6, 3> k =
      t.covariance.leftCols<3>() * s.ldlt().solve(Eigen::Matrix3d::Identity());
  t.state += k * innov;
  t.state(2) = wrap_pi(t.state(2));
  // Joseph form keeps the covariance symmetric positive definite.
  Eigen::Matrix<double, 6, 6> ikh = TrackCov::Identity();
  ikh.leftCols<3>() -= k;
  t.covariance = ikh * t.covariance * ikh.transpose() + k * r * k.transpose();
  t.covariance = 0.5 * (t.covariance + t.covariance.transpose());
  t.r1 = z.r1;
  t.r2 = z.r2;
}

}  // namespace detail

/// One tracker step: predict every track to `timestamp`, associate with the
/// observations, correct matched tracks, spawn tracks for unmatched
/// observations and drop tracks missed more than max_missed times in a row.
inline TrackSet track_update(TrackSet set, std::span<const FeatureVector> observations,
                             double timestamp, const TrackerConfig& cfg = {}) {
  std::vector<FeatureVector> predicted;
  predicted.reserve(set.tracks.size());
  for (auto& t : set.tracks) {
    detail::kf_predict(t, timestamp - t.last_seen, cfg);
    predicted.push_back(t.feature());
  }
  const MatchResult m = match_frames(predicted, observations, cfg.gate_distance, cfg.weights);

  std::vector<Track> next;
  for (const auto& match : m.matches) {
    if (!match.prev) continue;
    Track t = set.tracks[*match.prev];
    detail::kf_update(t, observations[match.curr], cfg);
    t.last_seen = timestamp;
    ++t.age;
    t.missed = 0;
    next.push_back(std::move(t));
  }
  for (std::size_t i : m.unmatched_prev) {
    Track t = set.tracks[i];
    ++t.missed;
    t.last_seen = timestamp;
    if (t.missed <= cfg.max_missed) next.push_back(std::move(t));
  }
  for (const auto& match : m.matches) {
    if (match.prev) continue;
    const FeatureVector& z = observations[match.curr];
    Track t;
    t.id = set.next_id++;
    t.state << z.center.x(), z.center.y(), wrap_pi(z.theta), 0.0, 0.0, 0.0;
    t.covariance = TrackState(cfg.meas_noise_pos, cfg.meas_noise_pos, cfg.meas_noise_ang,
                              cfg.init_var_vel, cfg.init_var_vel, cfg.init_var_omega)
                       .asDiagonal();
    t.r1 = z.r1;
    t.r2 = z.r2;
    t.last_seen = timestamp;
    t.age = 1;
    next.push_back(std::move(t));
  }
  std::sort(next.begin(), next.end(), [](const Track& a, const Track& b) { return a.id < b.id; });
  set.tracks = std::move(next);
  return set;
}

/// Stateful wrapper owning a TrackSet. Single owner; not thread-safe.
class Tracker {
 public:
  explicit Tracker(TrackerConfig cfg = {}) : cfg_(cfg) {}

  const std::vector<Track>& update(std::span<const FeatureVector> observations, double timestamp) {
    set_ = track_update(std::move(set_), observations, timestamp, cfg_);
    return set_.tracks;
  }

  const std::vector<Track>& tracks() const { return set_.tracks; }
  const TrackerConfig& config() const { return cfg_; }

 private:
  TrackerConfig cfg_;
  TrackSet set_;
};

}  // namespace ellid
