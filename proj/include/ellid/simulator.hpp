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

// Ground-truth scenario engine: polygon obstacles under constant rigid
// motion, boundary point sampling, exact collision checks and the closed
// loop sample -> identify -> track -> plan -> step.

#include <ellid/geometry.hpp>
#include <ellid/pipeline.hpp>
#include <ellid/planner.hpp>
#include <ellid/tracking.hpp>

#include <Eigen/Dense>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <random>
#include <string>
#include <vector>

namespace ellid {

using Polygon = std::vector<Vec2>;

struct ObstacleMotion {
  Vec2 velocity = Vec2::Zero();
  double omega = 0.0;  // rad/s, counter-clockwise positive
};

struct Obstacle {
  std::string name;
  std::vector<Polygon> parts;  // body-frame outlines, relative to the pose
  Vec2 position = Vec2::Zero();
  double orientation = 0.0;
  ObstacleMotion motion;

  bool is_static() const { return motion.velocity.norm() == 0.0 && motion.omega == 0.0; }
};

struct Scenario {
  std::string name;
  std::vector<Obstacle> obstacles;
  VehicleState vehicle_start;
  Vec2 goal = Vec2::Zero();
  double point_density = 10.0;  // points per meter of outline
  double sensor_noise_sigma = 0.01;
  double frame_dt = 0.1;
  double duration = 10.0;
  std::uint64_t seed = 0;
};

inline double perimeter(const Polygon& poly) {
  double p = 0.0;
  for (std::size_t i = 0; i < poly.size(); ++i) p += (poly[(i + 1) % poly.size()] - poly[i]).norm();
  return p;
}

inline double total_perimeter(const Scenario& s) {
  double p = 0.0;
  for (const auto& o : s.obstacles)
    for (const auto& part : o.parts) p += perimeter(part);
  return p;
}

/// Number of points sample_points() returns for this scenario.
inline int total_point_count(const Scenario& s) {
  return static_cast<int>(std::llround(s.point_density * total_perimeter(s)));
}

/// World-frame outline of every part at time t.
inline std::vector<Polygon> posed_outlines(const Obstacle& o, double t) {
  const double ang = o.orientation + o.motion.omega * t;
  const double c = std::cos(ang), s = std::sin(ang);
  Mat2 rot;
  rot << c, -s, s, c;
  const Vec2 pos = o.position + o.motion.velocity * t;
  std::vector<Polygon> out;
  for (const auto& part : o.parts) {
    Polygon p;
    p.reserve(part.size());
    for (const auto& v : part) p.push_back(pos + rot * v);
    out.push_back(std::move(p));
  }
  return out;
}

namespace detail {

inline std::vector<int> split_counts(std::span<const double> lengths, int total) {
  double sum = 0.0;
  for (double l : lengths) sum += l;
  std::vector<int> counts(lengths.size(), 0);
  if (sum <= 0.0 || total <= 0) return counts;
  std::vector<std::pair<double, std::size_t>> rem;
  int assigned = 0;
  for (std::size_t i = 0; i < lengths.size(); ++i) {
    const double exact = total * lengths[i] / sum;
    counts[i] = static_cast<int>(std::floor(exact));
    assigned += counts[i];
    rem.emplace_back(exact - counts[i], i);
  }
  std::stable_sort(rem.begin(), rem.end(), [](const auto& a, const auto& b) { return a.first > b.first; });
  for (std::size_t k = 0; assigned < total; ++k, ++assigned) ++counts[rem[k % rem.size()].second];
  return counts;
}

inline void sample_polygon(const Polygon& poly, int n, std::vector<Vec2>& out) {
  if (n <= 0 || poly.size() < 2) return;
  const double per = perimeter(poly);
  std::size_t edge = 0;
  double edge_start = 0.0;
  double edge_len = (poly[1 % poly.size()] - poly[0]).norm();
  for (int k = 0; k < n; ++k) {
    const double s = (k + 0.5) * per / n;
    while (s > edge_start + edge_len && edge + 1 < poly.size()) {
      edge_start += edge_len;
      ++edge;
      edge_len = (poly[(edge + 1) % poly.size()] - poly[edge]).norm();
    }
    const Vec2 a = poly[edge], b = poly[(edge + 1) % poly.size()];
    const double f = edge_len > 0.0 ? (s - edge_start) / edge_len : 0.0;
    out.push_back(a + (b - a) * f);
  }
}

inline double point_segment_distance(const Vec2& p, const Vec2& a, const Vec2& b) {
  const Vec2 ab = b - a;
  const double len2 = ab.squaredNorm();
  const double f = len2 > 0.0 ? std::clamp((p - a).dot(ab) / len2, 0.0, 1.0) : 0.0;
  return (p - (a + f * ab)).norm();
}

inline bool point_in_polygon(const Vec2& p, const Polygon& poly) {
  bool inside = false;
  for (std::size_t i = 0, j = poly.size() - 1; i < poly.size(); j = i++) {
    const Vec2& a = poly[i];
    const Vec2& b = poly[j];
    if ((a.y() > p.y()) != (b.y() > p.y()) &&
        p.x() < (b.x() - a.x()) * (p.y() - a.y()) / (b.y() - a.y()) + a.x()) {
      inside = !inside;
    }
  }
  return inside;
}

}  // namespace detail

/// Lidar-like sample of every obstacle outline at time t: evenly spaced by
/// arc length, then perturbed with Gaussian noise. The noise stream depends
/// only on the scenario seed and t rounded to the microsecond.
inline std::vector<Vec2> sample_points(const Scenario& s, double t) {
  std::vector<const Polygon*> parts;
  std::vector<double> lengths;
  for (const auto& o : s.obstacles) {
    for (const auto& part : o.parts) {
      parts.push_back(&part);
      lengths.push_back(perimeter(part));
    }
  }
  const auto counts = detail::split_counts(lengths, total_point_count(s));
  std::vector<Vec2> out;
  out.reserve(static_cast<std::size_t>(total_point_count(s)));
  std::size_t k = 0;
  for (const auto& o : s.obstacles) {
    const auto posed = posed_outlines(o, t);
    for (const auto& poly : posed) detail::sample_polygon(poly, counts[k++], out);
  }
  if (s.sensor_noise_sigma > 0.0) {
    // Key the stream on whole microseconds so k*dt and a millisecond file
    // name give the same noise.
    const auto tb = static_cast<std::uint64_t>(std::llround(t * 1e6));
    std::seed_seq seq{static_cast<std::uint32_t>(s.seed), static_cast<std::uint32_t>(s.seed >> 32),
                      static_cast<std::uint32_t>(tb), static_cast<std::uint32_t>(tb >> 32)};
    std::mt19937_64 rng(seq);
    std::normal_distribution<double> noise(0.0, s.sensor_noise_sigma);
    for (auto& p : out) {
      const double dx = noise(rng);
      const double dy = noise(rng);
      p += Vec2(dx, dy);
    }
  }
  return out;
}

/// Signed distance from p to the nearest posed obstacle (negative inside).
inline double ground_truth_distance(const Scenario& s, double t, const Vec2& p) {
  double best = std::numeric_limits<double>::infinity();
  for (const auto& o : s.obstacles) {
    for (const auto& poly : posed_outlines(o, t)) {
      double d = std::numeric_limits<double>::infinity();
      for (std::size_t i = 0; i < poly.size(); ++i) {
        d = std::min(d, detail::point_segment_distance(p, poly[i], poly[(i + 1) % poly.size()]));
      }
      if (detail::point_in_polygon(p, poly)) d = -d;
      best = std::min(best, d);
    }
  }
  return best;
}

/// True when the vehicle disc touches or overlaps any obstacle at time t.
inline bool ground_truth_collision(const Scenario& s, double t, const Vec2& vehicle_pos,
                                   double vehicle_radius) {
  return ground_truth_distance(s, t, vehicle_pos) <= vehicle_radius;
}

// ---------------------------------------------------------------------------
// Built-in maps.

inline Polygon rectangle(double w, double h) {
  return {{-w / 2, -h / 2}, {w / 2, -h / 2}, {w / 2, h / 2}, {-w / 2, h / 2}};
}

/// Plus outline: horizontal arm half-length a, vertical arm half-length b,
/// arm width w.
inline Polygon plus_shape(double a, double b, double w) {
  const double h = w / 2;
  return {{-a, -h}, {-h, -h}, {-h, -b}, {h, -b}, {h, -h}, {a, -h},
          {a, h},   {h, h},   {h, b},   {-h, b}, {-h, h}, {-a, h}};
}

inline Obstacle make_obstacle(std::string name, Polygon outline, Vec2 pos, double orientation,
                              Vec2 velocity = Vec2::Zero(), double omega = 0.0) {
  Obstacle o;
  o.name = std::move(name);
  o.parts.push_back(std::move(outline));
  o.position = pos;
  o.orientation = orientation;
  o.motion = {velocity, omega};
  return o;
}

/// Sets the density so that the scenario samples exactly `points` points.
inline void set_point_total(Scenario& s, int points) {
  s.point_density = points / total_perimeter(s);
}

inline std::vector<Scenario> builtin_maps() {
  constexpr double kQuarterTurn = std::numbers::pi / 2;
  std::vector<Scenario> maps;

  {
    Scenario s;
    s.name = "map1";
    s.obstacles = {
        make_obstacle("block_a", rectangle(1.2, 1.0), {3.5, 0.3}, 0.2),
        make_obstacle("block_b", rectangle(1.0, 1.3), {3.8, 4.2}, -0.1),
        make_obstacle("block_c", rectangle(1.1, 1.1), {3.2, -3.9}, 0.4),
        make_obstacle("block_d", rectangle(1.3, 0.9), {8.0, 2.0}, 0.0),
        make_obstacle("block_e", rectangle(1.0, 1.0), {8.2, -2.0}, 0.3),
        make_obstacle("block_f", rectangle(1.2, 0.8), {12.0, 4.5}, -0.2),
    };
    s.vehicle_start = {0.0, 0.0, 0.0, 0.0};
    s.goal = {13.0, 0.0};
    s.duration = 8.0;
    set_point_total(s, 520);
    maps.push_back(std::move(s));
  }
  {
    Scenario s;
    s.name = "map2";
    s.obstacles = {make_obstacle("plus", plus_shape(1.5, 1.5, 0.5), {0.0, 0.0}, 0.0, {5.0, 2.0},
                                 kQuarterTurn)};
    s.vehicle_start = {-6.0, -4.0, 0.0, 0.0};
    s.goal = {-6.0, 6.0};
    s.duration = 3.0;
    set_point_total(s, 214);
    maps.push_back(std::move(s));
  }
  {
    Scenario s;
    s.name = "map3";
    s.obstacles = {
        make_obstacle("mover_a", rectangle(1.2, 1.6), {7.0, 0.0}, 0.0, {-5.0, 0.0}),
        make_obstacle("mover_b", rectangle(1.4, 1.2), {11.0, 2.2}, 0.0, {-5.0, 0.0}),
    };
    s.vehicle_start = {0.0, 0.0, 0.0, 0.0};
    s.goal = {14.0, 0.0};
    s.duration = 8.0;
    set_point_total(s, 248);
    maps.push_back(std::move(s));
  }
  {
    Scenario s;
    s.name = "map4";
    s.obstacles = {
        make_obstacle("wall_upper", rectangle(16.0, 0.3), {7.0, 4.0}, 0.0),
        make_obstacle("wall_lower", rectangle(16.0, 0.3), {7.0, -4.0}, 0.0),
        make_obstacle("rotor", rectangle(3.6, 0.4), {7.0, 1.9}, 0.0, Vec2::Zero(), kQuarterTurn),
    };
    s.vehicle_start = {0.0, -0.5, 0.0, 0.0};
    s.goal = {14.0, -0.5};
    s.duration = 8.0;
    set_point_total(s, 908);
    maps.push_back(std::move(s));
  }
  {
    Scenario s;
    s.name = "map5";
    s.obstacles = {
        make_obstacle("wall_top", rectangle(22.6, 0.3), {10.0, 5.0}, 0.0),
        make_obstacle("wall_bottom", rectangle(22.6, 0.3), {10.0, -5.0}, 0.0),
        make_obstacle("wall_left", rectangle(0.3, 9.4), {-1.5, 0.0}, 0.0),
        make_obstacle("wall_right", rectangle(0.3, 9.4), {21.5, 0.0}, 0.0),
        make_obstacle("rotor_1", rectangle(4.0, 0.4), {5.0, 2.6}, 0.0, Vec2::Zero(), kQuarterTurn),
        make_obstacle("rotor_2", rectangle(4.0, 0.4), {9.0, -2.6}, kQuarterTurn / 2, Vec2::Zero(),
                      kQuarterTurn),
        make_obstacle("rotor_3", rectangle(4.0, 0.4), {13.0, 2.6}, kQuarterTurn, Vec2::Zero(),
                      kQuarterTurn),
        make_obstacle("rotor_4", rectangle(4.0, 0.4), {17.0, -2.6}, 1.5 * kQuarterTurn,
                      Vec2::Zero(), kQuarterTurn),
    };
    s.vehicle_start = {0.5, 0.0, 0.0, 0.0};
    s.goal = {19.5, 0.0};
    s.duration = 12.0;
    set_point_total(s, 2418);
    maps.push_back(std::move(s));
  }
  return maps;
}

// ---------------------------------------------------------------------------
// Closed-loop episodes.

struct EpisodeOptions {
  double goal_tolerance = 0.2;
  bool record_points = true;
};

struct FrameRecord {
  double time = 0.0;
  std::vector<Vec2> points;
  std::vector<StandardEllipse> ellipses;
  std::vector<Track> tracks;
  MpcSolution plan;
  VehicleState vehicle;  // state at the start of the frame
  double identification_ms = 0.0;
  double planning_ms = 0.0;
};

struct EpisodeOutcome {
  bool reached = false;
  double time_to_goal = std::numeric_limits<double>::quiet_NaN();
  double min_clearance = std::numeric_limits<double>::infinity();
  int collisions = 0;
  double end_time = 0.0;
};

struct EpisodeLog {
  std::string scenario;
  std::vector<FrameRecord> frames;
  std::vector<VehicleState> trajectory;  // every control step
  EpisodeOutcome outcome;

  double mean_identification_ms() const {
    if (frames.empty()) return 0.0;
    double s = 0.0;
    for (const auto& f : frames) s += f.identification_ms;
    return s / static_cast<double>(frames.size());
  }
};

/// Runs the closed loop until the goal is reached, the vehicle collides with
/// ground truth, or the scenario duration runs out. Each frame identifies
/// and tracks obstacles once; the planner then runs every control step of
/// the frame against the tracks extrapolated to that step.
inline EpisodeLog run_episode(const Scenario& scenario, const PipelineConfig& pipeline_cfg,
                              const TrackerConfig& tracker_cfg, const MpcConfig& mpc_cfg,
                              const EpisodeOptions& opts = {}) {
  using clock = std::chrono::steady_clock;
  EpisodeLog log;
  log.scenario = scenario.name;
  VehicleState x = scenario.vehicle_start;
  log.trajectory.push_back(x);
  Tracker tracker(tracker_cfg);
  RecedingHorizonPlanner planner(mpc_cfg);
  const int substeps = std::max(1, static_cast<int>(std::lround(scenario.frame_dt / mpc_cfg.dt)));
  const double step_dt = scenario.frame_dt / substeps;
  const double radius = mpc_cfg.vehicle_radius;
  auto& out = log.outcome;

  auto clearance_at = [&](double t) {
    return ground_truth_distance(scenario, t, x.position()) - radius;
  };
  out.min_clearance = clearance_at(0.0);
  if ((x.position() - scenario.goal).norm() < opts.goal_tolerance) {
    out.reached = true;
    out.time_to_goal = 0.0;
    return log;
  }

  bool done = false;
  for (int k = 0; !done; ++k) {
    const double t = k * scenario.frame_dt;
    if (t >= scenario.duration) break;
    FrameRecord rec;
    rec.time = t;
    rec.vehicle = x;

    const auto pts = sample_points(scenario, t);
    auto t0 = clock::now();
    // Nothing in view means nothing to identify, not an input error.
    const Identification ident = pts.empty() ? Identification{} : identify(pts, pipeline_cfg);
    std::vector<FeatureVector> features;
    for (const auto& e : ident.ellipses) features.push_back(FeatureVector::from(e.ellipse));
    const auto& tracks = tracker.update(features, t);
    rec.identification_ms = detail::elapsed_ms(t0);
    rec.ellipses = ident.shapes();
    rec.tracks = tracks;
    if (opts.record_points) rec.points = pts;

    t0 = clock::now();
    for (int s = 0; s < substeps; ++s) {
      const MpcSolution& sol = planner.plan(x, scenario.goal, tracks, s * step_dt);
      if (s == 0) rec.plan = sol;
      x = step_dynamics(x, sol.controls.front(), step_dt, mpc_cfg.mass);
      log.trajectory.push_back(x);
      const double tt = t + (s + 1) * step_dt;
      out.end_time = tt;
      const double clr = clearance_at(tt);
      out.min_clearance = std::min(out.min_clearance, clr);
      if (clr <= 0.0) {
        ++out.collisions;
        done = true;
        break;
      }
      if ((x.position() - scenario.goal).norm() < opts.goal_tolerance) {
        out.reached = true;
        out.time_to_goal = tt;
        done = true;
        break;
      }
      if (tt >= scenario.duration) {
        done = true;
        break;
      }
    }
    rec.planning_ms = detail::elapsed_ms(t0);
    log.frames.push_back(std::move(rec));
  }
  return log;
}

/// Shortest possible travel time to the goal for a point mass starting at
/// rest with both force components saturated and the speed bound applied
/// along the diagonal.
inline double straight_line_time_bound(const Scenario& s, const MpcConfig& cfg) {
  const double dist =
      std::max(0.0, (s.goal - s.vehicle_start.position()).norm() - 0.2);
  const double a = cfg.u_max.cwiseAbs().cwiseMax(cfg.u_min.cwiseAbs()).norm() / cfg.mass;
  const double vmax = cfg.xi_max.tail<2>().cwiseAbs().norm();
  const double accel_dist = vmax * vmax / (2.0 * a);
  if (dist <= accel_dist) return std::sqrt(2.0 * dist / a);
  return vmax / a + (dist - accel_dist) / vmax;
}

}  // namespace ellid
