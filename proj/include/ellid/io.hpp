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

// Text formats: point files, JSON scenario fixtures and run configs, CSV
// exports and SVG renders.

#include <ellid/error.hpp>
#include <ellid/geometry.hpp>
#include <ellid/pipeline.hpp>
#include <ellid/planner.hpp>
#include <ellid/simulator.hpp>
#include <ellid/tracking.hpp>

#include <json.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <istream>
#include <limits>
#include <numbers>
#include <optional>
#include <ostream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

namespace ellid {

using json = nlohmann::json;

// ---------------------------------------------------------------------------
// Point files: one "x y" pair per line. Commas also separate; blank lines
// and '#' comments are ignored.

inline std::vector<Vec2> parse_points(std::istream& in, const std::string& source = "<input>") {
  std::vector<Vec2> pts;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream ss(line);
    double x = 0.0, y = 0.0;
    if (!(ss >> x)) {
      ss.clear();
      std::string rest;
      if (ss >> rest) {
        throw Error(ErrorCode::kParse,
                    source + ":" + std::to_string(lineno) + ": expected 'x y', got '" + line + "'");
      }
      continue;  // blank
    }
    std::string extra;
    if (!(ss >> y) || (ss >> extra) || !std::isfinite(x) || !std::isfinite(y)) {
      throw Error(ErrorCode::kParse,
                  source + ":" + std::to_string(lineno) + ": expected 'x y', got '" + line + "'");
    }
    pts.emplace_back(x, y);
  }
  return pts;
}

inline std::vector<Vec2> read_points_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kParse, "cannot open " + path);
  return parse_points(in, path);
}

inline void write_points(std::ostream& out, std::span<const Vec2> pts) {
  out << std::setprecision(17);
  for (const auto& p : pts) out << p.x() << ' ' << p.y() << '\n';
}

// ---------------------------------------------------------------------------
// Strict JSON object reading.

namespace detail {

class ObjectReader {
 public:
  ObjectReader(const json& j, std::string where) : j_(j), where_(std::move(where)) {
    if (!j_.is_object()) throw Error(ErrorCode::kInvalidConfig, where_ + ": expected an object");
  }

  bool has(const char* key) const { return j_.contains(key); }

  const json* child(const char* key) {
    seen_.insert(key);
    auto it = j_.find(key);
    return it == j_.end() ? nullptr : &*it;
  }

  template <class T>
  void get(const char* key, T& out) {
    const json* v = child(key);
    if (!v) return;
    try {
      out = v->get<T>();
    } catch (const json::exception& e) {
      throw Error(ErrorCode::kInvalidConfig, path(key) + ": " + e.what());
    }
  }

  void get_vec2(const char* key, Vec2& out) {
    const json* v = child(key);
    if (!v) return;
    out = to_vec2(*v, path(key));
  }

  std::string path(const char* key) const { return where_ + "." + key; }

  void finish() const {
    for (const auto& item : j_.items()) {
      if (!seen_.count(item.key())) {
        throw Error(ErrorCode::kInvalidConfig, "unknown key '" + where_ + "." + item.key() + "'");
      }
    }
  }

  static Vec2 to_vec2(const json& v, const std::string& where) {
    try {
      const auto a = v.get<std::array<double, 2>>();
      return {a[0], a[1]};
    } catch (const json::exception&) {
      throw Error(ErrorCode::kInvalidConfig, where + ": expected [x, y]");
    }
  }

 private:
  const json& j_;
  std::string where_;
  std::set<std::string> seen_;
};

template <int N>
Eigen::Matrix<double, N, N> weight_matrix(const json& v, const std::string& where) {
  Eigen::Matrix<double, N, N> m = Eigen::Matrix<double, N, N>::Zero();
  try {
    if (v.is_array() && v.size() == N && v[0].is_number()) {
      for (int i = 0; i < N; ++i) m(i, i) = v[static_cast<std::size_t>(i)].get<double>();
    } else {
      const auto rows = v.get<std::vector<std::vector<double>>>();
      if (rows.size() != N) throw Error(ErrorCode::kInvalidConfig, where + ": wrong size");
      for (int i = 0; i < N; ++i) {
        if (rows[static_cast<std::size_t>(i)].size() != N)
          throw Error(ErrorCode::kInvalidConfig, where + ": wrong size");
        for (int k = 0; k < N; ++k) m(i, k) = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(k)];
      }
    }
  } catch (const json::exception&) {
    throw Error(ErrorCode::kInvalidConfig, where + ": expected a diagonal or a square matrix");
  }
  return m;
}

inline json vec2_json(const Vec2& v) { return json::array({v.x(), v.y()}); }

// JSON has no infinity; null stands for an absent bound.
inline double bound_from_json(const json& v, double missing) {
  return v.is_null() ? missing : v.get<double>();
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Run configuration.

struct RunConfig {
  PipelineConfig pipeline;
  TrackerConfig tracker;
  MpcConfig mpc;
  EpisodeOptions episode;
  std::uint64_t seed = 0;
  int bench_repetitions = 20;
};

inline ClusterMethod parse_cluster_method(const std::string& s) {
  if (s == "vigmm") return ClusterMethod::kVigmm;
  if (s == "kmeans") return ClusterMethod::kKmeans;
  if (s == "dbscan") return ClusterMethod::kDbscan;
  throw Error(ErrorCode::kInvalidConfig, "unknown cluster method '" + s + "'");
}

inline const char* to_string(ClusterMethod m) {
  switch (m) {
    case ClusterMethod::kVigmm: return "vigmm";
    case ClusterMethod::kKmeans: return "kmeans";
    case ClusterMethod::kDbscan: return "dbscan";
  }
  return "unknown";
}

/// Throws InvalidConfig when a field is out of its domain.
inline void validate(const RunConfig& c) {
  auto fail = [](const std::string& m) { throw Error(ErrorCode::kInvalidConfig, m); };
  const auto& v = c.pipeline.vigmm;
  if (v.n_max < 1) fail("vigmm.n_max must be >= 1");
  if (!(v.nu0 > 1.0)) fail("vigmm.nu0 must be > 1");
  if (!(v.beta0 > 0.0)) fail("vigmm.beta0 must be > 0");
  if (!(v.elbo_tol > 0.0)) fail("vigmm.elbo_tol must be > 0");
  if (v.max_iters < 1) fail("vigmm.max_iters must be >= 1");
  if (!(v.weight_prune_threshold > 0.0 && v.weight_prune_threshold < 1.0))
    fail("vigmm.weight_prune_threshold must be in (0, 1)");
  if (!(c.pipeline.mvee.epsilon > 0.0)) fail("mvee.epsilon must be > 0");
  if (c.pipeline.mvee.max_iters < 0) fail("mvee.max_iters must be >= 0");
  if (c.pipeline.mvee.regularization < 0.0) fail("mvee.regularization must be >= 0");
  const auto& r = c.pipeline.refine;
  if (!(r.ratio_threshold > 0.0)) fail("refine.ratio_threshold must be > 0");
  if (r.union_samples < 3) fail("refine.union_samples must be >= 3");
  if (r.max_passes < 1) fail("refine.max_passes must be >= 1");
  if (c.pipeline.kmeans_k < 1) fail("pipeline.kmeans_k must be >= 1");
  if (!(c.pipeline.dbscan_eps > 0.0)) fail("pipeline.dbscan_eps must be > 0");
  if (c.pipeline.dbscan_min_pts < 1) fail("pipeline.dbscan_min_pts must be >= 1");
  const auto& t = c.tracker;
  if (!(t.gate_distance > 0.0)) fail("tracker.gate_distance must be > 0");
  if (t.max_missed < 0) fail("tracker.max_missed must be >= 0");
  const auto& m = c.mpc;
  if (m.horizon < 1) fail("mpc.horizon must be >= 1");
  if (!(m.dt > 0.0)) fail("mpc.dt must be > 0");
  if (!(m.mass > 0.0)) fail("mpc.mass must be > 0");
  if (!(m.psi > 0.0)) fail("mpc.psi must be > 0");
  if ((m.u_min.array() > m.u_max.array()).any()) fail("mpc.u_min must not exceed mpc.u_max");
  if ((m.xi_min.array() > m.xi_max.array()).any()) fail("mpc.xi_min must not exceed mpc.xi_max");
  if (!(m.approach_time > 0.0)) fail("mpc.approach_time must be > 0");
  if (!(m.cruise_speed > 0.0)) fail("mpc.cruise_speed must be > 0");
  if (m.solver_iters < 1) fail("mpc.solver_iters must be >= 1");
  if (c.bench_repetitions < 1) fail("bench_repetitions must be >= 1");
}

/// Overlays the keys present in `j` onto `c`. Unknown keys are rejected.
inline void apply_config(const json& j, RunConfig& c) {
  detail::ObjectReader top(j, "config");
  top.get("seed", c.seed);
  top.get("bench_repetitions", c.bench_repetitions);
  if (const json* p = top.child("pipeline")) {
    detail::ObjectReader r(*p, "pipeline");
    std::string method;
    r.get("method", method);
    if (!method.empty()) c.pipeline.method = parse_cluster_method(method);
    r.get("kmeans_k", c.pipeline.kmeans_k);
    r.get("dbscan_eps", c.pipeline.dbscan_eps);
    r.get("dbscan_min_pts", c.pipeline.dbscan_min_pts);
    r.get("refine_baselines", c.pipeline.refine_baselines);
    r.finish();
  }
  if (const json* p = top.child("vigmm")) {
    auto& v = c.pipeline.vigmm;
    detail::ObjectReader r(*p, "vigmm");
    r.get("n_max", v.n_max);
    r.get("dirichlet_alpha0", v.dirichlet_alpha0);
    r.get("beta0", v.beta0);
    r.get("nu0", v.nu0);
    if (const json* w = r.child("w0"); w && !w->is_null()) v.w0 = detail::weight_matrix<2>(*w, r.path("w0"));
    r.get("elbo_tol", v.elbo_tol);
    r.get("max_iters", v.max_iters);
    r.get("weight_prune_threshold", v.weight_prune_threshold);
    r.get("deletion_moves", v.deletion_moves);
    r.finish();
  }
  if (const json* p = top.child("mvee")) {
    auto& m = c.pipeline.mvee;
    detail::ObjectReader r(*p, "mvee");
    r.get("epsilon", m.epsilon);
    r.get("max_iters", m.max_iters);
    r.get("regularization", m.regularization);
    r.get("min_radius", m.min_radius);
    r.finish();
  }
  if (const json* p = top.child("refine")) {
    auto& m = c.pipeline.refine;
    detail::ObjectReader r(*p, "refine");
    r.get("ratio_threshold", m.ratio_threshold);
    r.get("union_samples", m.union_samples);
    r.get("max_passes", m.max_passes);
    r.finish();
  }
  if (const json* p = top.child("tracker")) {
    auto& t = c.tracker;
    detail::ObjectReader r(*p, "tracker");
    r.get("gate_distance", t.gate_distance);
    r.get("process_noise_pos", t.process_noise_pos);
    r.get("process_noise_ang", t.process_noise_ang);
    r.get("meas_noise_pos", t.meas_noise_pos);
    r.get("meas_noise_ang", t.meas_noise_ang);
    r.get("max_missed", t.max_missed);
    r.get("init_var_vel", t.init_var_vel);
    r.get("init_var_omega", t.init_var_omega);
    if (const json* w = r.child("weights")) {
      detail::ObjectReader wr(*w, "tracker.weights");
      wr.get("position", t.weights.position);
      wr.get("r1", t.weights.r1);
      wr.get("r2", t.weights.r2);
      wr.get("theta", t.weights.theta);
      wr.finish();
    }
    r.finish();
  }
  if (const json* p = top.child("mpc")) {
    auto& m = c.mpc;
    detail::ObjectReader r(*p, "mpc");
    r.get("horizon", m.horizon);
    r.get("dt", m.dt);
    r.get("mass", m.mass);
    if (const json* q = r.child("Q")) m.Q = detail::weight_matrix<4>(*q, r.path("Q"));
    if (const json* q = r.child("P")) m.P = detail::weight_matrix<2>(*q, r.path("P"));
    r.get("S", m.S);
    r.get("psi", m.psi);
    r.get_vec2("u_min", m.u_min);
    r.get_vec2("u_max", m.u_max);
    for (const char* key : {"xi_min", "xi_max"}) {
      const json* b = r.child(key);
      if (!b) continue;
      auto& dst = std::string(key) == "xi_min" ? m.xi_min : m.xi_max;
      const double missing = std::string(key) == "xi_min" ? -std::numeric_limits<double>::infinity()
                                                           : std::numeric_limits<double>::infinity();
      if (!b->is_array() || b->size() != 4)
        throw Error(ErrorCode::kInvalidConfig, r.path(key) + ": expected 4 entries");
      try {
        for (int i = 0; i < 4; ++i) dst(i) = detail::bound_from_json((*b)[static_cast<std::size_t>(i)], missing);
      } catch (const json::exception& e) {
        throw Error(ErrorCode::kInvalidConfig, r.path(key) + ": " + e.what());
      }
    }
    r.get("vehicle_radius", m.vehicle_radius);
    r.get("solver_iters", m.solver_iters);
    r.get("solver_tol", m.solver_tol);
    r.get("approach_time", m.approach_time);
    r.get("cruise_speed", m.cruise_speed);
    r.get("terminal_weight", m.terminal_weight);
    r.get("bound_weight", m.bound_weight);
    r.finish();
  }
  if (const json* p = top.child("episode")) {
    detail::ObjectReader r(*p, "episode");
    r.get("goal_tolerance", c.episode.goal_tolerance);
    r.get("record_points", c.episode.record_points);
    r.finish();
  }
  top.finish();
  validate(c);
}

inline RunConfig load_config(const std::string& path, RunConfig base = {}) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kInvalidConfig, "cannot open config " + path);
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::kParse, path + ": " + e.what());
  }
  apply_config(j, base);
  return base;
}

// ---------------------------------------------------------------------------
// Scenario fixtures.

inline json scenario_to_json(const Scenario& s) {
  json obs = json::array();
  for (const auto& o : s.obstacles) {
    json parts = json::array();
    for (const auto& poly : o.parts) {
      json pj = json::array();
      for (const auto& v : poly) pj.push_back(detail::vec2_json(v));
      parts.push_back(std::move(pj));
    }
    obs.push_back({{"name", o.name},
                   {"parts", std::move(parts)},
                   {"position", detail::vec2_json(o.position)},
                   {"orientation", o.orientation},
                   {"velocity", detail::vec2_json(o.motion.velocity)},
                   {"omega", o.motion.omega}});
  }
  const auto& x = s.vehicle_start;
  return {{"name", s.name},
          {"obstacles", std::move(obs)},
          {"vehicle_start", {x.px, x.py, x.vx, x.vy}},
          {"goal", detail::vec2_json(s.goal)},
          {"density", s.point_density},
          {"noise", s.sensor_noise_sigma},
          {"dt", s.frame_dt},
          {"duration", s.duration},
          {"seed", s.seed}};
}

inline Scenario scenario_from_json(const json& j) {
  Scenario s;
  detail::ObjectReader top(j, "scenario");
  top.get("name", s.name);
  if (const json* obs = top.child("obstacles")) {
    if (!obs->is_array()) throw Error(ErrorCode::kInvalidConfig, "scenario.obstacles: expected a list");
    for (std::size_t i = 0; i < obs->size(); ++i) {
      const std::string where = "scenario.obstacles[" + std::to_string(i) + "]";
      detail::ObjectReader r((*obs)[i], where);
      Obstacle o;
      r.get("name", o.name);
      const json* parts = r.child("parts");
      if (!parts || !parts->is_array() || parts->empty())
        throw Error(ErrorCode::kInvalidConfig, where + ".parts: expected a list of polygons");
      for (const auto& pj : *parts) {
        Polygon poly;
        if (!pj.is_array()) throw Error(ErrorCode::kInvalidConfig, where + ".parts: expected a polygon");
        for (const auto& v : pj) poly.push_back(detail::ObjectReader::to_vec2(v, where + ".parts"));
        if (poly.size() < 3) throw Error(ErrorCode::kInvalidConfig, where + ".parts: polygon needs 3 vertices");
        o.parts.push_back(std::move(poly));
      }
      r.get_vec2("position", o.position);
      r.get("orientation", o.orientation);
      r.get_vec2("velocity", o.motion.velocity);
      r.get("omega", o.motion.omega);
      r.finish();
      s.obstacles.push_back(std::move(o));
    }
  }
  if (const json* v = top.child("vehicle_start")) {
    try {
      const auto a = v->get<std::array<double, 4>>();
      s.vehicle_start = {a[0], a[1], a[2], a[3]};
    } catch (const json::exception&) {
      throw Error(ErrorCode::kInvalidConfig, "scenario.vehicle_start: expected [px, py, vx, vy]");
    }
  }
  top.get_vec2("goal", s.goal);
  top.get("density", s.point_density);
  top.get("noise", s.sensor_noise_sigma);
  top.get("dt", s.frame_dt);
  top.get("duration", s.duration);
  top.get("seed", s.seed);
  top.finish();
  if (!(s.frame_dt > 0.0)) throw Error(ErrorCode::kInvalidConfig, "scenario.dt must be > 0");
  if (s.duration < 0.0) throw Error(ErrorCode::kInvalidConfig, "scenario.duration must be >= 0");
  if (s.point_density < 0.0 || s.sensor_noise_sigma < 0.0)
    throw Error(ErrorCode::kInvalidConfig, "scenario.density and scenario.noise must be >= 0");
  return s;
}

inline Scenario load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kInvalidConfig, "cannot open scenario " + path);
  try {
    return scenario_from_json(json::parse(in));
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::kParse, path + ": " + e.what());
  }
}

inline void save_scenario(const Scenario& s, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::kInvalidConfig, "cannot write " + path);
  out << scenario_to_json(s).dump(2) << '\n';
}

// ---------------------------------------------------------------------------
// CSV.

inline constexpr const char* kEllipseCsvHeader = "index,xc,yc,r1,r2,theta,cluster_size";
inline constexpr const char* kTimingCsvHeader = "stage,ms";
inline constexpr const char* kTrackCsvHeader = "time,id,xc,yc,r1,r2,theta,vx,vy,omega,cov_trace";
inline constexpr const char* kEpisodeCsvHeader =
    "time,px,py,vx,vy,points,ellipses,tracks,identification_ms,planning_ms,solver_status,"
    "solver_iterations,max_slack,min_margin";
inline constexpr const char* kBenchCsvHeader =
    "map,pipeline,repetitions,ellipses,ident_median_ms,ident_p95_ms,reached,time_to_goal,"
    "collisions,min_clearance";

inline void write_ellipses_csv(std::ostream& out, const Identification& id) {
  out << kEllipseCsvHeader << '\n' << std::setprecision(10);
  for (std::size_t i = 0; i < id.ellipses.size(); ++i) {
    const auto& e = id.ellipses[i];
    out << i << ',' << e.ellipse.center.x() << ',' << e.ellipse.center.y() << ',' << e.ellipse.r1
        << ',' << e.ellipse.r2 << ',' << e.ellipse.theta << ',' << e.cluster_size << '\n';
  }
}

inline void write_timings_csv(std::ostream& out, const StageTimings& t) {
  out << kTimingCsvHeader << '\n' << std::setprecision(6);
  out << "cluster," << t.cluster_ms << "\nmvee," << t.mvee_ms << "\nrefine," << t.refine_ms
      << "\ntotal," << t.total_ms() << '\n';
}

inline void write_track_rows(std::ostream& out, double time, std::span<const Track> tracks) {
  out << std::setprecision(10);
  for (const auto& t : tracks) {
    out << time << ',' << t.id << ',' << t.state(0) << ',' << t.state(1) << ',' << t.r1 << ','
        << t.r2 << ',' << t.state(2) << ',' << t.state(3) << ',' << t.state(4) << ','
        << t.state(5) << ',' << t.covariance.trace() << '\n';
  }
}

inline void write_episode_csv(std::ostream& out, const EpisodeLog& log) {
  out << kEpisodeCsvHeader << '\n' << std::setprecision(10);
  for (const auto& f : log.frames) {
    const auto& x = f.vehicle;
    const double max_slack = f.plan.slacks.size() ? f.plan.slacks.maxCoeff() : 0.0;
    const double min_margin = f.plan.margins.size() ? f.plan.margins.minCoeff() : 0.0;
    out << f.time << ',' << x.px << ',' << x.py << ',' << x.vx << ',' << x.vy << ','
        << f.points.size() << ',' << f.ellipses.size() << ',' << f.tracks.size() << ','
        << f.identification_ms << ',' << f.planning_ms << ',' << to_string(f.plan.status) << ','
        << f.plan.iterations << ',' << max_slack << ',' << min_margin << '\n';
  }
}

struct BenchRow {
  std::string map;
  std::string pipeline;
  int repetitions = 0;
  int ellipses = 0;
  double ident_median_ms = 0.0;
  double ident_p95_ms = 0.0;
  bool reached = false;
  double time_to_goal = std::numeric_limits<double>::quiet_NaN();
  int collisions = 0;
  double min_clearance = 0.0;
};

inline void write_bench_csv(std::ostream& out, std::span<const BenchRow> rows) {
  out << kBenchCsvHeader << '\n' << std::setprecision(6);
  for (const auto& r : rows) {
    out << r.map << ',' << r.pipeline << ',' << r.repetitions << ',' << r.ellipses << ','
        << r.ident_median_ms << ',' << r.ident_p95_ms << ',' << (r.reached ? 1 : 0) << ',';
    if (std::isnan(r.time_to_goal)) {
      out << "nan";
    } else {
      out << r.time_to_goal;
    }
    out << ',' << r.collisions << ',' << r.min_clearance << '\n';
  }
}

// ---------------------------------------------------------------------------
// SVG.

struct SvgScene {
  std::vector<Polygon> outlines;
  std::vector<Vec2> points;
  std::vector<StandardEllipse> ellipses;
  std::vector<Vec2> trajectory;
  std::vector<Vec2> plan;
  std::optional<Vec2> goal;
  std::optional<Vec2> vehicle;
  double vehicle_radius = 0.0;
  std::string title;
};

inline SvgScene frame_scene(const Scenario& s, const EpisodeLog& log, std::size_t frame,
                            double vehicle_radius) {
  SvgScene sc;
  const auto& f = log.frames.at(frame);
  for (const auto& o : s.obstacles)
    for (auto& p : posed_outlines(o, f.time)) sc.outlines.push_back(std::move(p));
  sc.points = f.points;
  sc.ellipses = f.ellipses;
  for (const auto& x : log.trajectory) sc.trajectory.push_back(x.position());
  for (const auto& x : f.plan.states) sc.plan.push_back(x.position());
  sc.goal = s.goal;
  sc.vehicle = f.vehicle.position();
  sc.vehicle_radius = vehicle_radius;
  std::ostringstream t;
  t << s.name << " t=" << std::fixed << std::setprecision(2) << f.time << " s";
  sc.title = t.str();
  return sc;
}

inline void render_svg(std::ostream& out, const SvgScene& sc, double pixels_per_meter = 40.0) {
  double lo_x = std::numeric_limits<double>::infinity(), lo_y = lo_x;
  double hi_x = -lo_x, hi_y = -lo_x;
  auto grow = [&](const Vec2& p, double r = 0.0) {
    lo_x = std::min(lo_x, p.x() - r);
    lo_y = std::min(lo_y, p.y() - r);
    hi_x = std::max(hi_x, p.x() + r);
    hi_y = std::max(hi_y, p.y() + r);
  };
  for (const auto& poly : sc.outlines)
    for (const auto& v : poly) grow(v);
  for (const auto& p : sc.points) grow(p);
  for (const auto& e : sc.ellipses) grow(e.center, e.r2);
  for (const auto& p : sc.trajectory) grow(p);
  if (sc.goal) grow(*sc.goal, 0.3);
  if (sc.vehicle) grow(*sc.vehicle, sc.vehicle_radius);
  if (!std::isfinite(lo_x)) lo_x = lo_y = -1.0, hi_x = hi_y = 1.0;
  const double pad = 1.0;
  lo_x -= pad, lo_y -= pad, hi_x += pad, hi_y += pad;
  const double k = pixels_per_meter;
  auto sx = [&](double x) { return (x - lo_x) * k; };
  auto sy = [&](double y) { return (hi_y - y) * k; };

  out << std::fixed << std::setprecision(2);
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << (hi_x - lo_x) * k << "\" height=\""
      << (hi_y - lo_y) * k << "\">\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  for (const auto& poly : sc.outlines) {
    out << "<polygon fill=\"#ddd\" stroke=\"#888\" stroke-width=\"1\" points=\"";
    for (const auto& v : poly) out << sx(v.x()) << ',' << sy(v.y()) << ' ';
    out << "\"/>\n";
  }
  for (const auto& e : sc.ellipses) {
    const double deg = -e.theta * 180.0 / std::numbers::pi;
    out << "<ellipse fill=\"none\" stroke=\"#c33\" stroke-width=\"1.5\" cx=\"" << sx(e.center.x())
        << "\" cy=\"" << sy(e.center.y()) << "\" rx=\"" << e.r1 * k << "\" ry=\"" << e.r2 * k
        << "\" transform=\"rotate(" << deg << ' ' << sx(e.center.x()) << ' ' << sy(e.center.y())
        << ")\"/>\n";
  }
  for (const auto& p : sc.points)
    out << "<circle r=\"1.5\" fill=\"#36c\" cx=\"" << sx(p.x()) << "\" cy=\"" << sy(p.y()) << "\"/>\n";
  auto polyline = [&](const std::vector<Vec2>& pts, const char* style) {
    if (pts.size() < 2) return;
    out << "<polyline fill=\"none\" " << style << " points=\"";
    for (const auto& p : pts) out << sx(p.x()) << ',' << sy(p.y()) << ' ';
    out << "\"/>\n";
  };
  polyline(sc.trajectory, "stroke=\"#2a2\" stroke-width=\"2\"");
  polyline(sc.plan, "stroke=\"#e90\" stroke-width=\"1.5\" stroke-dasharray=\"4 3\"");
  if (sc.goal)
    out << "<circle r=\"" << 0.2 * k << "\" fill=\"none\" stroke=\"#000\" cx=\"" << sx(sc.goal->x())
        << "\" cy=\"" << sy(sc.goal->y()) << "\"/>\n";
  if (sc.vehicle)
    out << "<circle r=\"" << std::max(sc.vehicle_radius * k, 2.0) << "\" fill=\"#2a2\" fill-opacity=\"0.4\" cx=\""
        << sx(sc.vehicle->x()) << "\" cy=\"" << sy(sc.vehicle->y()) << "\"/>\n";
  if (!sc.title.empty())
    out << "<text x=\"8\" y=\"18\" font-family=\"monospace\" font-size=\"14\">" << sc.title << "</text>\n";
  out << "</svg>\n";
}

}  // namespace ellid
