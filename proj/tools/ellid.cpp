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


// ellid: identify, track, run and bench from the command line.

#include <ellid/ellid.hpp>

#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace fs = std::filesystem;
using namespace ellid;

namespace {

enum ExitCode { kOk = 0, kInputError = 2, kEmptyInput = 3, kCollision = 4 };

enum class Level { kOff, kError, kWarn, kInfo, kDebug };

Level log_level() {
  static const Level level = [] {
    const char* v = std::getenv("ELLID_LOG");
    if (!v) return Level::kWarn;
    const std::string s(v);
    if (s == "off") return Level::kOff;
    if (s == "error") return Level::kError;
    if (s == "info") return Level::kInfo;
    if (s == "debug") return Level::kDebug;
    return Level::kWarn;
  }();
  return level;
}

template <class... Args>
void log(Level lvl, const Args&... args) {
  if (lvl > log_level()) return;
  static const char* names[] = {"", "error", "warn", "info", "debug"};
  std::cerr << "[" << names[static_cast<int>(lvl)] << "] ";
  (std::cerr << ... << args) << '\n';
}

int exit_code_for(const Error& e) {
  switch (e.code()) {
    case ErrorCode::kEmptyInput:
    case ErrorCode::kTooFewPoints: return kEmptyInput;
    default: return kInputError;
  }
}

struct CommonOptions {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::string out_dir = ".";
  bool svg = false;
};

RunConfig resolve_config(const CommonOptions& o) {
  RunConfig cfg;
  if (!o.config_path.empty()) cfg = load_config(o.config_path, cfg);
  if (o.seed) cfg.seed = *o.seed;
  cfg.pipeline.vigmm.seed = cfg.seed;
  validate(cfg);
  return cfg;
}

std::ofstream open_out(const fs::path& p) {
  std::ofstream out(p);
  if (!out) throw Error(ErrorCode::kInvalidConfig, "cannot write " + p.string());
  return out;
}

int cmd_identify(const CommonOptions& o, const std::string& points_file,
                 const std::string& method) {
  RunConfig cfg = resolve_config(o);
  if (!method.empty()) cfg.pipeline.method = parse_cluster_method(method);
  const auto pts = read_points_file(points_file);
  log(Level::kInfo, "read ", pts.size(), " points from ", points_file);
  const Identification id = identify(pts, cfg.pipeline);
  fs::create_directories(o.out_dir);
  {
    auto out = open_out(fs::path(o.out_dir) / "ellipses.csv");
    write_ellipses_csv(out, id);
  }
  {
    auto out = open_out(fs::path(o.out_dir) / "timings.csv");
    write_timings_csv(out, id.timings);
  }
  if (o.svg) {
    SvgScene sc;
    sc.points = pts;
    sc.ellipses = id.shapes();
    sc.title = fs::path(points_file).filename().string();
    auto out = open_out(fs::path(o.out_dir) / "ellipses.svg");
    render_svg(out, sc);
  }
  std::cout << "ellipses " << id.ellipses.size() << " components " << id.surviving_components
            << " identify_ms " << std::fixed << std::setprecision(3) << id.timings.total_ms()
            << '\n';
  return kOk;
}

int cmd_track(const CommonOptions& o, const std::string& frames_dir) {
  const RunConfig cfg = resolve_config(o);
  std::vector<std::pair<long long, fs::path>> frames;
  if (!fs::is_directory(frames_dir))
    throw Error(ErrorCode::kParse, frames_dir + " is not a directory");
  for (const auto& entry : fs::directory_iterator(frames_dir)) {
    if (!entry.is_regular_file()) continue;
    const std::string stem = entry.path().stem().string();
    long long ms = 0;
    std::size_t used = 0;
    try {
      ms = std::stoll(stem, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != stem.size() || stem.empty())
      throw Error(ErrorCode::kParse, entry.path().string() + ": frame name is not a millisecond timestamp");
    frames.emplace_back(ms, entry.path());
  }
  std::sort(frames.begin(), frames.end());
  if (frames.empty()) throw Error(ErrorCode::kEmptyInput, frames_dir + " holds no frames");

  Tracker tracker(cfg.tracker);
  fs::create_directories(o.out_dir);
  auto out = open_out(fs::path(o.out_dir) / "tracks.csv");
  out << kTrackCsvHeader << '\n';
  for (const auto& [ms, path] : frames) {
    const auto pts = read_points_file(path.string());
    const double t = static_cast<double>(ms) / 1000.0;
    std::vector<FeatureVector> obs;
    if (!pts.empty()) {
      for (const auto& e : identify(pts, cfg.pipeline).ellipses)
        obs.push_back(FeatureVector::from(e.ellipse));
    }
    const auto& tracks = tracker.update(obs, t);
    log(Level::kDebug, "t=", t, " observations ", obs.size(), " tracks ", tracks.size());
    write_track_rows(out, t, tracks);
  }
  std::cout << "frames " << frames.size() << " tracks " << tracker.tracks().size() << '\n';
  return kOk;
}

Scenario scenario_for(const std::string& file, int map_index) {
  if (!file.empty()) return load_scenario(file);
  const auto maps = builtin_maps();
  if (map_index < 1 || map_index > static_cast<int>(maps.size()))
    throw Error(ErrorCode::kInvalidConfig, "--map must be in 1.." + std::to_string(maps.size()));
  return maps[static_cast<std::size_t>(map_index - 1)];
}

int cmd_run(const CommonOptions& o, const std::string& scenario_file, int map_index,
            const std::string& method) {
  RunConfig cfg = resolve_config(o);
  if (!method.empty()) cfg.pipeline.method = parse_cluster_method(method);
  Scenario sc = scenario_for(scenario_file, map_index);
  if (o.seed) sc.seed = *o.seed;
  EpisodeOptions eo = cfg.episode;
  eo.record_points = eo.record_points || o.svg;
  const EpisodeLog log = run_episode(sc, cfg.pipeline, cfg.tracker, cfg.mpc, eo);

  fs::create_directories(o.out_dir);
  {
    auto out = open_out(fs::path(o.out_dir) / "episode.csv");
    write_episode_csv(out, log);
  }
  if (o.svg) {
    const fs::path dir = fs::path(o.out_dir) / "frames";
    fs::create_directories(dir);
    for (std::size_t i = 0; i < log.frames.size(); ++i) {
      std::ostringstream name;
      name << "frame_" << std::setw(4) << std::setfill('0') << i << ".svg";
      auto out = open_out(dir / name.str());
      render_svg(out, frame_scene(sc, log, i, cfg.mpc.vehicle_radius));
    }
  }
  const auto& r = log.outcome;
  std::cout << std::boolalpha << "scenario " << (sc.name.empty() ? "unnamed" : sc.name)
            << " reached " << r.reached << " time_to_goal ";
  if (r.reached) {
    std::cout << std::fixed << std::setprecision(2) << r.time_to_goal;
  } else {
    std::cout << "nan";
  }
  std::cout << std::fixed << std::setprecision(3) << " min_clearance " << r.min_clearance
            << " collisions " << r.collisions << " identification_ms "
            << log.mean_identification_ms() << '\n';
  return r.collisions > 0 ? kCollision : kOk;
}

double percentile(std::vector<double> v, double q) {
  if (v.empty()) return 0.0;
  std::sort(v.begin(), v.end());
  const double pos = q * static_cast<double>(v.size() - 1);
  const auto lo = static_cast<std::size_t>(pos);
  const auto hi = std::min(lo + 1, v.size() - 1);
  return v[lo] + (v[hi] - v[lo]) * (pos - static_cast<double>(lo));
}

int cmd_bench(const CommonOptions& o, int reps_flag) {
  RunConfig cfg = resolve_config(o);
  const int reps = reps_flag > 0 ? reps_flag : cfg.bench_repetitions;
  const auto maps = builtin_maps();
  // Cluster counts handed to the k-means baseline, per map.
  const std::map<std::string, int> kmeans_k = {{"map1", 6}, {"map3", 4}, {"map4", 4}, {"map5", 12}};
  std::vector<BenchRow> rows;
  for (const auto& [name, k] : kmeans_k) {
    auto it = std::find_if(maps.begin(), maps.end(), [&](const Scenario& s) { return s.name == name; });
    Scenario sc = *it;
    sc.seed = cfg.seed;
    const auto pts = sample_points(sc, 0.0);
    for (ClusterMethod m : {ClusterMethod::kVigmm, ClusterMethod::kKmeans, ClusterMethod::kDbscan}) {
      PipelineConfig pc = cfg.pipeline;
      pc.method = m;
      pc.kmeans_k = k;
      BenchRow row;
      row.map = name;
      row.pipeline = m == ClusterMethod::kVigmm ? "ours" : std::string(to_string(m)) + "+mvee";
      row.repetitions = reps;
      std::vector<double> ms;
      for (int i = 0; i < reps; ++i) {
        const auto t0 = std::chrono::steady_clock::now();
        const auto id = identify(pts, pc);
        ms.push_back(detail::elapsed_ms(t0));
        row.ellipses = static_cast<int>(id.ellipses.size());
      }
      row.ident_median_ms = percentile(ms, 0.5);
      row.ident_p95_ms = percentile(ms, 0.95);
      EpisodeOptions eo = cfg.episode;
      eo.record_points = false;
      const auto episode = run_episode(sc, pc, cfg.tracker, cfg.mpc, eo);
      row.reached = episode.outcome.reached;
      row.time_to_goal = episode.outcome.time_to_goal;
      row.collisions = episode.outcome.collisions;
      row.min_clearance = episode.outcome.min_clearance;
      log(Level::kInfo, name, " ", row.pipeline, " median ", row.ident_median_ms, " ms");
      rows.push_back(row);
    }
  }
  fs::create_directories(o.out_dir);
  auto out = open_out(fs::path(o.out_dir) / "bench.csv");
  write_bench_csv(out, rows);
  write_bench_csv(std::cout, rows);
  return kOk;
}

int cmd_sample(const CommonOptions& o, const std::string& scenario_file, int map_index,
               int frames) {
  Scenario sc = scenario_for(scenario_file, map_index);
  if (o.seed) sc.seed = *o.seed;
  fs::create_directories(o.out_dir);
  for (int k = 0; k < frames; ++k) {
    const double t = k * sc.frame_dt;
    const auto ms = std::llround(t * 1000.0);
    auto out = open_out(fs::path(o.out_dir) / (std::to_string(ms) + ".txt"));
    write_points(out, sample_points(sc, t));
  }
  std::cout << "wrote " << frames << " frames to " << o.out_dir << '\n';
  return kOk;
}

int cmd_maps(const std::string& dir) {
  fs::create_directories(dir);
  for (const auto& s : builtin_maps()) save_scenario(s, (fs::path(dir) / (s.name + ".json")).string());
  std::cout << "wrote " << builtin_maps().size() << " scenarios to " << dir << '\n';
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"ellid: ellipse identification, tracking and planning around point-cloud obstacles"};
  app.require_subcommand(1);
  CommonOptions common;
  std::uint64_t seed = 0;
  auto add_common = [&](CLI::App* sub, bool with_svg) {
    sub->add_option("--config", common.config_path, "JSON config file")->check(CLI::ExistingFile);
    sub->add_option("--seed", seed, "Random seed");
    sub->add_option("--out", common.out_dir, "Output directory");
    if (with_svg) sub->add_flag("--svg", common.svg, "Write SVG renders");
  };

  std::string points_file, frames_dir, scenario_file, method, maps_dir;
  int map_index = 0, reps = 0;

  auto* identify_cmd = app.add_subcommand("identify", "Fit ellipses to a points file");
  identify_cmd->add_option("points", points_file, "Points file, one 'x y' pair per line")->required();
  identify_cmd->add_option("--method", method, "vigmm, kmeans or dbscan");
  add_common(identify_cmd, true);

  auto* track_cmd = app.add_subcommand("track", "Track obstacles across timestamped frames");
  track_cmd->add_option("frames", frames_dir, "Directory of <milliseconds>.txt point files")->required();
  add_common(track_cmd, false);

  auto* run_cmd = app.add_subcommand("run", "Run a closed-loop episode");
  auto* scen_opt = run_cmd->add_option("scenario", scenario_file, "Scenario JSON file");
  run_cmd->add_option("--map", map_index, "Built-in map 1-5")->excludes(scen_opt);
  run_cmd->add_option("--method", method, "vigmm, kmeans or dbscan");
  add_common(run_cmd, true);

  auto* bench_cmd = app.add_subcommand("bench", "Time identification and compare pipelines");
  bench_cmd->add_option("--reps", reps, "Identification repetitions per map");
  add_common(bench_cmd, false);

  int frames = 1;
  auto* sample_cmd = app.add_subcommand("sample", "Write sampled scenario frames as point files");
  auto* sample_scen = sample_cmd->add_option("scenario", scenario_file, "Scenario JSON file");
  sample_cmd->add_option("--map", map_index, "Built-in map 1-5")->excludes(sample_scen);
  sample_cmd->add_option("--frames", frames, "Number of frames, spaced by the scenario dt")
      ->check(CLI::PositiveNumber);
  add_common(sample_cmd, false);

  auto* maps_cmd = app.add_subcommand("maps", "Write the built-in scenarios as JSON fixtures");
  maps_cmd->add_option("dir", maps_dir, "Output directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kInputError;
  }
  for (auto* sub : {identify_cmd, track_cmd, run_cmd, bench_cmd, sample_cmd}) {
    if (sub->parsed() && sub->count("--seed")) common.seed = seed;
  }

  try {
    if (identify_cmd->parsed()) return cmd_identify(common, points_file, method);
    if (track_cmd->parsed()) return cmd_track(common, frames_dir);
    if (run_cmd->parsed()) {
      if (scenario_file.empty() && map_index == 0) {
        std::cerr << "run: give a scenario file or --map\n";
        return kInputError;
      }
      return cmd_run(common, scenario_file, map_index, method);
    }
    if (bench_cmd->parsed()) return cmd_bench(common, reps);
    if (sample_cmd->parsed()) {
      if (scenario_file.empty() && map_index == 0) {
        std::cerr << "sample: give a scenario file or --map\n";
        return kInputError;
      }
      return cmd_sample(common, scenario_file, map_index, frames);
    }
    if (maps_cmd->parsed()) return cmd_maps(maps_dir);
  } catch (const Error& e) {
    std::cerr << e.what() << '\n';
    return exit_code_for(e);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kInputError;
  }
  return kOk;
}
