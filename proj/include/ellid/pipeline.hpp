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

// identify(): clustering, one MVEE per cluster, then refinement.

#include <ellid/clustering.hpp>
#include <ellid/error.hpp>
#include <ellid/geometry.hpp>
#include <ellid/mvee.hpp>
#include <ellid/refinement.hpp>

#include <chrono>
#include <cstdint>
#include <span>
#include <vector>

namespace ellid {

enum class ClusterMethod { kVigmm, kKmeans, kDbscan };

struct PipelineConfig {
  VigmmConfig vigmm;
  MveeConfig mvee;
  RefinementConfig refine;
  ClusterMethod method = ClusterMethod::kVigmm;
  int kmeans_k = 6;
  double dbscan_eps = 0.3;
  int dbscan_min_pts = 4;
  // Baseline pipelines are compared without the merge step.
  bool refine_baselines = false;
};

struct StageTimings {
  double cluster_ms = 0.0;
  double mvee_ms = 0.0;
  double refine_ms = 0.0;

  double total_ms() const { return cluster_ms + mvee_ms + refine_ms; }
};

struct IdentifiedEllipse {
  StandardEllipse ellipse;
  int cluster_size = 0;  // points behind the ellipse (summed over merges)
};

struct Identification {
  std::vector<IdentifiedEllipse> ellipses;
  StageTimings timings;
  int surviving_components = 0;

  std::vector<StandardEllipse> shapes() const {
    std::vector<StandardEllipse> out;
    out.reserve(ellipses.size());
    for (const auto& e : ellipses) out.push_back(e.ellipse);
    return out;
  }
};

namespace detail {
inline double elapsed_ms(std::chrono::steady_clock::time_point since) {
  return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - since)
      .count();
}
}  // namespace detail

inline ClusterResult cluster_points(std::span<const Vec2> points, const PipelineConfig& cfg) {
  switch (cfg.method) {
    case ClusterMethod::kKmeans: {
      const int k = std::min<int>(cfg.kmeans_k, static_cast<int>(points.size()));
      return kmeans_baseline(points, k, cfg.vigmm.seed);
    }
    case ClusterMethod::kDbscan:
      return dbscan_baseline(points, cfg.dbscan_eps, cfg.dbscan_min_pts);
    case ClusterMethod::kVigmm:
      break;
  }
  return fit_vigmm(points, cfg.vigmm);
}

/// Covers `points` with a small set of ellipses.
inline Identification identify(std::span<const Vec2> points, const PipelineConfig& cfg = {}) {
  if (points.empty()) throw Error(ErrorCode::kEmptyInput, "no points to identify");
  Identification out;

  auto t0 = std::chrono::steady_clock::now();
  const ClusterResult clusters = cluster_points(points, cfg);
  out.timings.cluster_ms = detail::elapsed_ms(t0);
  out.surviving_components = static_cast<int>(clusters.size());

  t0 = std::chrono::steady_clock::now();
  std::vector<StandardEllipse> fitted;
  std::vector<int> sizes;
  for (const auto& group : clusters.groups(points)) {
    if (group.empty()) continue;
    fitted.push_back(general_to_standard(enclosing_ellipse(group, cfg.mvee).ellipse));
    sizes.push_back(static_cast<int>(group.size()));
  }
  out.timings.mvee_ms = detail::elapsed_ms(t0);

  t0 = std::chrono::steady_clock::now();
  if (cfg.method == ClusterMethod::kVigmm || cfg.refine_baselines) {
    RefinementConfig rc = cfg.refine;
    rc.mvee.epsilon = cfg.mvee.epsilon;
    const auto refined = refine(fitted, rc);
    // Attribute source points to refined ellipses by containment.
    std::vector<int> counts(refined.size(), 0);
    for (std::size_t i = 0; i < fitted.size(); ++i) {
      std::size_t best = 0;
      double best_level = std::numeric_limits<double>::infinity();
      for (std::size_t j = 0; j < refined.size(); ++j) {
        const double lv = refined[j].level_at(fitted[i].center);
        if (lv < best_level) {
          best_level = lv;
          best = j;
        }
      }
      counts[best] += sizes[i];
    }
    for (std::size_t j = 0; j < refined.size(); ++j) out.ellipses.push_back({refined[j], counts[j]});
  } else {
    for (std::size_t i = 0; i < fitted.size(); ++i) out.ellipses.push_back({fitted[i], sizes[i]});
  }
  out.timings.refine_ms = detail::elapsed_ms(t0);
  return out;
}

}  // namespace ellid
