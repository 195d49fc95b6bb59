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

// Merging of over-segmented ellipse sets. Two ellipses are merged when their
// areas fill a large enough share of their joint oriented bounding box; the
// merged ellipse is the MVEE of dense boundary samples of both.

#include <ellid/geometry.hpp>
#include <ellid/mvee.hpp>

#include <span>
#include <vector>

namespace ellid {

struct RefinementConfig {
  double ratio_threshold = 0.6;
  int union_samples = 64;
  int max_passes = 10;
  MveeConfig mvee;
};

struct RefineReport {
  int passes = 0;
  int merges = 0;
};

/// (area(e1) + area(e2)) / area(OBB(e1, e2)).
inline double volume_ratio(const StandardEllipse& e1, const StandardEllipse& e2) {
  return (area(e1) + area(e2)) / obb_of_pair(e1, e2).area();
}

inline StandardEllipse union_ellipse(const StandardEllipse& e1, const StandardEllipse& e2,
                                     const RefinementConfig& cfg = {}) {
  std::vector<Vec2> pts = boundary_sample(e1, cfg.union_samples);
  const auto more = boundary_sample(e2, cfg.union_samples);
  pts.insert(pts.end(), more.begin(), more.end());
  return general_to_standard(khachiyan_mvee(pts, cfg.mvee).ellipse);
}

/// Repeatedly merges the first pair (i < j, lexicographic) whose volume ratio
/// reaches the threshold. The union takes slot i, j is removed, and the scan
/// restarts. Passes repeat until one performs no merge.
inline std::vector<StandardEllipse> refine(std::vector<StandardEllipse> ellipses,
                                           const RefinementConfig& cfg = {},
                                           RefineReport* report = nullptr) {
  RefineReport rep;
  for (int pass = 0; pass < cfg.max_passes; ++pass) {
    ++rep.passes;
    int merges = 0;
    bool restart = true;
    while (restart) {
      restart = false;
      for (std::size_t i = 0; i < ellipses.size() && !restart; ++i) {
        for (std::size_t j = i + 1; j < ellipses.size(); ++j) {
          if (volume_ratio(ellipses[i], ellipses[j]) >= cfg.ratio_threshold) {
            ellipses[i] = union_ellipse(ellipses[i], ellipses[j], cfg);
            ellipses.erase(ellipses.begin() + static_cast<std::ptrdiff_t>(j));
            ++merges;
            restart = true;
            break;
          }
        }
      }
    }
    rep.merges += merges;
    if (merges == 0) break;
  }
  if (report) *report = rep;
  return ellipses;
}

}  // namespace ellid
