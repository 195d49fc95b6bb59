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

// Random instance generators shared by the unit tests and the acceptance run.

#include <ellid/geometry.hpp>
#include <ellid/tracking.hpp>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <set>
#include <vector>

namespace gen {

using namespace ellid;
inline constexpr double kPi = std::numbers::pi;

inline StandardEllipse random_ellipse(std::mt19937_64& rng, double spread = 5.0) {
  std::uniform_real_distribution<double> c(-spread, spread), r(0.2, 2.0), th(0.0, kPi);
  return make_ellipse(Vec2(c(rng), c(rng)), r(rng), r(rng), th(rng));
}

// A few objects, each covered by several overlapping pieces, the way an
// over-segmenting clustering step leaves them.
inline std::vector<StandardEllipse> over_segmented(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> objects(1, 4), pieces(2, 5);
  std::uniform_real_distribution<double> pos(-20.0, 20.0), len(1.0, 4.0), th(0.0, kPi),
      width(0.2, 0.6);
  std::vector<StandardEllipse> out;
  const int n_obj = objects(rng);
  for (int o = 0; o < n_obj; ++o) {
    const Vec2 c(pos(rng), pos(rng));
    const double a = th(rng), l = len(rng), w = width(rng);
    const Vec2 dir(std::cos(a), std::sin(a));
    const int k = pieces(rng);
    for (int i = 0; i < k; ++i) {
      const double s = k == 1 ? 0.0 : -l + 2.0 * l * i / (k - 1);
      out.push_back(make_ellipse(c + s * dir, l / k + 0.2, w, a));
    }
  }
  std::shuffle(out.begin(), out.end(), rng);
  return out;
}

struct Blobs {
  std::vector<Vec2> points;
  std::vector<int> truth;
};

// Isotropic Gaussian blobs of unit sigma whose centers sit on a ring large
// enough to keep them at least 10 sigma apart.
inline Blobs gaussian_blobs(int count, int per_blob, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  Blobs out;
  const double ring = count == 1 ? 0.0 : 12.0 / (2.0 * std::sin(std::numbers::pi / count));
  for (int c = 0; c < count; ++c) {
    const double a = 2.0 * std::numbers::pi * c / count;
    const Vec2 center(ring * std::cos(a) + 3.0, ring * std::sin(a) - 1.0);
    for (int i = 0; i < per_blob; ++i) {
      out.points.push_back(center + Vec2(g(rng), g(rng)));
      out.truth.push_back(c);
    }
  }
  return out;
}

inline FeatureVector random_feature(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> c(-5.0, 5.0), r(0.2, 2.0), th(0.0, kPi);
  const double a = r(rng), b = r(rng);
  return {Vec2(c(rng), c(rng)), std::min(a, b), std::max(a, b), th(rng)};
}

// True when every row minimum is unique and no two rows share the column of
// their minimum (or the same for columns when there are fewer columns).
inline bool distinct_minima(const std::vector<std::vector<double>>& d) {
  const std::size_t rows = d.size(), cols = d.empty() ? 0 : d[0].size();
  const bool by_row = rows <= cols;
  std::set<std::size_t> used;
  for (std::size_t a = 0; a < (by_row ? rows : cols); ++a) {
    std::size_t best = 0;
    int ties = 0;
    double best_v = 1e300;
    for (std::size_t b = 0; b < (by_row ? cols : rows); ++b) {
      const double v = by_row ? d[a][b] : d[b][a];
      if (v < best_v - 1e-12) {
        best_v = v;
        best = b;
        ties = 0;
      } else if (std::abs(v - best_v) <= 1e-12) {
        ++ties;
      }
    }
    if (ties > 0 || !used.insert(best).second) return false;
  }
  return true;
}

}  // namespace gen
