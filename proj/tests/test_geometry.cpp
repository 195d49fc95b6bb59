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

#include <ellid/geometry.hpp>

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "oracles.hpp"

namespace {

using namespace ellid;
constexpr double kPi = std::numbers::pi;

StandardEllipse random_ellipse(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> c(-10.0, 10.0), r(0.1, 5.0), th(0.0, kPi);
  return make_ellipse(Vec2(c(rng), c(rng)), r(rng), r(rng), th(rng));
}

GeneralEllipse random_general(std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  Eigen::Matrix2d m;
  m << g(rng), g(rng), g(rng), g(rng);
  GeneralEllipse e;
  e.A = m * m.transpose() + 0.2 * Mat2::Identity();
  e.b = Vec2(g(rng), g(rng));
  return e;
}

TEST(GeneralToQuadratic, UnitDisk) {
  const auto q = general_to_quadratic(GeneralEllipse{});
  EXPECT_TRUE(q.Aq.isApprox(Mat2::Identity()));
  EXPECT_EQ(q.bq, Vec2::Zero());
  EXPECT_DOUBLE_EQ(q.cq, -1.0);
}

TEST(GeneralToQuadratic, DiagonalExpansion) {
  GeneralEllipse g;
  g.A = Vec2(0.5, 1.0).asDiagonal();
  const auto q = general_to_quadratic(g);
  EXPECT_NEAR(q.Aq(0, 0), 0.25, 1e-15);
  EXPECT_NEAR(q.Aq(1, 1), 1.0, 1e-15);
  EXPECT_NEAR(q.Aq(0, 1), 0.0, 1e-15);
  EXPECT_DOUBLE_EQ(q.cq, -1.0);
}

TEST(GeneralToQuadratic, MembershipAgreesOnRandomPoints) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-4.0, 4.0);
  for (int trial = 0; trial < 20; ++trial) {
    const auto g = random_general(rng);
    const auto q = general_to_quadratic(g);
    const auto s = quadratic_to_standard(q);
    for (int i = 0; i < 1000; ++i) {
      const Vec2 p(u(rng), u(rng));
      const double ng = g.norm_at(p) * g.norm_at(p) - 1.0;
      const double nq = oracle::quadratic_value(q.Aq, q.bq, q.cq, p);
      EXPECT_NEAR(ng, nq, 1e-9 * (1.0 + std::abs(ng)));
      const double ls = s.level_at(p) - 1.0;
      // Agreement of the predicates away from a thin band around the boundary.
      if (std::abs(ng) > 1e-9 && std::abs(ls) > 1e-9) {
        EXPECT_EQ(ng <= 0.0, ls <= 0.0);
      }
    }
  }
}

TEST(QuadraticToStandard, UnitDisk) {
  const auto s = quadratic_to_standard(QuadraticEllipse{});
  EXPECT_NEAR(s.center.norm(), 0.0, 1e-15);
  EXPECT_NEAR(s.r1, 1.0, 1e-12);
  EXPECT_NEAR(s.r2, 1.0, 1e-12);
  EXPECT_EQ(s.theta, 0.0);
  EXPECT_TRUE(is_near_circular(s));
}

TEST(QuadraticToStandard, WideEllipseHasMinorAxisAlongY) {
  QuadraticEllipse q;
  q.Aq = Vec2(0.25, 1.0).asDiagonal();
  const auto s = quadratic_to_standard(q);
  EXPECT_NEAR(s.r1, 1.0, 1e-12);
  EXPECT_NEAR(s.r2, 2.0, 1e-12);
  EXPECT_NEAR(s.theta, kPi / 2, 1e-12);
  EXPECT_NEAR(std::abs(s.major_axis().x()), 1.0, 1e-12);
  for (const auto& p : {Vec2(2, 0), Vec2(-2, 0), Vec2(0, 1), Vec2(0, -1)}) {
    EXPECT_NEAR(s.level_at(p), 1.0, 1e-12);
    EXPECT_NEAR(q.value_at(p), 0.0, 1e-12);
  }
}

TEST(QuadraticToStandard, RoundTripThroughAllForms) {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 500; ++trial) {
    const auto e = random_ellipse(rng);
    ASSERT_TRUE(is_valid(e));
    const auto back = quadratic_to_standard(general_to_quadratic(standard_to_general(e)));
    EXPECT_NEAR((back.center - e.center).norm(), 0.0, 1e-8);
    EXPECT_NEAR(back.r1, e.r1, 1e-8);
    EXPECT_NEAR(back.r2, e.r2, 1e-8);
    if (!is_near_circular(e) && e.r2 / e.r1 > 1.001) {
      EXPECT_NEAR(angle_diff_pi(back.theta, e.theta), 0.0, 1e-8);
    }
    EXPECT_NEAR(area(standard_to_general(e)), area(e), 1e-9 * area(e));
  }
}

TEST(Contains, UnitDiskCases) {
  const StandardEllipse disk;
  EXPECT_TRUE(contains(disk, Vec2(0, 0)));
  EXPECT_FALSE(contains(disk, Vec2(1.001, 0)));
  EXPECT_TRUE(contains(disk, Vec2(1.001, 0), 0.05));
}

TEST(Contains, MatchesHandWrittenAxisTest) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-15.0, 15.0);
  for (int trial = 0; trial < 50; ++trial) {
    const auto e = random_ellipse(rng);
    const Vec2 minor(std::cos(e.theta), std::sin(e.theta));
    for (int i = 0; i < 200; ++i) {
      const Vec2 p(u(rng), u(rng));
      const double ref = oracle::axis_level(e.center, minor, e.r1, e.r2, p);
      EXPECT_NEAR(e.level_at(p), ref, 1e-9 * (1.0 + ref));
    }
  }
}

TEST(Area, KnownValues) {
  EXPECT_DOUBLE_EQ(area(StandardEllipse{}), kPi);
  EXPECT_NEAR(area(make_ellipse(Vec2::Zero(), 1.0, 2.0, 0.3)), 2.0 * kPi, 1e-12);
}

TEST(BoundarySample, FourPointsOnUnitDisk) {
  const auto pts = boundary_sample(StandardEllipse{}, 4);
  ASSERT_EQ(pts.size(), 4u);
  const Vec2 expected[] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
  for (int k = 0; k < 4; ++k) EXPECT_NEAR((pts[k] - expected[k]).norm(), 0.0, 1e-12);
}

TEST(BoundarySample, PointsLieOnBoundaryAndHullFillsArea) {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 100; ++trial) {
    const auto e = random_ellipse(rng);
    const auto pts = boundary_sample(e, 256);
    for (const auto& p : pts) EXPECT_TRUE(contains(e, p, 1e-9));
    EXPECT_GE(oracle::polygon_area(oracle::convex_hull(pts)), 0.999 * area(e));
  }
}

TEST(ObbOfPair, CoincidentUnitDisks) {
  const auto box = obb_of_pair(StandardEllipse{}, StandardEllipse{});
  EXPECT_NEAR(box.half_extents.x(), 1.0, 0.01);
  EXPECT_NEAR(box.half_extents.y(), 1.0, 0.01);
}

TEST(ObbOfPair, SeparatedUnitDisks) {
  StandardEllipse far;
  far.center = Vec2(4, 0);
  const auto box = obb_of_pair(StandardEllipse{}, far);
  const double big = std::max(box.half_extents.x(), box.half_extents.y());
  const double small = std::min(box.half_extents.x(), box.half_extents.y());
  EXPECT_NEAR(big, 3.0, 0.06);
  EXPECT_NEAR(small, 1.0, 0.02);
}

TEST(ObbOfPair, ContainsEverySampleAndIgnoresOrder) {
  std::mt19937_64 rng(9);
  for (int trial = 0; trial < 300; ++trial) {
    const auto a = random_ellipse(rng);
    const auto b = random_ellipse(rng);
    const auto box = obb_of_pair(a, b);
    for (const auto& e : {a, b}) {
      for (const auto& p : boundary_sample(e, kObbSamples)) EXPECT_TRUE(box.contains(p));
    }
    const auto swapped = obb_of_pair(b, a);
    EXPECT_EQ(box.area(), swapped.area());
  }
}

TEST(Angles, WrapAndDifference) {
  EXPECT_NEAR(wrap_pi(-0.1), kPi - 0.1, 1e-15);
  EXPECT_NEAR(wrap_pi(3 * kPi + 0.2), 0.2, 1e-12);
  EXPECT_NEAR(angle_diff_pi(0.05, kPi - 0.05), 0.1, 1e-12);
  EXPECT_NEAR(angle_diff_pi(kPi - 0.05, 0.05), -0.1, 1e-12);
}

TEST(MakeEllipse, SwapsAxesIntoCanonicalOrder) {
  const auto e = make_ellipse(Vec2(1, 2), 3.0, 1.0, 0.0);
  EXPECT_EQ(e.r1, 1.0);
  EXPECT_EQ(e.r2, 3.0);
  EXPECT_NEAR(e.theta, kPi / 2, 1e-15);
  EXPECT_NEAR(e.level_at(Vec2(4, 2)), 1.0, 1e-12);
}

}  // namespace
