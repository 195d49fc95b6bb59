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

#include <ellid/planner.hpp>

#include <gtest/gtest.h>

#include <numbers>
#include <random>

#include "mpc_contract.hpp"
#include "oracles.hpp"

namespace {

using namespace ellid;
constexpr double kPi = std::numbers::pi;

Track obstacle(double x, double y, double r1, double r2, double theta, Vec2 v = Vec2::Zero(),
               double omega = 0.0) {
  Track t;
  t.state << x, y, theta, v.x(), v.y(), omega;
  t.r1 = r1;
  t.r2 = r2;
  return t;
}

TEST(StepDynamics, Examples) {
  const VehicleState rest{1.0, 2.0, 0.0, 0.0};
  const auto same = step_dynamics(rest, Vec2::Zero(), 0.1, 1.0);
  EXPECT_EQ(same.vec(), rest.vec());
  const auto pushed = step_dynamics(VehicleState{}, Vec2(1, 0), 0.1, 1.0);
  EXPECT_NEAR(pushed.vx, 0.1, 1e-15);
  EXPECT_EQ(pushed.vy, 0.0);
  EXPECT_EQ(pushed.px, 0.0);  // position lags velocity by one step
  EXPECT_EQ(pushed.py, 0.0);
}

TEST(StepDynamics, RolloutConvergesToExactSolutionAtFirstOrder) {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> f(-5.0, 5.0);
  const double horizon = 2.0, mass = 1.7;
  // Force profile as a function of time, piecewise constant on a coarse grid
  // so every fine step sees a constant force.
  std::vector<Vec2> coarse;
  for (int i = 0; i < 8; ++i) coarse.emplace_back(f(rng), f(rng));
  double prev_err = 0.0;
  for (int level = 0; level < 5; ++level) {
    const int steps = 8 << level;
    const double dt = horizon / steps;
    std::vector<Vec2> u;
    for (int k = 0; k < steps; ++k) u.push_back(coarse[k * 8 / steps]);
    VehicleState x{0.5, -1.0, 1.0, 2.0};
    for (const auto& uk : u) x = step_dynamics(x, uk, dt, mass);
    const auto [p, v] = oracle::double_integrator_exact(Vec2(0.5, -1.0), Vec2(1.0, 2.0), u, dt,
                                                         mass);
    EXPECT_NEAR((x.velocity() - v).norm(), 0.0, 1e-12);
    const double err = (x.position() - p).norm();
    // Euler drops 0.5 a dt^2 each step: total error at most 0.5 |a|max T dt.
    EXPECT_LE(err, 0.5 * (5.0 * std::sqrt(2.0) / mass) * horizon * dt + 1e-12);
    if (level > 0) {
      EXPECT_NEAR(prev_err / err, 2.0, 0.05);
    }
    prev_err = err;
  }
}

TEST(CollisionMargin, CenterAndBoundary) {
  const auto e = make_ellipse(Vec2(1, 2), 0.5, 1.5, 0.7);
  EXPECT_EQ(collision_margin(VehicleState{1, 2, 0, 0}, e, 0.3), 0.0);
  StandardEllipse grown = e;
  grown.r1 += 0.3;
  grown.r2 += 0.3;
  for (const auto& p : boundary_sample(grown, 32)) {
    EXPECT_NEAR(collision_margin(p, e, 0.3), 1.0, 1e-9);
  }
}

TEST(CollisionMargin, InvariantUnderRotationAboutCenter) {
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(-4.0, 4.0), th(0.0, 2 * kPi);
  for (int i = 0; i < 500; ++i) {
    const Vec2 c(u(rng), u(rng));
    const auto e = make_ellipse(c, 0.3 + std::abs(u(rng)) / 4, 0.3 + std::abs(u(rng)) / 2, th(rng));
    const Vec2 p(u(rng), u(rng));
    const double a = th(rng);
    const Mat2 rot = rotation(-a);  // counter-clockwise by a
    auto turned = e;
    turned.theta = wrap_pi(e.theta + a);
    const Vec2 q = c + rot * (p - c);
    EXPECT_NEAR(collision_margin(q, turned, 0.3), collision_margin(p, e, 0.3),
                1e-9 * (1.0 + collision_margin(p, e, 0.3)));
  }
}

double tracking_cost(const VehicleState& x, const Vec2& goal, const MpcConfig& cfg) {
  Eigen::Vector4d d = x.vec();
  d.head<2>() -= goal;
  return d.dot(cfg.Q * d);
}

TEST(SolveMpc, ObstacleFreeMovesTowardGoal) {
  const MpcConfig cfg;
  const VehicleState x0{0, 0, 0, 0};
  const Vec2 goal(4, -2);
  const auto sol = solve_mpc(x0, goal, {}, cfg);
  ASSERT_EQ(sol.states.size(), static_cast<std::size_t>(cfg.horizon + 1));
  ASSERT_EQ(sol.controls.size(), static_cast<std::size_t>(cfg.horizon));
  EXPECT_NE(sol.status, SolverStatus::kInfeasible);
  EXPECT_LT(tracking_cost(sol.states.back(), goal, cfg), tracking_cost(x0, goal, cfg));
  EXPECT_LT((sol.states.back().position() - goal).norm(), (x0.position() - goal).norm());
}

TEST(SolveMpc, StaticObstacleIsRespected) {
  const MpcConfig cfg;
  const std::vector<Track> obs{obstacle(3.0, 0.1, 0.5, 1.0, 0.3)};
  const Vec2 goal(6, 0);
  const auto sol = solve_mpc(VehicleState{0, 0, 3, 0}, goal, obs, cfg);
  ASSERT_EQ(sol.margins.rows(), cfg.horizon);
  ASSERT_EQ(sol.margins.cols(), 1);
  for (int i = 0; i < cfg.horizon; ++i) {
    EXPECT_GT(sol.margins(i, 0) + cfg.psi * sol.slacks(i, 0), 1.0 - cfg.solver_tol);
    EXPECT_GE(sol.slacks(i, 0), 0.0);
  }

  // Closed loop against the true ellipse: whenever the plan needs no slack,
  // the executed states keep the vehicle disc outside it.
  RecedingHorizonPlanner planner(cfg);
  VehicleState x{0, 0, 3, 0};
  const auto truth = obs[0].ellipse();
  for (int k = 0; k < 60; ++k) {
    const auto& plan = planner.plan(x, goal, obs);
    x = step_dynamics(x, plan.controls.front(), cfg.dt, cfg.mass);
    if (plan.slacks.maxCoeff() < 1e-6) {
      EXPECT_GT(collision_margin(x, truth, cfg.vehicle_radius), 1.0);
    }
  }
  EXPECT_LT((x.position() - goal).norm(), 0.5);
}

TEST(SolveMpc, SmallerSofteningNeedsLessSlack) {
  const std::vector<Track> obs{obstacle(3.0, 0.1, 0.5, 1.0, 0.3)};
  double prev = std::numeric_limits<double>::infinity();
  for (double psi : {2.0, 1.0, 0.5, 0.3, 0.15, 0.1, 0.05, 0.02}) {
    MpcConfig cfg;
    cfg.psi = psi;
    const auto sol = solve_mpc(VehicleState{0, 0, 3, 0}, Vec2(6, 0), obs, cfg);
    const double total = sol.slacks.sum();
    EXPECT_LE(total, prev + 1e-9) << "psi " << psi;
    prev = total;
  }
}

TEST(SolveMpc, ContradictoryBoundsAreInfeasible) {
  MpcConfig cfg;
  cfg.u_min = Vec2(1, 1);
  cfg.u_max = Vec2(-1, -1);
  const auto sol = solve_mpc(VehicleState{}, Vec2(1, 1), {}, cfg);
  EXPECT_EQ(sol.status, SolverStatus::kInfeasible);
  EXPECT_EQ(sol.controls.size(), static_cast<std::size_t>(cfg.horizon));

  MpcConfig bad_state;
  bad_state.xi_min(2) = 5.0;
  bad_state.xi_max(2) = 4.0;
  EXPECT_EQ(solve_mpc(VehicleState{}, Vec2(1, 1), {}, bad_state).status,
            SolverStatus::kInfeasible);
}

TEST(SolveMpc, WarmStartFromOwnSolutionDoesNotIncreaseCost) {
  const MpcConfig cfg;
  const std::vector<Track> obs{obstacle(2.0, 0.5, 0.4, 0.8, 1.0, Vec2(-1, 0), 0.5)};
  const auto first = solve_mpc(VehicleState{0, 0, 1, 0}, Vec2(5, 1), obs, cfg);
  const auto again = solve_mpc(VehicleState{0, 0, 1, 0}, Vec2(5, 1), obs, cfg, &first.controls);
  EXPECT_LE(again.cost.total(), first.cost.total() + cfg.solver_tol);
}

TEST(SolveMpc, ObstaclesArePropagatedWithTheirVelocity) {
  // An obstacle that starts far away but drives onto the straight path
  // must bend the plan, one that drives away must not.
  const MpcConfig cfg;
  const VehicleState x0{0, 0, 4, 0};
  const Vec2 goal(6, 0);
  const auto free = solve_mpc(x0, goal, {}, cfg);
  const std::vector<Track> incoming{obstacle(2.5, 4.0, 0.4, 0.4, 0.0, Vec2(0, -8))};
  const std::vector<Track> leaving{obstacle(2.5, 4.0, 0.4, 0.4, 0.0, Vec2(0, 8))};
  const auto bent = solve_mpc(x0, goal, incoming, cfg);
  const auto straight = solve_mpc(x0, goal, leaving, cfg);
  double dev_bent = 0.0, dev_straight = 0.0;
  for (int i = 0; i <= cfg.horizon; ++i) {
    dev_bent = std::max(dev_bent, (bent.states[i].position() - free.states[i].position()).norm());
    dev_straight = std::max(
        dev_straight, (straight.states[i].position() - free.states[i].position()).norm());
  }
  EXPECT_GT(dev_bent, 0.1);
  EXPECT_LT(dev_straight, 1e-3);
}

TEST(SolveMpc, ContractHoldsOnRandomInstances) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    for (const auto& what : contract::check(contract::random_instance(seed))) {
      ADD_FAILURE() << "instance " << seed << ": " << what;
    }
  }
}

}  // namespace
