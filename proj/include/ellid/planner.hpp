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

// Point-mass model predictive control with soft ellipse collision
// constraints.
//
// States follow from the controls through the forward-Euler rollout, so the
// dynamics hold exactly for every iterate. Slacks are eliminated in closed
// form, s = max(0, (1 - c) / psi), which turns the soft-constrained program
// into a box-constrained nonlinear least-squares problem over the controls.
// That problem is solved with a projected Gauss-Newton method (Bertsekas'
// projected Newton with a Gauss-Newton Hessian) from a few starting points.

#include <ellid/geometry.hpp>
#include <ellid/tracking.hpp>

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <span>
#include <vector>

namespace ellid {

struct VehicleState {
  double px = 0.0;
  double py = 0.0;
  double vx = 0.0;
  double vy = 0.0;

  Vec2 position() const { return {px, py}; }
  Vec2 velocity() const { return {vx, vy}; }
  Eigen::Vector4d vec() const { return {px, py, vx, vy}; }
  static VehicleState from(const Eigen::Vector4d& x) { return {x(0), x(1), x(2), x(3)}; }
};

// With unit slack weight the bounded penalty (1 / psi)^2 per step is cheaper
// than a detour under the tracking cost, and plans cut through obstacles.
inline constexpr double kDefaultSlackWeight = 100.0;

struct MpcConfig {
  int horizon = 20;
  double dt = 0.05;
  double mass = 1.0;
  Eigen::Matrix4d Q = Eigen::Matrix4d::Identity();
  Mat2 P = Vec2(0.1, 0.1).asDiagonal();
  // Per-obstacle slack weight; obstacles beyond the list use the last entry
  // (or kDefaultSlackWeight when empty).
  std::vector<double> S;
  double psi = 0.15;
  Vec2 u_min = Vec2::Constant(-20.0);
  Vec2 u_max = Vec2::Constant(20.0);
  Eigen::Vector4d xi_min{-std::numeric_limits<double>::infinity(),
                         -std::numeric_limits<double>::infinity(), -20.0, -20.0};
  Eigen::Vector4d xi_max{std::numeric_limits<double>::infinity(),
                         std::numeric_limits<double>::infinity(), 20.0, 20.0};
  double vehicle_radius = 0.3;
  int solver_iters = 50;
  double solver_tol = 1e-6;
  // Velocity reference of the tracking cost: points at the goal with speed
  // min(cruise_speed, distance / approach_time), clipped to the state bounds.
  double approach_time = 0.3;
  double cruise_speed = 14.0;
  // Multiplies Q on the last horizon state.
  double terminal_weight = 30.0;
  double bound_weight = 1e3;

  double slack_weight(std::size_t j) const {
    if (S.empty()) return kDefaultSlackWeight;
    return j < S.size() ? S[j] : S.back();
  }
};

enum class SolverStatus { kConverged, kIterLimit, kInfeasible };

inline const char* to_string(SolverStatus s) {
  switch (s) {
    case SolverStatus::kConverged: return "Converged";
    case SolverStatus::kIterLimit: return "IterLimit";
    case SolverStatus::kInfeasible: return "Infeasible";
  }
  return "Unknown";
}

struct CostBreakdown {
  double tracking = 0.0;
  double control = 0.0;
  double slack = 0.0;
  double bounds = 0.0;  // state-bound penalty, zero when bounds hold

  double total() const { return tracking + control + slack + bounds; }
};

struct MpcSolution {
  std::vector<VehicleState> states;  // N + 1, states[0] = initial
  std::vector<Vec2> controls;        // N
  Eigen::MatrixXd slacks;            // N x n_obstacles, row i for states[i + 1]
  Eigen::MatrixXd margins;           // collision margins c, same layout
  CostBreakdown cost;
  SolverStatus status = SolverStatus::kConverged;
  int iterations = 0;
};

/// One forward-Euler step: p += v dt, v += (u / m) dt.
inline VehicleState step_dynamics(const VehicleState& xi, const Vec2& u, double dt, double m) {
  return {xi.px + xi.vx * dt, xi.py + xi.vy * dt, xi.vx + u.x() / m * dt,
          xi.vy + u.y() / m * dt};
}

/// Delta' R' H(alpha, beta) R Delta with the ellipse semi-axes enlarged by the
/// vehicle radius. Values above 1 are collision free.
inline double collision_margin(const Vec2& position, const StandardEllipse& e,
                               double vehicle_radius) {
  StandardEllipse grown = e;
  grown.r1 += vehicle_radius;
  grown.r2 += vehicle_radius;
  return grown.level_at(position);
}

inline double collision_margin(const VehicleState& xi, const StandardEllipse& e,
                               double vehicle_radius) {
  return collision_margin(xi.position(), e, vehicle_radius);
}

namespace detail {

inline Mat2 psd_sqrt(const Mat2& m) {
  Eigen::SelfAdjointEigenSolver<Mat2> eig(0.5 * (m + m.transpose()));
  return eig.eigenvectors() * eig.eigenvalues().cwiseMax(0.0).cwiseSqrt().asDiagonal() *
         eig.eigenvectors().transpose();
}

inline Eigen::Matrix4d psd_sqrt(const Eigen::Matrix4d& m) {
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix4d> eig(0.5 * (m + m.transpose()));
  return eig.eigenvectors() * eig.eigenvalues().cwiseMax(0.0).cwiseSqrt().asDiagonal() *
         eig.eigenvectors().transpose();
}

/// The horizon problem in the control variables U = [u_0; ...; u_{N-1}].
class HorizonProblem {
 public:
  HorizonProblem(const VehicleState& init, const Vec2& goal, std::span<const Track> obstacles,
                 const MpcConfig& cfg, double time_offset)
      : cfg_(cfg), n_(cfg.horizon), n_obs_(static_cast<int>(obstacles.size())) {
    const int nu = 2 * n_;
    // Positions and velocities of states 1..N as affine maps of U.
    pos_map_ = Eigen::MatrixXd::Zero(2 * n_, nu);
    vel_map_ = Eigen::MatrixXd::Zero(2 * n_, nu);
    pos_off_.resize(2 * n_);
    vel_off_.resize(2 * n_);
    const double dt = cfg.dt, im = 1.0 / cfg.mass;
    for (int i = 1; i <= n_; ++i) {
      for (int k = 0; k <= i - 2; ++k) {
        const double c = dt * dt * im * (i - 1 - k);
        pos_map_(2 * (i - 1), 2 * k) = c;
        pos_map_(2 * (i - 1) + 1, 2 * k + 1) = c;
      }
      for (int k = 0; k < i; ++k) {
        vel_map_(2 * (i - 1), 2 * k) = dt * im;
        vel_map_(2 * (i - 1) + 1, 2 * k + 1) = dt * im;
      }
      pos_off_.segment<2>(2 * (i - 1)) = init.position() + i * dt * init.velocity();
      vel_off_.segment<2>(2 * (i - 1)) = init.velocity();
    }
    init_ = init;

    // Nominal speed profile along the straight line to the goal; step i
    // tracks the velocity the profile has at that step.
    const Vec2 to_goal = goal - init.position();
    double remaining = to_goal.norm();
    const Vec2 dir = remaining > 0.0 ? Vec2(to_goal / remaining) : Vec2::Zero();
    refs_.resize(static_cast<std::size_t>(n_));
    for (int i = 0; i < n_; ++i) {
      const double speed = std::min(cfg.cruise_speed, remaining / cfg.approach_time);
      remaining = std::max(0.0, remaining - speed * dt);
      Vec2 vref = dir * std::min(cfg.cruise_speed, remaining / cfg.approach_time);
      vref = vref.cwiseMax(cfg.xi_min.tail<2>()).cwiseMin(cfg.xi_max.tail<2>());
      refs_[static_cast<std::size_t>(i)] << goal, vref;
    }
    q_sqrt_ = psd_sqrt(cfg.Q);
    terminal_scale_ = std::sqrt(std::max(0.0, cfg.terminal_weight));
    p_sqrt_ = psd_sqrt(cfg.P);

    shapes_.resize(static_cast<std::size_t>(n_ * n_obs_));
    centers_.resize(shapes_.size());
    for (int i = 1; i <= n_; ++i) {
      for (int j = 0; j < n_obs_; ++j) {
        StandardEllipse e = predict_ellipse(obstacles[j], time_offset + i * dt);
        e.r1 += cfg.vehicle_radius;
        e.r2 += cfg.vehicle_radius;
        shapes_[idx(i, j)] = e.shape_matrix();
        centers_[idx(i, j)] = e.center;
      }
    }
    lo_.resize(nu);
    hi_.resize(nu);
    for (int k = 0; k < n_; ++k) {
      lo_.segment<2>(2 * k) = cfg.u_min;
      hi_.segment<2>(2 * k) = cfg.u_max;
    }
  }

  int num_controls() const { return 2 * n_; }
  const Eigen::VectorXd& lower() const { return lo_; }
  const Eigen::VectorXd& upper() const { return hi_; }

  Eigen::VectorXd project(const Eigen::VectorXd& u) const { return u.cwiseMax(lo_).cwiseMin(hi_); }

  double margin(int i, int j, const Vec2& p) const {
    const Vec2 d = p - centers_[idx(i, j)];
    return d.dot(shapes_[idx(i, j)] * d);
  }

  /// Stacked residual r(U) with cost f = ||r||^2, and optionally its Jacobian.
  Eigen::VectorXd residual(const Eigen::VectorXd& u, Eigen::MatrixXd* jac) const {
    const int nu = 2 * n_;
    const int m = 4 * n_ + nu + n_ * n_obs_ + 4 * n_;
    Eigen::VectorXd r = Eigen::VectorXd::Zero(m);
    if (jac) jac->setZero(m, nu);
    const Eigen::VectorXd pos = pos_off_ + pos_map_ * u;
    const Eigen::VectorXd vel = vel_off_ + vel_map_ * u;
    int row = 0;
    for (int i = 0; i < n_; ++i) {
      Eigen::Vector4d x;
      x << pos.segment<2>(2 * i), vel.segment<2>(2 * i);
      const double ws = i + 1 == n_ ? terminal_scale_ : 1.0;
      r.segment<4>(row) = ws * q_sqrt_ * (x - refs_[static_cast<std::size_t>(i)]);
      if (jac) {
        Eigen::MatrixXd dx(4, nu);
        dx.topRows<2>() = pos_map_.middleRows<2>(2 * i);
        dx.bottomRows<2>() = vel_map_.middleRows<2>(2 * i);
        jac->middleRows<4>(row) = ws * q_sqrt_ * dx;
      }
      row += 4;
    }
    for (int k = 0; k < n_; ++k) {
      r.segment<2>(row) = p_sqrt_ * u.segment<2>(2 * k);
      if (jac) jac->block<2, 2>(row, 2 * k) = p_sqrt_;
      row += 2;
    }
    for (int i = 1; i <= n_; ++i) {
      const Vec2 p = pos.segment<2>(2 * (i - 1));
      for (int j = 0; j < n_obs_; ++j, ++row) {
        const Vec2 d = p - centers_[idx(i, j)];
        const Vec2 md = shapes_[idx(i, j)] * d;
        const double c = d.dot(md);
        if (c >= 1.0) continue;
        const double w = std::sqrt(cfg_.slack_weight(static_cast<std::size_t>(j)));
        r(row) = w * (1.0 - c) / cfg_.psi;
        if (jac) {
          const Vec2 grad = -w / cfg_.psi * 2.0 * md;
          jac->row(row) = grad.transpose() * pos_map_.middleRows<2>(2 * (i - 1));
        }
      }
    }
    const double wb = std::sqrt(cfg_.bound_weight);
    for (int i = 0; i < n_; ++i) {
      for (int a = 0; a < 4; ++a, ++row) {
        const bool is_pos = a < 2;
        const int comp = a % 2;
        const double v = is_pos ? pos(2 * i + comp) : vel(2 * i + comp);
        const double lo = cfg_.xi_min(a), hi = cfg_.xi_max(a);
        double excess = 0.0, sign = 0.0;
        if (v > hi) {
          excess = v - hi;
          sign = 1.0;
        } else if (v < lo) {
          excess = lo - v;
          sign = -1.0;
        }
        if (excess <= 0.0) continue;
        r(row) = wb * excess;
        if (jac) {
          const auto& map = is_pos ? pos_map_ : vel_map_;
          jac->row(row) = wb * sign * map.row(2 * i + comp);
        }
      }
    }
    return r;
  }

  double cost(const Eigen::VectorXd& u) const { return residual(u, nullptr).squaredNorm(); }

  MpcSolution assemble(const Eigen::VectorXd& u) const {
    MpcSolution sol;
    sol.states.reserve(static_cast<std::size_t>(n_ + 1));
    sol.states.push_back(init_);
    for (int k = 0; k < n_; ++k) {
      const Vec2 uk = u.segment<2>(2 * k);
      sol.controls.push_back(uk);
      sol.states.push_back(step_dynamics(sol.states.back(), uk, cfg_.dt, cfg_.mass));
    }
    sol.slacks = Eigen::MatrixXd::Zero(n_, n_obs_);
    sol.margins = Eigen::MatrixXd::Zero(n_, n_obs_);
    for (int i = 1; i <= n_; ++i) {
      const Eigen::Vector4d x = sol.states[static_cast<std::size_t>(i)].vec();
      const double ws = i == n_ ? terminal_scale_ : 1.0;
      const Eigen::Vector4d e = ws * q_sqrt_ * (x - refs_[static_cast<std::size_t>(i - 1)]);
      sol.cost.tracking += e.squaredNorm();
      for (int a = 0; a < 4; ++a) {
        const double excess = std::max({0.0, x(a) - cfg_.xi_max(a), cfg_.xi_min(a) - x(a)});
        sol.cost.bounds += cfg_.bound_weight * excess * excess;
      }
      for (int j = 0; j < n_obs_; ++j) {
        const double c = margin(i, j, x.head<2>());
        const double s = std::max(0.0, (1.0 - c) / cfg_.psi);
        sol.margins(i - 1, j) = c;
        sol.slacks(i - 1, j) = s;
        sol.cost.slack += cfg_.slack_weight(static_cast<std::size_t>(j)) * s * s;
      }
    }
    for (const auto& uk : sol.controls) sol.cost.control += uk.dot(cfg_.P * uk);
    return sol;
  }

 private:
  std::size_t idx(int i, int j) const { return static_cast<std::size_t>((i - 1) * n_obs_ + j); }

  const MpcConfig& cfg_;
  int n_;
  int n_obs_;
  VehicleState init_;
  Eigen::MatrixXd pos_map_, vel_map_;
  Eigen::VectorXd pos_off_, vel_off_;
  std::vector<Eigen::Vector4d> refs_;
  Eigen::Matrix4d q_sqrt_;
  double terminal_scale_ = 1.0;
  Mat2 p_sqrt_;
  std::vector<Mat2> shapes_;
  std::vector<Vec2> centers_;
  Eigen::VectorXd lo_, hi_;
};

struct DescentResult {
  Eigen::VectorXd u;
  double cost = 0.0;
  int iterations = 0;
  bool converged = false;
};

/// Projected Gauss-Newton descent on the box-constrained least-squares
/// problem.
inline DescentResult projected_gauss_newton(const HorizonProblem& prob, Eigen::VectorXd u,
                                            int max_iters, double tol) {
  constexpr double kArmijo = 1e-4;
  const int nu = prob.num_controls();
  u = prob.project(u);
  Eigen::MatrixXd jac;
  Eigen::VectorXd r = prob.residual(u, &jac);
  double f = r.squaredNorm();
  DescentResult out;
  for (int it = 0; it < max_iters; ++it) {
    out.iterations = it + 1;
    const Eigen::VectorXd g = 2.0 * jac.transpose() * r;
    const Eigen::VectorXd pg = u - prob.project(u - g);
    if (pg.lpNorm<Eigen::Infinity>() <= tol) {
      out.converged = true;
      break;
    }
    Eigen::MatrixXd h = 2.0 * jac.transpose() * jac;
    h.diagonal().array() += 1e-9 * (1.0 + h.diagonal().maxCoeff());

    const double band = std::min(1e-6, pg.lpNorm<Eigen::Infinity>());
    std::vector<int> free_idx;
    Eigen::VectorXd d = Eigen::VectorXd::Zero(nu);
    for (int k = 0; k < nu; ++k) {
      const bool at_lo = u(k) <= prob.lower()(k) + band && g(k) > 0.0;
      const bool at_hi = u(k) >= prob.upper()(k) - band && g(k) < 0.0;
      if (at_lo || at_hi) {
        d(k) = -g(k) / h(k, k);
      } else {
        free_idx.push_back(k);
      }
    }
    if (!free_idx.empty()) {
      const int nf = static_cast<int>(free_idx.size());
      Eigen::MatrixXd hff(nf, nf);
      Eigen::VectorXd gf(nf);
      for (int a = 0; a < nf; ++a) {
        gf(a) = g(free_idx[a]);
        for (int b = 0; b < nf; ++b) hff(a, b) = h(free_idx[a], free_idx[b]);
      }
      const Eigen::VectorXd df = hff.ldlt().solve(-gf);
      for (int a = 0; a < nf; ++a) d(free_idx[a]) = df(a);
    }

    double alpha = 1.0;
    bool accepted = false;
    Eigen::VectorXd u_new;
    double f_new = f;
    for (int ls = 0; ls < 30; ++ls, alpha *= 0.5) {
      u_new = prob.project(u + alpha * d);
      f_new = prob.cost(u_new);
      if (f_new <= f + kArmijo * g.dot(u_new - u)) {
        accepted = true;
        break;
      }
    }
    if (!accepted || f_new >= f) {
      out.converged = true;
      break;
    }
    const double decrease = f - f_new;
    u = u_new;
    r = prob.residual(u, &jac);
    f = r.squaredNorm();
    if (decrease <= tol * (1.0 + f)) {
      out.converged = true;
      break;
    }
  }
  out.u = u;
  out.cost = f;
  return out;
}

inline bool bounds_consistent(const MpcConfig& cfg) {
  return (cfg.u_min.array() <= cfg.u_max.array()).all() &&
         (cfg.xi_min.array() <= cfg.xi_max.array()).all() && cfg.horizon >= 1 && cfg.dt > 0.0 &&
         cfg.mass > 0.0 && cfg.psi > 0.0;
}

}  // namespace detail

/// Solves the horizon problem. Obstacles are propagated with their track
/// velocities to each step time `time_offset + i * dt`. A warm start, when
/// given, is used as one of the initial guesses.
inline MpcSolution solve_mpc(const VehicleState& xi_init, const Vec2& goal,
                             std::span<const Track> obstacles, const MpcConfig& cfg,
                             const std::vector<Vec2>* warm_controls = nullptr,
                             double time_offset = 0.0) {
  const int n = std::max(cfg.horizon, 1);
  if (!detail::bounds_consistent(cfg)) {
    MpcConfig safe = cfg;
    safe.horizon = n;
    if (!(safe.dt > 0.0)) safe.dt = 1.0;
    if (!(safe.mass > 0.0)) safe.mass = 1.0;
    if (!(safe.psi > 0.0)) safe.psi = 1.0;
    safe.u_min = safe.u_max = Vec2::Zero();
    detail::HorizonProblem prob(xi_init, goal, obstacles, safe, time_offset);
    MpcSolution sol = prob.assemble(Eigen::VectorXd::Zero(2 * n));
    sol.status = SolverStatus::kInfeasible;
    return sol;
  }
  const detail::HorizonProblem prob(xi_init, goal, obstacles, cfg, time_offset);

  std::vector<Eigen::VectorXd> starts;
  if (warm_controls && static_cast<int>(warm_controls->size()) == n) {
    Eigen::VectorXd w(2 * n);
    for (int k = 0; k < n; ++k) w.segment<2>(2 * k) = (*warm_controls)[static_cast<std::size_t>(k)];
    starts.push_back(w);
  }
  // Obstacle-free optimum, then lateral swerves around it to break the
  // symmetry of a head-on approach.
  MpcConfig free_cfg = cfg;
  const detail::HorizonProblem free_prob(xi_init, goal, {}, free_cfg, time_offset);
  const Eigen::VectorXd base =
      detail::projected_gauss_newton(free_prob, Eigen::VectorXd::Zero(2 * n), cfg.solver_iters,
                                     cfg.solver_tol)
          .u;
  starts.push_back(base);
  if (!obstacles.empty()) {
    Vec2 dir = goal - xi_init.position();
    if (dir.norm() < 1e-9) dir = Vec2::UnitX();
    const Vec2 lateral = Vec2(-dir.y(), dir.x()).normalized();
    const Vec2 span_u = 0.5 * (cfg.u_max - cfg.u_min);
    const double amp = 0.5 * span_u.minCoeff();
    for (double side : {1.0, -1.0}) {
      Eigen::VectorXd s = base;
      for (int k = 0; k < n; ++k) {
        const double phase = k < n / 2 ? 1.0 : -1.0;
        s.segment<2>(2 * k) += side * phase * amp * lateral;
      }
      starts.push_back(prob.project(s));
    }
  }

  detail::DescentResult best;
  best.cost = std::numeric_limits<double>::infinity();
  int total_iters = 0;
  for (const auto& s : starts) {
    auto res = detail::projected_gauss_newton(prob, s, cfg.solver_iters, cfg.solver_tol);
    total_iters += res.iterations;
    if (res.cost < best.cost) best = std::move(res);
  }
  MpcSolution sol = prob.assemble(best.u);
  sol.status = best.converged ? SolverStatus::kConverged : SolverStatus::kIterLimit;
  sol.iterations = total_iters;
  return sol;
}

/// Receding-horizon wrapper that warm-starts each solve from the previous
/// plan shifted by one step.
class RecedingHorizonPlanner {
 public:
  explicit RecedingHorizonPlanner(MpcConfig cfg = {}) : cfg_(std::move(cfg)) {}

  const MpcSolution& plan(const VehicleState& xi, const Vec2& goal,
                          std::span<const Track> obstacles, double time_offset = 0.0) {
    std::vector<Vec2> warm;
    const std::vector<Vec2>* warm_ptr = nullptr;
    if (last_ && !last_->controls.empty()) {
      warm.assign(last_->controls.begin() + 1, last_->controls.end());
      warm.push_back(last_->controls.back());
      warm_ptr = &warm;
    }
    last_ = solve_mpc(xi, goal, obstacles, cfg_, warm_ptr, time_offset);
    return *last_;
  }

  const MpcConfig& config() const { return cfg_; }
  void reset() { last_.reset(); }

 private:
  MpcConfig cfg_;
  std::optional<MpcSolution> last_;
};

}  // namespace ellid
