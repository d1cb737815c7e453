#pragma once

// Actions, convex action sets with exact Euclidean projection, and the two
// loss families used by the learners: linear losses over the probability
// simplex (the experts problem) and clamped quadratics.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <numeric>
#include <variant>
#include <vector>

#include <Eigen/Core>

#include "reset/errors.hpp"

namespace reset {

using Vector = Eigen::VectorXd;
/// A point of the action set. For the simplex this is a probability vector.
using Action = Vector;

inline bool all_finite(const Vector& v) { return v.allFinite(); }

/// The probability simplex over `n` coordinates.
struct Simplex {
  std::size_t n;
};

/// Closed Euclidean ball.
struct Ball {
  Vector center;
  double radius;
};

/// Bounded convex feasible set. Immutable after construction.
class ActionSet {
 public:
  static ActionSet simplex(std::size_t n) {
    detail::require(n >= 1, "simplex dimension must be at least 1");
    return ActionSet(Simplex{n});
  }

  static ActionSet ball(Vector center, double radius) {
    detail::require(center.size() >= 1, "ball dimension must be at least 1");
    detail::require(all_finite(center), "ball center must be finite");
    detail::require(std::isfinite(radius) && radius > 0.0, "ball radius must be positive");
    return ActionSet(Ball{std::move(center), radius});
  }

  bool is_simplex() const { return std::holds_alternative<Simplex>(shape_); }
  bool is_ball() const { return std::holds_alternative<Ball>(shape_); }
  const Ball& as_ball() const { return std::get<Ball>(shape_); }

  std::size_t dimension() const {
    if (is_simplex()) return std::get<Simplex>(shape_).n;
    return static_cast<std::size_t>(as_ball().center.size());
  }

  /// Euclidean diameter: sqrt(2) for a simplex with at least two vertices.
  double diameter() const {
    if (is_simplex()) return dimension() >= 2 ? std::sqrt(2.0) : 0.0;
    return 2.0 * as_ball().radius;
  }

  /// Uniform vector for the simplex, the center for a ball.
  Action center() const {
    if (is_simplex()) {
      const auto n = dimension();
      return Vector::Constant(static_cast<Eigen::Index>(n), 1.0 / static_cast<double>(n));
    }
    return as_ball().center;
  }

  bool contains(const Vector& x, double tol = 1e-9) const {
    if (static_cast<std::size_t>(x.size()) != dimension() || !all_finite(x)) return false;
    if (is_simplex()) return x.minCoeff() >= -tol && std::abs(x.sum() - 1.0) <= tol;
    const auto& b = as_ball();
    return (x - b.center).norm() <= b.radius + tol;
  }

  /// argmin over the set of ||x - p||_2.
  Action project(const Vector& p) const {
    detail::require(static_cast<std::size_t>(p.size()) == dimension(),
                    "projection: dimension mismatch");
    detail::require(all_finite(p), "projection: point must be finite");
    if (is_simplex()) return project_simplex(p);
    const auto& b = as_ball();
    const Vector offset = p - b.center;
    const double dist = offset.norm();
    if (dist <= b.radius) return p;
    return b.center + (b.radius / dist) * offset;
  }

 private:
  explicit ActionSet(std::variant<Simplex, Ball> shape) : shape_(std::move(shape)) {}

  // Sort-then-threshold: find the largest k with u_k > (sum_{j<=k} u_j - 1)/k
  // over the descending sort u, then shift by that threshold and clip at zero.
  static Action project_simplex(const Vector& p) {
    const auto n = p.size();
    std::vector<double> u(p.data(), p.data() + n);
    std::sort(u.begin(), u.end(), std::greater<>());
    double cumulative = 0.0;
    double theta = 0.0;
    for (Eigen::Index k = 0; k < n; ++k) {
      cumulative += u[static_cast<std::size_t>(k)];
      const double candidate = (cumulative - 1.0) / static_cast<double>(k + 1);
      if (u[static_cast<std::size_t>(k)] - candidate > 0.0) theta = candidate;
    }
    return (p.array() - theta).max(0.0).matrix();
  }

  std::variant<Simplex, Ball> shape_;
};

/// <g, x> with g in [0,1]^N; valid over the simplex.
struct Linear {
  Vector g;
};

/// min(1, scale * ||x - a||^2).
struct ClampedQuadratic {
  Vector a;
  double scale;
};

/// Loss function with exact evaluation and a subgradient.
class LossFunction {
 public:
  static LossFunction linear(Vector g) {
    detail::require(g.size() >= 1, "linear loss: empty coefficient vector");
    detail::require(all_finite(g), "linear loss: coefficients must be finite");
    detail::require(g.minCoeff() >= 0.0 && g.maxCoeff() <= 1.0,
                    "linear loss: coefficients must lie in [0,1]");
    return LossFunction(Linear{std::move(g)});
  }

  static LossFunction zero(std::size_t dimension) {
    return linear(Vector::Zero(static_cast<Eigen::Index>(dimension)));
  }

  static LossFunction clamped_quadratic(Vector a, double scale) {
    detail::require(a.size() >= 1, "quadratic loss: empty minimiser");
    detail::require(all_finite(a), "quadratic loss: minimiser must be finite");
    detail::require(std::isfinite(scale) && scale > 0.0, "quadratic loss: scale must be positive");
    return LossFunction(ClampedQuadratic{std::move(a), scale});
  }

  bool is_linear() const { return std::holds_alternative<Linear>(form_); }
  bool is_quadratic() const { return std::holds_alternative<ClampedQuadratic>(form_); }
  const Linear& as_linear() const { return std::get<Linear>(form_); }
  const ClampedQuadratic& as_quadratic() const { return std::get<ClampedQuadratic>(form_); }

  std::size_t dimension() const {
    return static_cast<std::size_t>(is_linear() ? as_linear().g.size() : as_quadratic().a.size());
  }

  /// Whether the loss is admissible over `set`: values in [0,1] on the whole
  /// set. Non-zero linear losses need the simplex.
  bool valid_on(const ActionSet& set) const {
    if (dimension() != set.dimension()) return false;
    if (is_linear()) return set.is_simplex() || as_linear().g.isZero(0.0);
    return true;
  }

  double eval(const Vector& x) const {
    check_dimension(x);
    if (is_linear()) return as_linear().g.dot(x);
    const auto& q = as_quadratic();
    return std::min(1.0, q.scale * (x - q.a).squaredNorm());
  }

  Vector subgradient(const Vector& x) const {
    check_dimension(x);
    if (is_linear()) return as_linear().g;
    const auto& q = as_quadratic();
    const Vector offset = x - q.a;
    if (q.scale * offset.squaredNorm() >= 1.0) return Vector::Zero(x.size());
    return 2.0 * q.scale * offset;
  }

 private:
  explicit LossFunction(std::variant<Linear, ClampedQuadratic> form) : form_(std::move(form)) {}

  void check_dimension(const Vector& x) const {
    detail::require(static_cast<std::size_t>(x.size()) == dimension(), "loss: dimension mismatch");
  }

  std::variant<Linear, ClampedQuadratic> form_;
};

/// Norm bound on subgradients of linear losses over Simplex(n).
inline double linear_gradient_bound(std::size_t n) { return std::sqrt(static_cast<double>(n)); }

/// Norm bound on subgradients of clamped quadratics with minimiser in `set`.
/// The gradient is 2s(x-a) only while s||x-a||^2 < 1, so ||x-a|| < 1/sqrt(s).
inline double quadratic_gradient_bound(double scale, const ActionSet& set) {
  return 2.0 * scale * std::min(set.diameter(), 1.0 / std::sqrt(scale));
}

}  // namespace reset
