#pragma once

#include <algorithm>
#include <cmath>

namespace ovsafe {

/// tanh(2); V(u) = tanh(u - 2) + tanh(2).
inline constexpr double kTanh2 = 0.96402758007581688395;

/// Supremum of the optimal-velocity function, V(+inf) = 1 + tanh(2).
inline constexpr double kVelocitySup = 1.0 + kTanh2;

/// A point in the reduced phase space: gap x behind the leader and
/// relative velocity y = v_lead - v_follower.
struct State {
  double x = 0.0;
  double y = 0.0;

  friend bool operator==(const State&, const State&) = default;
};

/// Time derivative of a State (or a gradient in the same coordinates).
struct Tangent {
  double dx = 0.0;
  double dy = 0.0;
};

/// Physical constants of the two-vehicle model plus the initial condition.
///
/// Units: alpha [1/time], beta [length^2/time], d [length], v_circ
/// [length/time], x_circ [length], y_circ [length/time].
struct ModelParams {
  double alpha = 0.0;
  double beta = 0.0;
  double d = 0.0;
  double v_circ = 0.0;
  double x_circ = 0.0;
  double y_circ = 0.0;
};

/// Throws std::invalid_argument naming the first violated invariant.
void validate(const ModelParams& p);

/// Constants derived once from ModelParams.
struct DerivedConstants {
  double x_inf = 0.0;         ///< equilibrium gap, V(x_inf / d) = v_circ
  double x_minus = 0.0;       ///< min(x_circ, x_inf); boundary strip is (0, x_minus / 2)
  double h_circ = 0.0;        ///< initial energy H(x_circ, y_circ)
  double x_bar = 0.0;         ///< P(x_bar) = h_circ + 1, x_bar > x_inf
  double y_bar = 0.0;         ///< sqrt(2 (h_circ + 1))
  double x_dagger = 0.0;      ///< min(x_circ, d V^{-1}(v_circ / 2))
  double phi_lower = 0.0;     ///< (1/x_dagger + 2 y_bar / beta)^{-1}
  double varpi_dagger = 0.0;  ///< (alpha v_circ / 2) / (alpha + 4 beta / phi_lower^2)
  double delta_bar = 0.0;     ///< min(1 / (2 y_bar), phi_lower / 4)
};

/// V(u) = tanh(u - 2) - tanh(-2).
inline double optimal_velocity(double u) { return std::tanh(u - 2.0) + kTanh2; }

/// dV/du.
inline double optimal_velocity_slope(double u) {
  const double c = std::cosh(u - 2.0);
  return 1.0 / (c * c);
}

/// Closed-form inverse 2 + atanh(v + tanh(-2)); throws std::domain_error
/// unless v lies in (0, 1 + tanh(2)).
double optimal_velocity_inverse(double v);

/// Clamp y to [-1/delta, 1/delta].
inline double cutoff(double y, double delta) {
  const double bound = 1.0 / delta;
  return std::clamp(y, -bound, bound);
}

/// Validated parameter set with its derived constants cached.
///
/// Immutable after construction; every member function is pure and safe to
/// call concurrently.
class Model {
 public:
  explicit Model(const ModelParams& p);

  const ModelParams& params() const { return params_; }
  const DerivedConstants& derived() const { return derived_; }
  State equilibrium() const { return {derived_.x_inf, 0.0}; }
  State initial_state() const { return {params_.x_circ, params_.y_circ}; }

  /// P(x) = alpha * int_{x_inf}^{x} (V(s/d) - v_circ) ds, in closed form.
  /// Throws std::domain_error for x <= 0.
  double potential(double x) const;

  /// P'(x) = alpha (V(x/d) - v_circ). Defined on the whole line.
  double potential_slope(double x) const {
    return params_.alpha * (optimal_velocity(x / params_.d) - params_.v_circ);
  }

  /// H(x, y) = y^2 / 2 + P(x). Throws std::domain_error for x <= 0.
  double hamiltonian(State z) const;

  /// (P'(x), y).
  Tangent hamiltonian_gradient(State z) const { return {potential_slope(z.x), z.y}; }

  /// Singular drift B(z). Throws std::domain_error for x <= 0.
  Tangent drift(State z) const;

  /// Regularized drift B^(delta)(z), total on the plane.
  Tangent drift_regularized(State z, double delta) const {
    const double denom = std::max(z.x * z.x, delta * delta);
    return {z.y, -params_.alpha * (optimal_velocity(z.x / params_.d) - params_.v_circ + z.y) -
                     params_.beta * cutoff(z.y, delta) / denom};
  }

  /// Closed form of P without the domain check; used in hot loops where the
  /// caller has already established x > 0.
  double potential_unchecked(double x) const {
    return params_.alpha * params_.d * (log_cosh(2.0 - x / params_.d) - log_cosh_x_inf_) +
           params_.alpha * (kTanh2 - params_.v_circ) * (x - derived_.x_inf);
  }

  static double log_cosh(double u) {
    const double a = std::abs(u);
    return a + std::log1p(std::exp(-2.0 * a)) - std::log(2.0);
  }

 private:
  ModelParams params_;
  DerivedConstants derived_;
  double log_cosh_x_inf_ = 0.0;
};

}  // namespace ovsafe
