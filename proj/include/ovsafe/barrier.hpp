#pragma once

#include <cstddef>
#include <vector>

#include "ovsafe/model.hpp"

namespace ovsafe {

/// Smooth step: 1 on (-inf, 0], 0 on [1, inf), C-infinity and nonincreasing.
/// rho(u) = g(1-u) / (g(1-u) + g(u)) with g(s) = exp(-1/s) for s > 0, else 0.
double mollifier(double u);
double mollifier_d1(double u);
double mollifier_d2(double u);

/// sup |rho'| and sup |rho''| measured on a dense grid of [0, 1].
struct MollifierBounds {
  double d1 = 0.0;
  double d2 = 0.0;
};
const MollifierBounds& mollifier_bounds();

/// Solution of phi' = -phi^2 / (alpha phi^2 + beta), phi(y_lo) = x_start,
/// tabulated on a uniform grid and evaluated by monotone cubic Hermite
/// interpolation with the exact slopes.
class BarrierDagger {
 public:
  BarrierDagger() = default;
  BarrierDagger(double alpha, double beta, double y_lo, double y_hi, std::vector<double> values);

  double y_lo() const { return y_lo_; }
  double y_hi() const { return y_hi_; }
  const std::vector<double>& values() const { return values_; }
  std::vector<double> grid() const;

  /// Throws std::domain_error outside [y_lo, y_hi].
  double operator()(double y) const;
  double d1(double y) const { return slope((*this)(y)); }
  double d2(double y) const;

  /// Right-hand side of the barrier ODE as a function of phi, and its derivative.
  double slope(double phi) const { return -phi * phi / (alpha_ * phi * phi + beta_); }
  double slope_derivative(double phi) const {
    const double q = alpha_ * phi * phi + beta_;
    return -2.0 * phi * beta_ / (q * q);
  }

 private:
  double alpha_ = 1.0;
  double beta_ = 1.0;
  double y_lo_ = 0.0;
  double y_hi_ = 0.0;
  double h_ = 0.0;
  std::vector<double> values_;
};

/// Solve the barrier ODE from (y_lo, x_dagger) over [y_lo, y_hi] at `points`
/// uniformly spaced nodes. Requires [y_lo, y_hi] to contain [-y_bar, y_bar].
BarrierDagger solve_barrier_dagger(const Model& model, double y_lo, double y_hi,
                                   std::size_t points = 10000);

/// The mollified barrier phi tabulated on [-y_bar, y_bar].
///
/// Between nodes, phi is evaluated from the interpolated phi_dagger and the
/// closed-form mollifier, so the derivative case law holds at every y, not
/// just at the nodes.
struct BarrierTable {
  std::vector<double> y_grid;
  std::vector<double> phi_vals;
  std::vector<double> dphi_vals;
  std::vector<double> d2phi_vals;
  double phi_lower = 0.0;
  /// Measured max(|phi'|, |phi''|) over dense sampling of [-y_bar, y_bar].
  double deriv_bound = 0.0;
  /// Bound assembled from |f| <= 1/alpha, the |f'| bound and the mollifier maxima.
  double analytic_deriv_bound = 0.0;
  double max_abs_d1 = 0.0;
  double max_abs_d2 = 0.0;

  double y_bar = 0.0;
  double x_dagger = 0.0;
  double varpi_dagger = 0.0;
  double alpha = 0.0;
  double beta = 0.0;
  BarrierDagger dagger;

  double phi(double y) const;
  double dphi(double y) const;
  double d2phi(double y) const;
  bool covers(double y) const { return y >= -y_bar && y <= y_bar; }
};

/// Tabulate phi, phi', phi'' on `grid_resolution` points over [-y_bar, y_bar].
/// Throws std::invalid_argument if grid_resolution < 1000.
BarrierTable build_barrier(const Model& model, std::size_t grid_resolution = 10000);

/// D(x, y) = phi(y) - x. Throws std::domain_error for |y| > y_bar.
double danger(State z, const BarrierTable& table);

/// Delta = (max(D, 0))^2.
double danger_squared(State z, const BarrierTable& table);

/// Gradient of Delta: 2 D^+ (-1, phi'(y)).
Tangent danger_squared_gradient(State z, const BarrierTable& table);

/// -phi'(y) {alpha (V(x/d) - v_circ) + (alpha + beta/x^2) y} - y.
/// Throws std::domain_error unless x > 0 and |y| <= y_bar.
double drift_sign_functional(State z, const BarrierTable& table, const Model& model);

}  // namespace ovsafe
