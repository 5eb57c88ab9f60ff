#include "ovsafe/model.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace ovsafe {

namespace {

void require(bool ok, const std::string& what) {
  if (!ok) throw std::invalid_argument("ModelParams: " + what);
}

}  // namespace

void validate(const ModelParams& p) {
  require(std::isfinite(p.alpha) && std::isfinite(p.beta) && std::isfinite(p.d) &&
              std::isfinite(p.v_circ) && std::isfinite(p.x_circ) && std::isfinite(p.y_circ),
          "all parameters must be finite");
  require(p.alpha > 0.0, "alpha > 0 violated (alpha = " + std::to_string(p.alpha) + ")");
  require(p.beta > 0.0, "beta > 0 violated (beta = " + std::to_string(p.beta) + ")");
  require(p.d > 0.0, "d > 0 violated (d = " + std::to_string(p.d) + ")");
  require(p.x_circ > 0.0, "x_circ > 0 violated (x_circ = " + std::to_string(p.x_circ) + ")");
  require(p.v_circ > 0.0 && p.v_circ < kVelocitySup,
          "v_circ in (0, 1 + tanh(2)) violated (v_circ = " + std::to_string(p.v_circ) + ")");
}

double optimal_velocity_inverse(double v) {
  if (!(v > 0.0 && v < kVelocitySup)) {
    throw std::domain_error("optimal_velocity_inverse: v must lie in (0, 1 + tanh(2)), got " +
                            std::to_string(v));
  }
  return 2.0 + std::atanh(v - kTanh2);
}

Model::Model(const ModelParams& p) : params_(p) {
  validate(p);
  DerivedConstants& c = derived_;
  c.x_inf = p.d * optimal_velocity_inverse(p.v_circ);
  log_cosh_x_inf_ = log_cosh(2.0 - c.x_inf / p.d);
  c.x_minus = std::min(p.x_circ, c.x_inf);
  c.h_circ = hamiltonian({p.x_circ, p.y_circ});
  c.y_bar = std::sqrt(2.0 * (c.h_circ + 1.0));

  // x_bar: expand a bracket to the right of x_inf, then bisect.
  const double level = c.h_circ + 1.0;
  double lo = c.x_inf;
  double step = std::max(c.x_inf, 1.0);
  double hi = c.x_inf + step;
  while (potential_unchecked(hi) <= level) {
    lo = hi;
    step *= 2.0;
    hi = c.x_inf + step;
  }
  while (hi - lo > 1e-10) {
    const double mid = 0.5 * (lo + hi);
    (potential_unchecked(mid) > level ? hi : lo) = mid;
  }
  c.x_bar = 0.5 * (lo + hi);

  c.x_dagger = std::min(p.x_circ, p.d * optimal_velocity_inverse(0.5 * p.v_circ));
  c.phi_lower = 1.0 / (1.0 / c.x_dagger + 2.0 * c.y_bar / p.beta);
  c.varpi_dagger =
      (0.5 * p.alpha * p.v_circ) / (p.alpha + 4.0 * p.beta / (c.phi_lower * c.phi_lower));
  c.delta_bar = std::min(1.0 / (2.0 * c.y_bar), 0.25 * c.phi_lower);
}

double Model::potential(double x) const {
  if (!(x > 0.0)) {
    throw std::domain_error("potential: gap must be > 0, got " + std::to_string(x));
  }
  return potential_unchecked(x);
}

double Model::hamiltonian(State z) const {
  if (!(z.x > 0.0)) {
    throw std::domain_error("hamiltonian: gap must be > 0, got " + std::to_string(z.x));
  }
  return 0.5 * z.y * z.y + potential_unchecked(z.x);
}

Tangent Model::drift(State z) const {
  if (!(z.x > 0.0)) {
    throw std::domain_error("drift: gap must be > 0, got " + std::to_string(z.x));
  }
  return {z.y, -params_.alpha * (optimal_velocity(z.x / params_.d) - params_.v_circ + z.y) -
                   params_.beta * z.y / (z.x * z.x)};
}

}  // namespace ovsafe
