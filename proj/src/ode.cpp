#include "ovsafe/ode.hpp"

#include <array>
#include <cmath>
#include <stdexcept>
#include <string>

#include <boost/numeric/odeint.hpp>

namespace ovsafe {

namespace odeint = boost::numeric::odeint;

namespace {

using Vec2 = std::array<double, 2>;

double hermite(double h, double t, double y0, double y1, double m0, double m1) {
  const double t2 = t * t;
  const double t3 = t2 * t;
  return (2 * t3 - 3 * t2 + 1) * y0 + (t3 - 2 * t2 + t) * h * m0 + (-2 * t3 + 3 * t2) * y1 +
         (t3 - t2) * h * m1;
}

// Slope of the parametrized curve; the public version adds the domain check.
double parametrization_slope(double y, double phi, const Model& model) {
  const auto& p = model.params();
  return -y / (model.potential_slope(phi) + (p.alpha + p.beta / (phi * phi)) * y);
}

}  // namespace

std::string_view to_string(TrajectoryStatus s) {
  switch (s) {
    case TrajectoryStatus::Running: return "Running";
    case TrajectoryStatus::ConvergedToEquilibrium: return "ConvergedToEquilibrium";
    case TrajectoryStatus::CollisionDetected: return "CollisionDetected";
    case TrajectoryStatus::HorizonReached: return "HorizonReached";
  }
  return "Unknown";
}

std::string_view to_string(Region r) {
  switch (r) {
    case Region::Lower: return "Lower";
    case Region::Upper: return "Upper";
    case Region::Outside: return "Outside";
  }
  return "Unknown";
}

Trajectory integrate_deterministic(State z0, const Model& model, double horizon,
                                   const StepControl& control) {
  if (!(z0.x > 0.0) || !std::isfinite(z0.y)) {
    throw std::invalid_argument("integrate_deterministic: initial state must lie in (0,inf) x R");
  }
  if (!(horizon > 0.0)) {
    throw std::invalid_argument("integrate_deterministic: horizon must be > 0");
  }

  const auto& p = model.params();
  // Evaluated at trial stages too, where x may be transiently nonpositive;
  // the resulting huge error estimate makes the stepper reject the step.
  auto rhs = [&p](const Vec2& s, Vec2& ds, double /*t*/) {
    ds[0] = s[1];
    ds[1] = -p.alpha * (optimal_velocity(s[0] / p.d) - p.v_circ + s[1]) -
            p.beta * s[1] / (s[0] * s[0]);
  };

  auto stepper = odeint::make_controlled(control.atol, control.rtol,
                                         odeint::runge_kutta_dopri5<Vec2>());

  Trajectory traj;
  const State eq = model.equilibrium();
  auto record = [&](double t, const Vec2& s) {
    traj.times.push_back(t);
    traj.states.push_back({s[0], s[1]});
    traj.h_values.push_back(model.hamiltonian({s[0], s[1]}));
  };

  Vec2 s{z0.x, z0.y};
  double t = 0.0;
  double dt = std::min(control.initial_step, horizon);
  record(t, s);

  double entered_ball_at = -1.0;
  auto in_ball = [&](const Vec2& v) {
    return std::hypot(v[0] - eq.x, v[1] - eq.y) < control.convergence_tol;
  };
  if (in_ball(s)) entered_ball_at = 0.0;

  while (true) {
    if (t >= horizon) {
      traj.status = TrajectoryStatus::HorizonReached;
      return traj;
    }
    if (dt < control.min_step) {
      traj.status = TrajectoryStatus::Running;
      traj.fault = "step-size underflow at t = " + std::to_string(t);
      return traj;
    }
    dt = std::min(dt, horizon - t);

    const Vec2 saved = s;
    const double t_saved = t;
    const double dt_tried = dt;
    const auto result = stepper.try_step(rhs, s, t, dt);
    if (result == odeint::fail) continue;
    if (!std::isfinite(s[0]) || !std::isfinite(s[1]) || s[0] <= 0.0) {
      // A step that lands on x <= 0 or blows up is retried with a smaller step;
      // the collision check below only sees accepted positive gaps.
      s = saved;
      t = t_saved;
      dt = 0.25 * dt_tried;
      stepper.reset();
      continue;
    }
    // Land exactly on the horizon despite rounding in t + dt.
    if (horizon - t < 1e-12 * horizon) t = horizon;

    record(t, s);

    if (s[0] < control.collision_threshold) {
      traj.status = TrajectoryStatus::CollisionDetected;
      return traj;
    }
    if (in_ball(s)) {
      if (entered_ball_at < 0.0) entered_ball_at = t;
      if (t - entered_ball_at >= control.convergence_hold) {
        traj.status = TrajectoryStatus::ConvergedToEquilibrium;
        return traj;
      }
    } else {
      entered_ball_at = -1.0;
    }
  }
}

Region classify_region(State z, const Model& model) {
  const double half = 0.5 * model.derived().x_minus;
  if (z.x > 0.0 && z.x < half) return z.y < 0.0 ? Region::Lower : Region::Upper;
  return Region::Outside;
}

double parametrization_rhs(double y, double phi, const Model& model) {
  if (!(y < 0.0) || !(phi > 0.0 && phi < model.derived().x_minus)) {
    throw std::domain_error("parametrization_rhs: requires y < 0 and 0 < phi < x_minus");
  }
  return parametrization_slope(y, phi, model);
}

double reference_curve(double y, double y_start, double x_start, const Model& model) {
  if (y < y_start) throw std::domain_error("reference_curve: requires y >= y_start");
  return 1.0 / (1.0 / x_start + (y - y_start) / model.params().beta);
}

ParametrizedCurve::ParametrizedCurve(const Model& model, std::vector<double> y,
                                     std::vector<double> phi)
    : y_(std::move(y)), phi_(std::move(phi)) {
  if (y_.size() != phi_.size() || y_.size() < 2) {
    throw std::invalid_argument("ParametrizedCurve: need matching grids of size >= 2");
  }
  slope_.resize(y_.size());
  for (std::size_t i = 0; i < y_.size(); ++i) {
    slope_[i] = parametrization_slope(y_[i], phi_[i], model);
  }
}

double ParametrizedCurve::operator()(double y) const {
  if (y < y_.front() || y > y_.back()) {
    throw std::domain_error("ParametrizedCurve: y outside tabulated range");
  }
  const double h = (y_.back() - y_.front()) / static_cast<double>(y_.size() - 1);
  auto i = static_cast<std::size_t>((y - y_.front()) / h);
  i = std::min(i, y_.size() - 2);
  const double t = (y - y_[i]) / h;
  return hermite(h, t, phi_[i], phi_[i + 1], slope_[i], slope_[i + 1]);
}

ParametrizedCurve solve_parametrization(const Model& model, double y_start, double x_start,
                                        double y_end, std::size_t samples) {
  if (!(y_start < y_end && y_end <= 0.0)) {
    throw std::domain_error("solve_parametrization: requires y_start < y_end <= 0");
  }
  if (!(x_start > 0.0 && x_start < model.derived().x_minus)) {
    throw std::domain_error("solve_parametrization: requires 0 < x_start < x_minus");
  }
  if (samples < 2) throw std::invalid_argument("solve_parametrization: samples >= 2");

  std::vector<double> ys(samples);
  const double h = (y_end - y_start) / static_cast<double>(samples - 1);
  for (std::size_t i = 0; i < samples; ++i) ys[i] = y_start + h * static_cast<double>(i);
  ys.back() = y_end;

  std::vector<double> phis;
  phis.reserve(samples);
  using Vec1 = std::array<double, 1>;
  Vec1 state{x_start};
  auto rhs = [&model](const Vec1& s, Vec1& ds, double y) {
    ds[0] = parametrization_slope(y, s[0], model);
  };
  auto observer = [&phis](const Vec1& s, double) { phis.push_back(s[0]); };
  odeint::integrate_times(odeint::make_dense_output(1e-14, 1e-13, odeint::runge_kutta_dopri5<Vec1>()),
                          rhs, state, ys.begin(), ys.end(), h, observer);
  return ParametrizedCurve(model, std::move(ys), std::move(phis));
}

StripDiagnostics analyze_strip(const Trajectory& traj, const Model& model) {
  StripDiagnostics out;
  bool seen_upper = false;
  Region prev = Region::Outside;
  for (std::size_t i = 0; i < traj.size(); ++i) {
    const State& z = traj.states[i];
    const Region r = classify_region(z, model);
    if (r == Region::Outside) {
      seen_upper = false;
      prev = r;
      continue;
    }
    ++out.strip_samples;
    if (r == Region::Upper) {
      if (prev == Region::Upper) {
        out.max_leftward_step_in_upper =
            std::max(out.max_leftward_step_in_upper, traj.states[i - 1].x - z.x);
      }
      seen_upper = true;
    } else if (seen_upper) {
      ++out.upper_to_lower;
    }
    prev = r;
  }
  return out;
}

}  // namespace ovsafe
