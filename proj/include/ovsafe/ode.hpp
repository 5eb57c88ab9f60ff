#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "ovsafe/model.hpp"

namespace ovsafe {

enum class TrajectoryStatus { Running, ConvergedToEquilibrium, CollisionDetected, HorizonReached };

std::string_view to_string(TrajectoryStatus s);

/// Solution of the deterministic ODE sampled at the accepted integrator steps.
///
/// `status == Running` means the integration was cut short by an integrator
/// fault (step-size underflow or a nonfinite state); `fault` then says why.
struct Trajectory {
  std::vector<double> times;
  std::vector<State> states;
  std::vector<double> h_values;
  TrajectoryStatus status = TrajectoryStatus::Running;
  std::string fault;

  std::size_t size() const { return times.size(); }
  const State& back() const { return states.back(); }
};

/// Tolerances and termination thresholds for integrate_deterministic.
struct StepControl {
  double rtol = 1e-9;
  double atol = 1e-11;
  double initial_step = 1e-3;
  double min_step = 1e-14;
  /// x below this is reported as CollisionDetected.
  double collision_threshold = 1e-6;
  /// ||z - (x_inf, 0)|| below this for `convergence_hold` time units ends the run.
  double convergence_tol = 1e-8;
  double convergence_hold = 1.0;
};

/// Adaptive Dormand-Prince 4(5) solution of dz/dt = B(z) from z0 up to `horizon`.
/// Throws std::invalid_argument if z0.x <= 0 or horizon <= 0.
Trajectory integrate_deterministic(State z0, const Model& model, double horizon,
                                   const StepControl& control = {});

enum class Region { Lower, Upper, Outside };

std::string_view to_string(Region r);

/// Lower: (0, x_minus/2) x (-inf, 0); Upper: (0, x_minus/2) x [0, inf);
/// everything else is Outside.
Region classify_region(State z, const Model& model);

/// Slope d(phi)/dy of the curve x = phi(y) traced by a trajectory in the lower
/// strip: -y / (P'(phi) + (alpha + beta/phi^2) y).
/// Throws std::domain_error unless y < 0 and 0 < phi < x_minus.
double parametrization_rhs(double y, double phi, const Model& model);

/// {1/x_start + (y - y_start)/beta}^{-1}; throws std::domain_error if y < y_start.
double reference_curve(double y, double y_start, double x_start, const Model& model);

/// The curve x = phi(y) tabulated on a uniform y grid, with cubic Hermite
/// evaluation between nodes using the exact slopes.
class ParametrizedCurve {
 public:
  ParametrizedCurve(const Model& model, std::vector<double> y, std::vector<double> phi);

  const std::vector<double>& y() const { return y_; }
  const std::vector<double>& phi() const { return phi_; }
  double operator()(double y) const;

 private:
  std::vector<double> y_;
  std::vector<double> phi_;
  std::vector<double> slope_;
};

/// Solve phi' = parametrization_rhs(y, phi), phi(y_start) = x_start on
/// [y_start, y_end] with y_start < y_end <= 0, tabulated at `samples` points.
ParametrizedCurve solve_parametrization(const Model& model, double y_start, double x_start,
                                        double y_end, std::size_t samples = 2001);

/// Segment-level checks of the boundary-strip behaviour of a trajectory.
struct StripDiagnostics {
  /// Samples that went Upper -> Lower inside one contiguous strip segment.
  std::size_t upper_to_lower = 0;
  /// Largest decrease of x between consecutive samples that are both Upper.
  double max_leftward_step_in_upper = 0.0;
  /// Number of samples inside the strip at all.
  std::size_t strip_samples = 0;
};

StripDiagnostics analyze_strip(const Trajectory& traj, const Model& model);

}  // namespace ovsafe
