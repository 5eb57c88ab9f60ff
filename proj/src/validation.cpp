#include "ovsafe/validation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "ovsafe/sde.hpp"

namespace ovsafe {

namespace {

std::vector<double> linspace(double a, double b, std::size_t n) {
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    out[i] = n == 1 ? a : a + (b - a) * static_cast<double>(i) / static_cast<double>(n - 1);
  }
  return out;
}

CheckResult check(std::string name, double measured, double bound) {
  return {std::move(name), measured, bound, measured <= bound};
}

}  // namespace

std::vector<State> trajectory_grid() {
  std::vector<State> out;
  for (double x : {0.06, 0.3, 0.8, 1.5, 3.0}) {
    for (double y : linspace(-2.0, 2.0, 10)) out.push_back({x, y});
  }
  return out;
}

double energy_identity_error(const Model& model, std::size_t n) {
  const auto& p = model.params();
  double worst = 0.0;
  for (double x : linspace(0.05, 5.0, n)) {
    for (double y : linspace(-3.0, 3.0, n)) {
      const Tangent g = model.hamiltonian_gradient({x, y});
      const Tangent b = model.drift({x, y});
      const double lhs = g.dx * b.dx + g.dy * b.dy;
      const double rhs = -(p.alpha + p.beta / (x * x)) * y * y;
      worst = std::max(worst, std::abs(lhs - rhs));
    }
  }
  return worst;
}

double max_energy_increase(const Trajectory& traj) {
  double worst = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 1; i < traj.h_values.size(); ++i) {
    worst = std::max(worst, traj.h_values[i] - traj.h_values[i - 1]);
  }
  return worst;
}

double drift_sign_grid_max(const BarrierTable& table, const Model& model, std::size_t n) {
  const double x_lo = 0.5 * table.phi_lower;
  double worst = -std::numeric_limits<double>::infinity();
  for (double y : linspace(-table.y_bar, table.y_bar, n)) {
    const double x_hi = table.phi(y);
    for (double x : linspace(x_lo, x_hi, n)) {
      worst = std::max(worst, drift_sign_functional({x, y}, table, model));
    }
  }
  return worst;
}

double barrier_self_convergence(const BarrierTable& coarse, const BarrierTable& fine) {
  double worst = 0.0;
  for (std::size_t i = 0; i < coarse.y_grid.size(); ++i) {
    worst = std::max(worst, std::abs(coarse.phi_vals[i] - fine.phi(coarse.y_grid[i])));
  }
  return worst;
}

double parametrization_margin(const Model& model, const std::vector<double>& y_starts) {
  const double x_start = 0.5 * model.derived().x_minus;
  double worst = std::numeric_limits<double>::infinity();
  for (double ys : y_starts) {
    const ParametrizedCurve curve = solve_parametrization(model, ys, x_start, 0.0);
    const auto& y = curve.y();
    for (std::size_t i = 0; i + 1 < y.size(); ++i) {
      worst = std::min(worst, curve.phi()[i] - reference_curve(y[i], ys, x_start, model));
    }
  }
  return worst;
}

std::vector<CheckResult> run_validation(const Model& model, const ValidationOptions& opt) {
  std::vector<CheckResult> out;
  const auto& dc = model.derived();

  out.push_back(check("energy_identity_max_abs_error",
                      energy_identity_error(model, opt.identity_grid), 1e-10));

  double increase = -std::numeric_limits<double>::infinity();
  double final_distance = 0.0;
  double not_converged = 0.0;
  for (const State& z0 : trajectory_grid()) {
    const Trajectory traj = integrate_deterministic(z0, model, opt.deterministic_horizon);
    increase = std::max(increase, max_energy_increase(traj));
    final_distance = std::max(
        final_distance, std::hypot(traj.back().x - dc.x_inf, traj.back().y));
    not_converged += traj.status != TrajectoryStatus::ConvergedToEquilibrium;
  }
  out.push_back(check("energy_max_forward_difference", increase, 1e-8));
  out.push_back(check("trajectories_not_converged", not_converged, 0.0));
  out.push_back(check("max_final_distance_to_equilibrium", final_distance, 1e-6));

  out.push_back(check("parametrization_negative_margin",
                      -parametrization_margin(model, {-0.25, -0.5, -1.0, -2.0, -4.0}), 1e-8));

  const BarrierTable table = build_barrier(model, opt.barrier_resolution);
  double rise = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 1; i < table.phi_vals.size(); ++i) {
    rise = std::max(rise, table.phi_vals[i] - table.phi_vals[i - 1]);
  }
  out.push_back(check("barrier_max_increase", rise, 0.0));
  const double phi_min = *std::min_element(table.phi_vals.begin(), table.phi_vals.end());
  out.push_back(check("barrier_floor_violation", dc.phi_lower - phi_min, 0.0));

  double law_lower = 0.0;
  double law_upper = 0.0;
  for (std::size_t i = 0; i < table.y_grid.size(); ++i) {
    const double y = table.y_grid[i];
    const double phi = table.phi_vals[i];
    const double dphi = table.dphi_vals[i];
    if (y <= 0.0) {
      const double expected = -1.0 / (model.params().alpha + model.params().beta / (phi * phi));
      law_lower = std::max(law_lower, std::abs(dphi - expected));
    } else if (y >= table.varpi_dagger) {
      law_upper = std::max(law_upper, std::abs(dphi));
    }
  }
  out.push_back(check("barrier_derivative_law_nonpositive_y", law_lower, 1e-7));
  out.push_back(check("barrier_derivative_law_above_varpi", law_upper, 1e-12));
  out.push_back(check("barrier_max_abs_dphi", table.max_abs_d1, 10.0 * table.analytic_deriv_bound));
  out.push_back(check("barrier_max_abs_d2phi", table.max_abs_d2, 10.0 * table.analytic_deriv_bound));

  const BarrierTable fine = build_barrier(model, 2 * opt.barrier_resolution);
  out.push_back(check("barrier_self_convergence", barrier_self_convergence(table, fine), 1e-9));

  out.push_back(check("drift_sign_grid_max",
                      drift_sign_grid_max(table, model, opt.drift_sign_grid), 1e-9));

  constexpr double kDt = 1e-3;
  double divergence = 0.0;
  double ordering_failures = 0.0;
  for (std::size_t k = 0; k < opt.consistency_pairs; ++k) {
    const double delta_plus = 0.05 * static_cast<double>(1 + k % 4);
    const ConsistencyReport rep = check_consistency(
        model.initial_state(), 1.0, 0.5 * delta_plus, delta_plus, opt.seed + k, model, kDt, 20.0);
    divergence = std::max(divergence, rep.max_divergence);
    ordering_failures += !rep.ordering_holds;
  }
  out.push_back(check("consistency_max_divergence", divergence, 10.0 * kDt));
  out.push_back(check("consistency_ordering_failures", ordering_failures, 0.0));
  return out;
}

}  // namespace ovsafe
