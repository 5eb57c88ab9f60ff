#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "ovsafe/barrier.hpp"
#include "ovsafe/model.hpp"
#include "ovsafe/ode.hpp"

namespace ovsafe {

/// One invariant: `measured` compared against `bound` (measured <= bound passes).
struct CheckResult {
  std::string name;
  double measured = 0.0;
  double bound = 0.0;
  bool pass = false;
};

struct ValidationOptions {
  std::size_t identity_grid = 317;      ///< per axis, about 1e5 points
  std::size_t drift_sign_grid = 2000;   ///< per axis
  std::size_t barrier_resolution = 10000;
  double deterministic_horizon = 200.0;
  std::size_t consistency_pairs = 10;
  std::uint64_t seed = 0;
};

/// 50 initial conditions: x in {0.06, 0.3, 0.8, 1.5, 3} times 10 values of y in [-2, 2].
std::vector<State> trajectory_grid();

/// Largest |<grad H, B> + (alpha + beta/x^2) y^2| over an n x n grid of
/// [0.05, 5] x [-3, 3].
double energy_identity_error(const Model& model, std::size_t n);

/// Largest H(t_{i+1}) - H(t_i) along the trajectory.
double max_energy_increase(const Trajectory& traj);

/// Largest drift sign functional over {D >= 0, x >= phi_lower/2, |y| <= y_bar},
/// sampled with n values of y and n values of x per y.
double drift_sign_grid_max(const BarrierTable& table, const Model& model, std::size_t n);

/// Largest |phi_a - phi_b| over the nodes of the coarser table.
double barrier_self_convergence(const BarrierTable& coarse, const BarrierTable& fine);

/// Smallest phi(y) - R(y) over the solved parametrized curves started at
/// (y_start, x_minus/2) for each y_start, on [y_start, 0).
double parametrization_margin(const Model& model, const std::vector<double>& y_starts);

/// Runs every invariant suite on `model`.
std::vector<CheckResult> run_validation(const Model& model, const ValidationOptions& opt = {});

}  // namespace ovsafe
