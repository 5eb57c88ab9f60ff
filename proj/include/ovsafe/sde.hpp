#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include "ovsafe/barrier.hpp"
#include "ovsafe/model.hpp"

namespace ovsafe {

/// One Euler-Maruyama path of the regularized SDE.
///
/// Steps whose local stiffness (alpha + beta / max(x^2, delta^2)) * h exceeds
/// `stiffness_limit` are bisected, with the midpoint Brownian increment drawn
/// from the bridge of the enclosing step; the coarse Brownian path is
/// therefore the same at every refinement level.
struct SdePathConfig {
  double epsilon = 0.0;
  double delta = 1e-3;
  double dt = 1e-3;
  double horizon = 10.0;
  std::uint64_t seed = 0;
  std::uint64_t trial_index = 0;
  /// Record every `stride`-th base step into the thin trajectory; 0 records nothing.
  std::size_t stride = 0;
  double stiffness_limit = 0.1;
  int max_refinement_depth = 24;
};

/// Throws std::invalid_argument naming the violated invariant.
void validate(const SdePathConfig& cfg);

enum class StopStatus {
  HorizonReached,
  ExitedRegularizationSet,
  EnergyEscape,
  DangerZone,
  CollisionProxy,
};

std::string_view to_string(StopStatus s);

/// First-crossing times of one path; empty optionals mean "not before the end
/// of the path".
///
/// The path stops at the first exit from a_delta = [2 delta, inf) x
/// [-1/(2 delta), 1/(2 delta)] or at the horizon. tau_H and tau_D are recorded
/// without stopping. An exit through the x-edge is also the collision proxy.
struct StoppingRecord {
  std::optional<double> tau_eps_delta;
  std::optional<double> tau_H;
  std::optional<double> tau_D;
  std::optional<double> collision_proxy;
  State terminal_state;
  double terminal_time = 0.0;
  StopStatus terminal_status = StopStatus::HorizonReached;
  /// Nonfinite state; the trial was aborted and must not be counted.
  bool fault = false;
  std::uint64_t seed = 0;
  std::uint64_t trial_index = 0;
  /// Base steps that needed bisection.
  std::uint64_t refined_steps = 0;

  friend bool operator==(const StoppingRecord&, const StoppingRecord&) = default;
};

struct ThinTrajectory {
  std::vector<double> times;
  std::vector<State> states;
  std::vector<double> h_values;
};

struct PathResult {
  ThinTrajectory path;
  StoppingRecord record;
};

/// Simulate from z0 with the Brownian stream (cfg.seed, cfg.trial_index).
/// tau_D uses the certified floor: first x < phi_lower / 2.
PathResult simulate_path(State z0, const SdePathConfig& cfg, const Model& model);

/// Path divergence between two regularization scales driven by the same noise.
struct ConsistencyReport {
  /// sup over recorded times t <= tau_plus of ||Z^{delta+} - Z^{delta-}||.
  double max_divergence = 0.0;
  std::size_t compared_points = 0;
  std::optional<double> tau_plus;
  std::optional<double> tau_minus;
  /// First time the delta- path leaves a_{delta+}.
  std::optional<double> tau_minus_leaves_plus_set;
  /// tau_plus < tau_minus whenever both are observed.
  bool ordering_holds = true;
  /// tau_plus equals the first exit of the delta- path from a_{delta+}.
  bool exit_time_matches = true;
};

ConsistencyReport check_consistency(State z0, double epsilon, double delta_minus,
                                    double delta_plus, std::uint64_t shared_seed,
                                    const Model& model, double dt = 1e-3,
                                    double horizon = 10.0);

/// Working regularization scale for collision runs: min(delta_bar / 4, 1e-3).
double working_delta(const Model& model);

/// simulate_path at the working delta, so that before energy escape an exit
/// of a_delta can only happen through the x-edge. Throws std::invalid_argument
/// if the table does not belong to the model.
StoppingRecord effective_collision_run(State z0, double epsilon, double horizon,
                                       std::uint64_t seed, const Model& model,
                                       const BarrierTable& table, std::uint64_t trial_index = 0,
                                       double dt = 1e-3);

}  // namespace ovsafe
