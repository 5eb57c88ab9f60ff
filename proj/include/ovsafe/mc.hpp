#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "ovsafe/barrier.hpp"
#include "ovsafe/model.hpp"
#include "ovsafe/rng.hpp"

namespace ovsafe {

struct SweepSpec {
  std::vector<double> epsilons;
  std::vector<double> horizons;
  std::size_t trials_per_cell = 10000;
  std::uint64_t base_seed = 0;
  double dt = 1e-3;
  ModelParams params;
  State z0;
};

/// Throws std::invalid_argument naming the violated invariant.
void validate(const SweepSpec& spec);

/// Aggregated outcome of one (epsilon, L) cell. Frequencies exclude faulted trials.
struct CellResult {
  double epsilon = 0.0;
  double horizon = 0.0;
  double eps_sqrtL = 0.0;
  std::size_t n_trials = 0;
  std::size_t n_faults = 0;
  std::size_t count_tauH = 0;
  std::size_t count_collision = 0;
  std::size_t count_tauD = 0;
  double freq_tauH = 0.0;
  double freq_collision = 0.0;
  double freq_tauD = 0.0;
  /// Wilson 95% half-width for freq_tauH.
  double ci_halfwidth_95 = 0.0;
  /// Wilson 95% half-width for freq_collision.
  double ci_collision_halfwidth_95 = 0.0;
  /// min(1, 4 eps^2 y_bar^2 L).
  double paper_bound = 0.0;
  /// More than 1% of the trials faulted.
  bool invalid = false;

  friend bool operator==(const CellResult&, const CellResult&) = default;
};

struct SweepResult {
  std::vector<CellResult> cells;  ///< epsilon-major order
  double y_bar = 0.0;
  double working_delta = 0.0;
};

struct WilsonInterval {
  double lower = 0.0;
  double upper = 0.0;
  double halfwidth = 0.0;
};

/// Wilson score interval; z = 1.96 gives 95%.
WilsonInterval wilson_interval(std::size_t successes, std::size_t n,
                               double z = 1.959963984540054);

/// Stream of trial `trial` in cell `cell`: (base_seed, cell << 32 | trial).
StreamId sweep_stream(std::uint64_t base_seed, std::size_t cell, std::size_t trial);

/// Runs every cell with `threads` workers. The result does not depend on the
/// number of workers. Throws std::invalid_argument on configuration errors.
SweepResult run_sweep(const SweepSpec& spec, const BarrierTable& table, unsigned threads = 1);

struct SummaryRow {
  CellResult cell;
  /// freq_tauH exceeds paper_bound by more than the CI half-width.
  bool failure = false;
};

struct Summary {
  std::vector<SummaryRow> rows;  ///< ascending eps_sqrtL
  std::size_t failures = 0;
  std::size_t invalid_cells = 0;
};

/// Throws std::invalid_argument on an empty result.
Summary summarize(const SweepResult& result);

}  // namespace ovsafe
