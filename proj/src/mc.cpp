#include "ovsafe/mc.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <stdexcept>
#include <string>
#include <thread>

#include "ovsafe/sde.hpp"

namespace ovsafe {

namespace {

void require(bool ok, const std::string& what) {
  if (!ok) throw std::invalid_argument("SweepSpec: " + what);
}

struct TrialOutcome {
  bool fault = false;
  bool tau_h = false;
  bool collision = false;
  bool tau_d = false;
};

// The path is simulated on [0, L] only, so every recorded event counts.
TrialOutcome classify(const StoppingRecord& rec) {
  return {rec.fault, rec.tau_H.has_value(), rec.collision_proxy.has_value(), rec.tau_D.has_value()};
}

}  // namespace

void validate(const SweepSpec& spec) {
  validate(spec.params);
  require(!spec.epsilons.empty(), "epsilons must be nonempty");
  require(!spec.horizons.empty(), "horizons must be nonempty");
  require(spec.trials_per_cell >= 100, "trials_per_cell >= 100 violated");
  require(spec.trials_per_cell < (std::size_t{1} << 32), "trials_per_cell < 2^32 violated");
  for (double e : spec.epsilons) require(std::isfinite(e) && e >= 0.0, "all epsilon >= 0 violated");
  for (double l : spec.horizons) require(std::isfinite(l) && l > 0.0, "all L > 0 violated");
  require(spec.dt > 0.0 && spec.dt <= 1e-3, "dt in (0, 1e-3] violated");
  require(spec.z0.x > 0.0 && std::isfinite(spec.z0.y), "z0 must lie in (0, inf) x R");
}

WilsonInterval wilson_interval(std::size_t successes, std::size_t n, double z) {
  if (n == 0) return {0.0, 1.0, 0.5};
  const double nn = static_cast<double>(n);
  const double p = static_cast<double>(successes) / nn;
  const double z2 = z * z;
  const double denom = 1.0 + z2 / nn;
  const double center = (p + z2 / (2.0 * nn)) / denom;
  const double half = z * std::sqrt(p * (1.0 - p) / nn + z2 / (4.0 * nn * nn)) / denom;
  return {std::max(0.0, center - half), std::min(1.0, center + half), half};
}

StreamId sweep_stream(std::uint64_t base_seed, std::size_t cell, std::size_t trial) {
  return {base_seed, (static_cast<std::uint64_t>(cell) << 32) | static_cast<std::uint64_t>(trial)};
}

SweepResult run_sweep(const SweepSpec& spec, const BarrierTable& table, unsigned threads) {
  validate(spec);
  const Model model(spec.params);

  struct Cell {
    double epsilon;
    double horizon;
  };
  std::vector<Cell> cells;
  for (double e : spec.epsilons) {
    for (double l : spec.horizons) cells.push_back({e, l});
  }
  const std::size_t n = spec.trials_per_cell;
  std::vector<TrialOutcome> outcomes(cells.size() * n);

  // Zero-noise trials do not read the stream, so one run stands for the cell.
  std::vector<std::size_t> work;
  work.reserve(outcomes.size());
  for (std::size_t c = 0; c < cells.size(); ++c) {
    const std::size_t count = cells[c].epsilon == 0.0 ? 1 : n;
    for (std::size_t i = 0; i < count; ++i) work.push_back(c * n + i);
  }

  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    constexpr std::size_t kChunk = 16;
    while (true) {
      const std::size_t begin = next.fetch_add(kChunk);
      if (begin >= work.size()) return;
      const std::size_t end = std::min(begin + kChunk, work.size());
      for (std::size_t w = begin; w < end; ++w) {
        const std::size_t slot = work[w];
        const std::size_t c = slot / n;
        const std::size_t i = slot % n;
        const StreamId id = sweep_stream(spec.base_seed, c, i);
        const StoppingRecord rec =
            effective_collision_run(spec.z0, cells[c].epsilon, cells[c].horizon, id.seed, model,
                                    table, id.trial, spec.dt);
        outcomes[slot] = classify(rec);
      }
    }
  };

  const unsigned workers = std::max(1u, threads);
  if (workers == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (unsigned t = 0; t < workers; ++t) pool.emplace_back(worker);
  }

  SweepResult result;
  result.y_bar = model.derived().y_bar;
  result.working_delta = working_delta(model);
  for (std::size_t c = 0; c < cells.size(); ++c) {
    if (cells[c].epsilon == 0.0) {
      std::fill(outcomes.begin() + static_cast<std::ptrdiff_t>(c * n + 1),
                outcomes.begin() + static_cast<std::ptrdiff_t>((c + 1) * n), outcomes[c * n]);
    }
    CellResult cell;
    cell.epsilon = cells[c].epsilon;
    cell.horizon = cells[c].horizon;
    cell.eps_sqrtL = cell.epsilon * std::sqrt(cell.horizon);
    for (std::size_t i = 0; i < n; ++i) {
      const TrialOutcome& o = outcomes[c * n + i];
      if (o.fault) {
        ++cell.n_faults;
        continue;
      }
      ++cell.n_trials;
      cell.count_tauH += o.tau_h;
      cell.count_collision += o.collision;
      cell.count_tauD += o.tau_d;
    }
    const double denom = cell.n_trials > 0 ? static_cast<double>(cell.n_trials) : 1.0;
    cell.freq_tauH = static_cast<double>(cell.count_tauH) / denom;
    cell.freq_collision = static_cast<double>(cell.count_collision) / denom;
    cell.freq_tauD = static_cast<double>(cell.count_tauD) / denom;
    cell.ci_halfwidth_95 = wilson_interval(cell.count_tauH, cell.n_trials).halfwidth;
    cell.ci_collision_halfwidth_95 = wilson_interval(cell.count_collision, cell.n_trials).halfwidth;
    cell.paper_bound =
        std::min(1.0, 4.0 * cell.epsilon * cell.epsilon * result.y_bar * result.y_bar * cell.horizon);
    cell.invalid = static_cast<double>(cell.n_faults) > 0.01 * static_cast<double>(n);
    result.cells.push_back(cell);
  }
  return result;
}

Summary summarize(const SweepResult& result) {
  if (result.cells.empty()) throw std::invalid_argument("summarize: empty sweep result");
  Summary out;
  for (const CellResult& c : result.cells) {
    SummaryRow row{c, c.freq_tauH > c.paper_bound + c.ci_halfwidth_95};
    out.failures += row.failure;
    out.invalid_cells += c.invalid;
    out.rows.push_back(row);
  }
  std::stable_sort(out.rows.begin(), out.rows.end(), [](const SummaryRow& a, const SummaryRow& b) {
    return a.cell.eps_sqrtL < b.cell.eps_sqrtL;
  });
  return out;
}

}  // namespace ovsafe
