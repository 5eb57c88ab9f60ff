#include "ovsafe/sde.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "ovsafe/rng.hpp"

namespace ovsafe {

namespace {

void require(bool ok, const std::string& what) {
  if (!ok) throw std::invalid_argument("SdePathConfig: " + what);
}

// Bits reserved for the bisection-tree node id inside one base step.
constexpr int kNodeBits = 25;

struct WatchResult {
  std::optional<double> exit_time;
  State exit_state;
};

class PathEngine {
 public:
  PathEngine(State z0, const SdePathConfig& cfg, const Model& model,
             std::optional<double> watch_delta)
      : cfg_(cfg),
        model_(model),
        stream_({cfg.seed, cfg.trial_index}),
        x_edge_(2.0 * cfg.delta),
        y_edge_(1.0 / (2.0 * cfg.delta)),
        h_level_(model.derived().h_circ + 1.0),
        danger_x_(0.5 * model.derived().phi_lower),
        z_(z0) {
    if (watch_delta) {
      watch_x_edge_ = 2.0 * *watch_delta;
      watch_y_edge_ = 1.0 / (2.0 * *watch_delta);
    }
    rec_.seed = cfg.seed;
    rec_.trial_index = cfg.trial_index;
  }

  PathResult run() {
    const auto steps = static_cast<std::uint64_t>(std::ceil(cfg_.horizon / cfg_.dt - 1e-9));
    const double sqrt_dt = std::sqrt(cfg_.dt);
    record_thin(0.0);
    check(0.0);
    std::uint64_t k = 0;
    for (; k < steps && !stopped_; ++k) {
      const double dw = sqrt_dt * stream_.normal(k);
      const double t1 = static_cast<double>(k + 1) * cfg_.dt;
      if (needs_refinement(cfg_.dt, 0)) ++rec_.refined_steps;
      step_end_ = t1;
      advance(cfg_.dt, dw, k, 1, 0);
      if (!stopped_ && cfg_.stride > 0 && (k + 1) % cfg_.stride == 0) record_thin(t1);
    }
    if (stopped_) {
      if (cfg_.stride > 0) record_thin(rec_.terminal_time);
    } else {
      rec_.terminal_time = static_cast<double>(steps) * cfg_.dt;
      rec_.terminal_state = z_;
      if (rec_.tau_D && (!rec_.tau_H || *rec_.tau_D <= *rec_.tau_H)) {
        rec_.terminal_status = StopStatus::DangerZone;
      } else if (rec_.tau_H) {
        rec_.terminal_status = StopStatus::EnergyEscape;
      } else {
        rec_.terminal_status = StopStatus::HorizonReached;
      }
    }
    return {std::move(thin_), rec_};
  }

  const WatchResult& watch() const { return watch_; }

 private:
  double stiffness(State z) const {
    const auto& p = model_.params();
    return p.alpha + p.beta / std::max(z.x * z.x, cfg_.delta * cfg_.delta);
  }

  bool needs_refinement(double h, int depth) const {
    return depth < cfg_.max_refinement_depth && stiffness(z_) * h > cfg_.stiffness_limit;
  }

  void advance(double h, double dw, std::uint64_t step, std::uint64_t node, int depth) {
    if (stopped_) return;
    if (needs_refinement(h, depth)) {
      const double eta = stream_.refinement_normal((step << kNodeBits) | node);
      const double dw_first = 0.5 * dw + 0.5 * std::sqrt(h) * eta;
      advance(0.5 * h, dw_first, step, 2 * node, depth + 1);
      advance(0.5 * h, dw - dw_first, step, 2 * node + 1, depth + 1);
      return;
    }
    const Tangent b = model_.drift_regularized(z_, cfg_.delta);
    z_.x += b.dx * h;
    z_.y += b.dy * h + cfg_.epsilon * dw;
    check(step_end_);
  }

  void check(double t) {
    if (!std::isfinite(z_.x) || !std::isfinite(z_.y)) {
      rec_.fault = true;
      stop(t, StopStatus::HorizonReached);
      return;
    }
    if (!rec_.tau_D && z_.x < danger_x_) rec_.tau_D = t;
    if (!rec_.tau_H) {
      const double h = 0.5 * z_.y * z_.y + model_.potential_unchecked(z_.x);
      if (h > h_level_) rec_.tau_H = t;
    }
    if (watch_x_edge_ && !watch_.exit_time &&
        (z_.x < *watch_x_edge_ || std::abs(z_.y) > *watch_y_edge_)) {
      watch_.exit_time = t;
      watch_.exit_state = z_;
    }
    const bool x_exit = z_.x < x_edge_;
    if (x_exit || std::abs(z_.y) > y_edge_) {
      rec_.tau_eps_delta = t;
      if (x_exit) rec_.collision_proxy = t;
      stop(t, x_exit ? StopStatus::CollisionProxy : StopStatus::ExitedRegularizationSet);
    }
  }

  void stop(double t, StopStatus status) {
    stopped_ = true;
    rec_.terminal_time = t;
    rec_.terminal_state = z_;
    rec_.terminal_status = status;
  }

  void record_thin(double t) {
    if (cfg_.stride == 0) return;
    thin_.times.push_back(t);
    thin_.states.push_back(z_);
    thin_.h_values.push_back(0.5 * z_.y * z_.y + model_.potential_unchecked(z_.x));
  }

  const SdePathConfig& cfg_;
  const Model& model_;
  NormalStream stream_;
  double x_edge_;
  double y_edge_;
  double h_level_;
  double danger_x_;
  std::optional<double> watch_x_edge_;
  std::optional<double> watch_y_edge_;
  State z_;
  // Events inside a bisected step are stamped with the end of the base step.
  double step_end_ = 0.0;
  bool stopped_ = false;
  StoppingRecord rec_;
  ThinTrajectory thin_;
  WatchResult watch_;
};

}  // namespace

std::string_view to_string(StopStatus s) {
  switch (s) {
    case StopStatus::HorizonReached: return "HorizonReached";
    case StopStatus::ExitedRegularizationSet: return "ExitedRegularizationSet";
    case StopStatus::EnergyEscape: return "EnergyEscape";
    case StopStatus::DangerZone: return "DangerZone";
    case StopStatus::CollisionProxy: return "CollisionProxy";
  }
  return "Unknown";
}

void validate(const SdePathConfig& cfg) {
  require(std::isfinite(cfg.epsilon) && cfg.epsilon >= 0.0, "epsilon >= 0 violated");
  require(std::isfinite(cfg.delta) && cfg.delta > 0.0, "delta > 0 violated");
  require(std::isfinite(cfg.dt) && cfg.dt > 0.0, "dt > 0 violated");
  require(cfg.dt <= 1e-3, "dt <= 1e-3 violated (dt = " + std::to_string(cfg.dt) + ")");
  require(std::isfinite(cfg.horizon) && cfg.horizon > 0.0, "horizon > 0 violated");
  require(cfg.stiffness_limit > 0.0 && cfg.stiffness_limit <= 1.0,
          "stiffness_limit in (0, 1] violated");
  require(cfg.max_refinement_depth >= 0 && cfg.max_refinement_depth < kNodeBits,
          "max_refinement_depth in [0, 24] violated");
  require(cfg.horizon / cfg.dt < 1e12, "horizon / dt too large");
}

PathResult simulate_path(State z0, const SdePathConfig& cfg, const Model& model) {
  validate(cfg);
  if (!(z0.x > 0.0) || !std::isfinite(z0.y)) {
    throw std::invalid_argument("simulate_path: z0 must lie in (0, inf) x R");
  }
  return PathEngine(z0, cfg, model, std::nullopt).run();
}

ConsistencyReport check_consistency(State z0, double epsilon, double delta_minus,
                                    double delta_plus, std::uint64_t shared_seed,
                                    const Model& model, double dt, double horizon) {
  if (!(delta_minus > 0.0 && delta_minus < delta_plus)) {
    throw std::invalid_argument("check_consistency: requires 0 < delta_minus < delta_plus");
  }
  SdePathConfig cfg;
  cfg.epsilon = epsilon;
  cfg.dt = dt;
  cfg.horizon = horizon;
  cfg.seed = shared_seed;
  cfg.stride = 1;

  cfg.delta = delta_plus;
  const PathResult plus = simulate_path(z0, cfg, model);

  cfg.delta = delta_minus;
  validate(cfg);
  PathEngine engine(z0, cfg, model, delta_plus);
  const PathResult minus = engine.run();
  const WatchResult& watch = engine.watch();

  ConsistencyReport out;
  out.tau_plus = plus.record.tau_eps_delta;
  out.tau_minus = minus.record.tau_eps_delta;
  out.tau_minus_leaves_plus_set = watch.exit_time;

  const auto& tp = plus.path.times;
  const auto& tm = minus.path.times;
  const std::size_t n = std::min(tp.size(), tm.size());
  for (std::size_t i = 0; i < n; ++i) {
    if (tp[i] != tm[i]) break;
    if (out.tau_plus && tp[i] >= *out.tau_plus) break;
    const State a = plus.path.states[i];
    const State b = minus.path.states[i];
    out.max_divergence = std::max(out.max_divergence, std::hypot(a.x - b.x, a.y - b.y));
    ++out.compared_points;
  }
  // Exit states are compared directly: the exit may fall inside a bisected step.
  if (out.tau_plus && watch.exit_time && *watch.exit_time == *out.tau_plus) {
    const State a = plus.record.terminal_state;
    const State b = watch.exit_state;
    out.max_divergence = std::max(out.max_divergence, std::hypot(a.x - b.x, a.y - b.y));
    ++out.compared_points;
  }

  if (out.tau_plus && out.tau_minus) out.ordering_holds = *out.tau_plus < *out.tau_minus;
  out.exit_time_matches = out.tau_plus == out.tau_minus_leaves_plus_set;
  return out;
}

double working_delta(const Model& model) {
  return std::min(0.25 * model.derived().delta_bar, 1e-3);
}

StoppingRecord effective_collision_run(State z0, double epsilon, double horizon,
                                       std::uint64_t seed, const Model& model,
                                       const BarrierTable& table, std::uint64_t trial_index,
                                       double dt) {
  const auto& dc = model.derived();
  if (table.phi_lower != dc.phi_lower || table.y_bar != dc.y_bar ||
      table.varpi_dagger != dc.varpi_dagger) {
    throw std::invalid_argument("effective_collision_run: barrier table built for another model");
  }
  const double delta = working_delta(model);
  if (!(delta < dc.delta_bar)) {
    throw std::logic_error("effective_collision_run: working delta must be below delta_bar");
  }
  SdePathConfig cfg;
  cfg.epsilon = epsilon;
  cfg.delta = delta;
  cfg.dt = dt;
  cfg.horizon = horizon;
  cfg.seed = seed;
  cfg.trial_index = trial_index;
  return simulate_path(z0, cfg, model).record;
}

}  // namespace ovsafe
