#include "ovsafe/io.hpp"

#include <cstdio>
#include <fstream>
#include <limits>
#include <stdexcept>

#ifndef OVSAFE_VERSION
#define OVSAFE_VERSION "unknown"
#endif

namespace ovsafe::io {

namespace {

json optional_time(const std::optional<double>& t) { return t ? json(*t) : json(nullptr); }

double number(const json& j, const char* key) {
  if (!j.contains(key) || j.at(key).is_null()) {
    throw std::invalid_argument(std::string("model.") + key + " is required");
  }
  const json& v = j.at(key);
  if (!v.is_number()) throw std::invalid_argument(std::string("model.") + key + " must be a number");
  return v.get<double>();
}

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  return out;
}

void close_out(std::ofstream& out, const std::filesystem::path& path) {
  out.flush();
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

void header(std::ofstream& out, const json& config, const char* columns) {
  out << "# config=" << config.dump() << '\n' << columns << '\n';
}

}  // namespace

std::string version() { return OVSAFE_VERSION; }

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

json to_json(const ModelParams& p) {
  return {{"alpha", p.alpha}, {"beta", p.beta},     {"d", p.d},
          {"v_circ", p.v_circ}, {"x_circ", p.x_circ}, {"y_circ", p.y_circ}};
}

json to_json(const DerivedConstants& c) {
  return {{"x_inf", c.x_inf},         {"x_minus", c.x_minus},
          {"h_circ", c.h_circ},       {"x_bar", c.x_bar},
          {"y_bar", c.y_bar},         {"x_dagger", c.x_dagger},
          {"phi_lower", c.phi_lower}, {"varpi_dagger", c.varpi_dagger},
          {"delta_bar", c.delta_bar}};
}

ModelParams model_params_from_json(const json& j) {
  if (!j.is_object()) throw std::invalid_argument("model block must be an object");
  return {number(j, "alpha"),  number(j, "beta"),   number(j, "d"),
          number(j, "v_circ"), number(j, "x_circ"), number(j, "y_circ")};
}

json to_json(const StoppingRecord& r) {
  return {{"tau_eps_delta", optional_time(r.tau_eps_delta)},
          {"tau_H", optional_time(r.tau_H)},
          {"tau_D", optional_time(r.tau_D)},
          {"collision_proxy", optional_time(r.collision_proxy)},
          {"terminal_status", std::string(to_string(r.terminal_status))},
          {"terminal_state", {r.terminal_state.x, r.terminal_state.y}},
          {"terminal_time", r.terminal_time},
          {"fault", r.fault},
          {"seed", r.seed},
          {"trial_index", r.trial_index},
          {"refined_steps", r.refined_steps}};
}

json to_json(const SweepSpec& s) {
  return {{"epsilons", s.epsilons},   {"horizons", s.horizons},
          {"trials_per_cell", s.trials_per_cell}, {"base_seed", s.base_seed},
          {"dt", s.dt},               {"params", to_json(s.params)},
          {"z0", {s.z0.x, s.z0.y}}};
}

json to_json(const CellResult& c) {
  return {{"epsilon", c.epsilon},
          {"L", c.horizon},
          {"eps_sqrtL", c.eps_sqrtL},
          {"n_trials", c.n_trials},
          {"n_faults", c.n_faults},
          {"count_tauH", c.count_tauH},
          {"count_collision", c.count_collision},
          {"count_tauD", c.count_tauD},
          {"freq_tauH", c.freq_tauH},
          {"freq_collision", c.freq_collision},
          {"freq_tauD", c.freq_tauD},
          {"ci_halfwidth_95", c.ci_halfwidth_95},
          {"ci_collision_halfwidth_95", c.ci_collision_halfwidth_95},
          {"paper_bound", c.paper_bound},
          {"invalid", c.invalid}};
}

json barrier_constants_json(const BarrierTable& t) {
  return {{"phi_lower", t.phi_lower},
          {"deriv_bound", t.deriv_bound},
          {"analytic_deriv_bound", t.analytic_deriv_bound},
          {"max_abs_dphi", t.max_abs_d1},
          {"max_abs_d2phi", t.max_abs_d2},
          {"y_bar", t.y_bar},
          {"x_dagger", t.x_dagger},
          {"varpi_dagger", t.varpi_dagger},
          {"grid_points", t.y_grid.size()}};
}

json sweep_result_json(const SweepResult& result, const SweepSpec& spec, const json& config,
                       const json& run) {
  json cells = json::array();
  for (const CellResult& c : result.cells) cells.push_back(to_json(c));
  return {{"version", version()},
          {"config", config},
          {"spec", to_json(spec)},
          {"y_bar", result.y_bar},
          {"working_delta", result.working_delta},
          {"cells", cells},
          {"run", run}};
}

void write_trajectory_csv(const std::filesystem::path& path, const Trajectory& traj,
                          const json& config) {
  auto out = open_out(path);
  header(out, config, "t,x,y,H");
  for (std::size_t i = 0; i < traj.size(); ++i) {
    out << format_double(traj.times[i]) << ',' << format_double(traj.states[i].x) << ','
        << format_double(traj.states[i].y) << ',' << format_double(traj.h_values[i]) << '\n';
  }
  close_out(out, path);
}

void write_thin_csv(const std::filesystem::path& path, const ThinTrajectory& traj,
                    const json& config) {
  auto out = open_out(path);
  header(out, config, "t,x,y,H");
  for (std::size_t i = 0; i < traj.times.size(); ++i) {
    out << format_double(traj.times[i]) << ',' << format_double(traj.states[i].x) << ','
        << format_double(traj.states[i].y) << ',' << format_double(traj.h_values[i]) << '\n';
  }
  close_out(out, path);
}

void write_barrier_csv(const std::filesystem::path& path, const BarrierTable& table,
                       const json& config) {
  auto out = open_out(path);
  header(out, config, "y,phi,dphi,d2phi");
  for (std::size_t i = 0; i < table.y_grid.size(); ++i) {
    out << format_double(table.y_grid[i]) << ',' << format_double(table.phi_vals[i]) << ','
        << format_double(table.dphi_vals[i]) << ',' << format_double(table.d2phi_vals[i]) << '\n';
  }
  close_out(out, path);
}

void write_sweep_csv(const std::filesystem::path& path, const SweepResult& result,
                     const json& config) {
  auto out = open_out(path);
  header(out, config,
         "epsilon,L,eps_sqrtL,n_trials,freq_tauH,freq_collision,ci_halfwidth_95,paper_bound,"
         "n_faults,freq_tauD,ci_collision_halfwidth_95,invalid");
  for (const CellResult& c : result.cells) {
    out << format_double(c.epsilon) << ',' << format_double(c.horizon) << ','
        << format_double(c.eps_sqrtL) << ',' << c.n_trials << ',' << format_double(c.freq_tauH)
        << ',' << format_double(c.freq_collision) << ',' << format_double(c.ci_halfwidth_95) << ','
        << format_double(c.paper_bound) << ',' << c.n_faults << ',' << format_double(c.freq_tauD)
        << ',' << format_double(c.ci_collision_halfwidth_95) << ',' << (c.invalid ? 1 : 0)
        << '\n';
  }
  close_out(out, path);
}

void write_json(const std::filesystem::path& path, const json& j) {
  auto out = open_out(path);
  out << j.dump(2) << '\n';
  close_out(out, path);
}

}  // namespace ovsafe::io
