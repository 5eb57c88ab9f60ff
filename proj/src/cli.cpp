#include "ovsafe/cli.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <thread>

#include "ovsafe/barrier.hpp"
#include "ovsafe/io.hpp"
#include "ovsafe/mc.hpp"
#include "ovsafe/model.hpp"
#include "ovsafe/ode.hpp"
#include "ovsafe/sde.hpp"
#include "ovsafe/validation.hpp"

namespace ovsafe {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

void overlay(json& base, const json& file, const std::string& where) {
  if (!file.is_object()) throw std::invalid_argument(where + " must be a JSON object");
  for (auto it = file.begin(); it != file.end(); ++it) {
    const std::string key = where.empty() ? it.key() : where + "." + it.key();
    if (!base.contains(it.key())) throw std::invalid_argument("unknown config key: " + key);
    json& slot = base[it.key()];
    if (slot.is_object()) {
      overlay(slot, it.value(), key);
    } else if (slot.is_number() && !it.value().is_number()) {
      throw std::invalid_argument(key + " must be a number");
    } else if (slot.is_array() && !it.value().is_array()) {
      throw std::invalid_argument(key + " must be an array");
    } else {
      slot = it.value();
    }
  }
}

State state_from(const json& j, State fallback, const char* what) {
  if (j.is_null()) return fallback;
  if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number()) {
    throw std::invalid_argument(std::string(what) + " must be [x, y]");
  }
  return {j[0].get<double>(), j[1].get<double>()};
}

std::vector<double> numbers(const json& j, const char* what) {
  std::vector<double> out;
  for (const json& v : j) {
    if (!v.is_number()) throw std::invalid_argument(std::string(what) + " must hold numbers");
    out.push_back(v.get<double>());
  }
  return out;
}

std::size_t count(const json& j, const char* what) {
  if (!j.is_number_integer() || j.get<long long>() < 0) {
    throw std::invalid_argument(std::string(what) + " must be a nonnegative integer");
  }
  return j.get<std::size_t>();
}

json load_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot read config file: " + path);
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw UsageError("malformed JSON in " + path + ": " + e.what());
  }
}

struct Context {
  json config;
  Model model;
  fs::path out_dir;
  std::ostream& out;
  std::ostream& err;
};

int cmd_deterministic(const Context& ctx) {
  const json& c = ctx.config["deterministic"];
  const State z0 = state_from(c["z0"], ctx.model.initial_state(), "deterministic.z0");
  StepControl control;
  control.rtol = c["rtol"].get<double>();
  control.atol = c["atol"].get<double>();
  const Trajectory traj = integrate_deterministic(z0, ctx.model, c["horizon"].get<double>(), control);
  io::write_trajectory_csv(ctx.out_dir / "deterministic.csv", traj, ctx.config);
  ctx.out << "status " << to_string(traj.status) << '\n'
          << "final_state " << io::format_double(traj.back().x) << ' '
          << io::format_double(traj.back().y) << '\n'
          << "final_time " << io::format_double(traj.times.back()) << '\n';
  if (!traj.fault.empty()) ctx.err << "fault: " << traj.fault << '\n';
  return traj.status == TrajectoryStatus::ConvergedToEquilibrium ? kExitOk : kExitCheckFailed;
}

int cmd_sde(const Context& ctx) {
  const json& c = ctx.config["sde"];
  SdePathConfig cfg;
  cfg.epsilon = c["epsilon"].get<double>();
  cfg.delta = c["delta"].is_null() ? working_delta(ctx.model) : c["delta"].get<double>();
  cfg.dt = c["dt"].get<double>();
  cfg.horizon = c["horizon"].get<double>();
  cfg.seed = ctx.config["seed"].get<std::uint64_t>();
  cfg.trial_index = c["trial_index"].get<std::uint64_t>();
  cfg.stride = count(c["stride"], "sde.stride");
  const State z0 = state_from(c["z0"], ctx.model.initial_state(), "sde.z0");
  const PathResult res = simulate_path(z0, cfg, ctx.model);
  io::write_thin_csv(ctx.out_dir / "sde_path.csv", res.path, ctx.config);
  io::write_json(ctx.out_dir / "sde_record.json",
                 {{"config", ctx.config}, {"version", io::version()},
                  {"record", io::to_json(res.record)}});
  ctx.out << "status " << to_string(res.record.terminal_status) << '\n'
          << "terminal_time " << io::format_double(res.record.terminal_time) << '\n';
  return res.record.fault ? kExitCheckFailed : kExitOk;
}

int cmd_barrier(const Context& ctx) {
  const std::size_t n = count(ctx.config["barrier"]["grid_resolution"], "barrier.grid_resolution");
  const BarrierTable table = build_barrier(ctx.model, n);
  io::write_barrier_csv(ctx.out_dir / "barrier.csv", table, ctx.config);
  io::write_json(ctx.out_dir / "barrier.json",
                 {{"config", ctx.config},
                  {"version", io::version()},
                  {"derived", io::to_json(ctx.model.derived())},
                  {"certificate", io::barrier_constants_json(table)}});
  ctx.out << "phi_lower " << io::format_double(table.phi_lower) << '\n'
          << "deriv_bound " << io::format_double(table.deriv_bound) << '\n';
  return kExitOk;
}

int cmd_sweep(const Context& ctx, unsigned threads) {
  const json& c = ctx.config["sweep"];
  SweepSpec spec;
  spec.epsilons = numbers(c["epsilons"], "sweep.epsilons");
  spec.horizons = numbers(c["horizons"], "sweep.horizons");
  spec.trials_per_cell = count(c["trials_per_cell"], "sweep.trials_per_cell");
  spec.base_seed = ctx.config["seed"].get<std::uint64_t>();
  spec.dt = c["dt"].get<double>();
  spec.params = ctx.model.params();
  spec.z0 = state_from(c["z0"], ctx.model.initial_state(), "sweep.z0");
  validate(spec);

  const BarrierTable table = build_barrier(ctx.model);
  const auto start = std::chrono::steady_clock::now();
  const SweepResult result = run_sweep(spec, table, threads);
  const double wall =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  io::write_sweep_csv(ctx.out_dir / "sweep.csv", result, ctx.config);
  io::write_json(ctx.out_dir / "sweep.json",
                 io::sweep_result_json(result, spec, ctx.config,
                                       {{"wall_seconds", wall}, {"threads", threads}}));

  const Summary summary = summarize(result);
  ctx.out << "eps_sqrtL epsilon L freq_tauH ci95 bound freq_collision n_faults flag\n";
  for (const SummaryRow& r : summary.rows) {
    const CellResult& cell = r.cell;
    const char* flag = r.failure ? "FAILURE" : (cell.invalid ? "INVALID" : "ok");
    ctx.out << io::format_double(cell.eps_sqrtL) << ' ' << cell.epsilon << ' ' << cell.horizon
            << ' ' << cell.freq_tauH << ' ' << cell.ci_halfwidth_95 << ' ' << cell.paper_bound
            << ' ' << cell.freq_collision << ' ' << cell.n_faults << ' ' << flag << '\n';
    if (cell.eps_sqrtL <= 0.02 && cell.count_collision > 0) {
      ctx.err << "WARN: " << cell.count_collision << " collision-proxy events at eps="
              << cell.epsilon << " L=" << cell.horizon << '\n';
    }
  }
  ctx.out << "failures " << summary.failures << " invalid_cells " << summary.invalid_cells << '\n';
  return summary.failures == 0 && summary.invalid_cells == 0 ? kExitOk : kExitCheckFailed;
}

int cmd_validate(const Context& ctx) {
  const json& c = ctx.config["validate"];
  ValidationOptions opt;
  opt.drift_sign_grid = count(c["drift_sign_grid"], "validate.drift_sign_grid");
  opt.barrier_resolution = count(c["barrier_resolution"], "validate.barrier_resolution");
  opt.consistency_pairs = count(c["consistency_pairs"], "validate.consistency_pairs");
  opt.deterministic_horizon = c["deterministic_horizon"].get<double>();
  opt.seed = ctx.config["seed"].get<std::uint64_t>();
  const std::vector<CheckResult> checks = run_validation(ctx.model, opt);

  json report = json::array();
  bool all = true;
  for (const CheckResult& r : checks) {
    report.push_back({{"name", r.name}, {"measured", r.measured}, {"bound", r.bound}, {"pass", r.pass}});
    ctx.out << (r.pass ? "PASS " : "FAIL ") << r.name << " measured=" << r.measured
            << " bound=" << r.bound << '\n';
    all = all && r.pass;
  }
  io::write_json(ctx.out_dir / "validation.json",
                 {{"config", ctx.config}, {"version", io::version()}, {"checks", report},
                  {"pass", all}});
  return all ? kExitOk : kExitCheckFailed;
}

}  // namespace

json default_config() {
  return {
      {"model",
       {{"alpha", nullptr},
        {"beta", nullptr},
        {"d", nullptr},
        {"v_circ", nullptr},
        {"x_circ", nullptr},
        {"y_circ", nullptr}}},
      {"seed", 0u},
      {"threads", 0},
      {"deterministic", {{"horizon", 200.0}, {"z0", nullptr}, {"rtol", 1e-9}, {"atol", 1e-11}}},
      {"sde",
       {{"epsilon", 0.05},
        {"delta", nullptr},
        {"dt", 1e-3},
        {"horizon", 10.0},
        {"stride", 10},
        {"trial_index", 0},
        {"z0", nullptr}}},
      {"sweep",
       {{"epsilons", {0.0, 0.01, 0.02, 0.05, 0.1, 0.2}},
        {"horizons", {5.0, 10.0, 20.0, 40.0}},
        {"trials_per_cell", 10000},
        {"dt", 1e-3},
        {"z0", nullptr}}},
      {"barrier", {{"grid_resolution", 10000}}},
      {"validate",
       {{"drift_sign_grid", 2000},
        {"barrier_resolution", 10000},
        {"consistency_pairs", 10},
        {"deterministic_horizon", 200.0}}},
  };
}

json resolve_config(const json& file) {
  json config = default_config();
  overlay(config, file, "");
  return config;
}

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Stochastic optimal-velocity car-following model: simulation and checks", "ovsafe"};
  app.require_subcommand(1);
  app.fallthrough();

  std::string config_path;
  std::string out_dir = ".";
  std::optional<std::uint64_t> seed;
  std::optional<unsigned> threads;
  app.add_option("--config", config_path, "JSON config file");
  app.add_option("--out", out_dir, "Existing output directory");
  app.add_option("--seed", seed, "Base seed (overrides the config)");
  app.add_option("--threads", threads, "Sweep workers; 0 uses all cores");

  auto* det = app.add_subcommand("deterministic", "Integrate the deterministic ODE");
  auto* sde = app.add_subcommand("sde", "Simulate one regularized SDE path");
  auto* sweep = app.add_subcommand("sweep", "Monte Carlo sweep over (epsilon, L)");
  auto* barrier = app.add_subcommand("barrier", "Tabulate the barrier and its certificate");
  auto* val = app.add_subcommand("validate", "Run the invariant suites");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }

  try {
    json file = config_path.empty() ? json::object() : load_file(config_path);
    json config = resolve_config(file);
    if (seed) config["seed"] = *seed;
    if (threads) config["threads"] = *threads;
    if (!config["seed"].is_number_unsigned()) {
      throw std::invalid_argument("seed must be a nonnegative integer");
    }
    const ModelParams params = io::model_params_from_json(config["model"]);
    validate(params);

    const fs::path dir(out_dir);
    if (!fs::is_directory(dir)) throw UsageError("output directory does not exist: " + out_dir);

    Context ctx{config, Model(params), dir, out, err};
    if (det->parsed()) return cmd_deterministic(ctx);
    if (sde->parsed()) return cmd_sde(ctx);
    if (barrier->parsed()) return cmd_barrier(ctx);
    if (val->parsed()) return cmd_validate(ctx);
    if (sweep->parsed()) {
      unsigned n = static_cast<unsigned>(count(config["threads"], "threads"));
      if (n == 0) n = std::max(1u, std::thread::hardware_concurrency());
      return cmd_sweep(ctx, n);
    }
    return kExitUsage;
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::invalid_argument& e) {
    err << "config error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const json::exception& e) {
    err << "config error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }
}

}  // namespace ovsafe
