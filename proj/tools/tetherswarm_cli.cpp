// Command-line front end.
//
//   tetherswarm run --config <file> --trajectory <file> --out <dir> [--seed N] [--duration S]
//   tetherswarm validate --config <file> [--trajectory <file>]
//
// Exit codes: 0 success, 1 configuration or input error, 2 simulation fault.

#include "tetherswarm/tetherswarm.hpp"

#include <CLI11.hpp>

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

namespace fs = std::filesystem;
using namespace tetherswarm;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 1;
constexpr int kExitFault = 2;

// Trajectory from the command line wins; otherwise the config's own entry,
// resolved relative to the config file.
std::string resolve_trajectory(const std::string& cli_path, const SimConfig& config,
                               const std::string& config_path) {
  if (!cli_path.empty()) return cli_path;
  if (config.trajectory.empty()) return {};
  const fs::path p(config.trajectory);
  if (p.is_absolute()) return p.string();
  return (fs::path(config_path).parent_path() / p).lexically_normal().string();
}

HandTrajectory load_trajectory_or_throw(const std::string& path) {
  if (path.empty())
    throw ConfigError("trajectory", "no trajectory given (use --trajectory or the config field)");
  try {
    return load_hand_trajectory(path);
  } catch (const ParseError& e) {
    throw ConfigError("trajectory", path + ": " + e.what());
  }
}

void print_summary(std::ostream& os, const SimConfig& c) {
  const QuadrotorModel& m = c.drones.front().model;
  os << "duration          " << c.duration << " s\n"
     << "physics_dt        " << c.physics_dt << " s (" << c.physics_ticks() << " ticks)\n"
     << "control_rate      " << c.control_rate << " Hz (every " << c.control_divider()
     << " physics ticks)\n"
     << "seed              " << c.seed << "\n"
     << "drones            " << c.drones.size() << " (" << policy_name(c.assignment.policy)
     << ")\n"
     << "mass              " << m.mass << " kg\n"
     << "max thrust        " << m.max_thrust() << " N\n"
     << "hover omega       " << m.hover_omega(c.gravity) << " rad/s\n"
     << "tethers           " << c.tethers.size() << "\n"
     << "surfaces          " << c.surfaces.size() << "\n"
     << "max_force         " << c.activation.max_force << " N\n"
     << "mocap             " << c.mocap.rate << " Hz, latency " << c.mocap.latency
     << " s, noise " << c.mocap.position_noise_std << " m / " << c.mocap.attitude_noise_std
     << " rad\n"
     << "config_hash       " << config_hash(c) << "\n";
}

void write_json(const fs::path& path, const Json& j) {
  std::ofstream out(path);
  if (!out) throw ConfigError("out", "cannot write '" + path.string() + "'");
  out << j.dump(2) << '\n';
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Tethered micro-quadrotor haptics simulator"};
  app.require_subcommand(1);

  std::string config_path;
  std::string trajectory_path;
  std::string out_dir;
  std::optional<std::uint64_t> seed;
  std::optional<double> duration;

  auto* run_cmd = app.add_subcommand("run", "Run a scenario and write log.csv, metrics.json, manifest.json");
  run_cmd->add_option("--config", config_path, "Scenario config (JSON)")->required();
  run_cmd->add_option("--trajectory", trajectory_path, "Hand trajectory (CSV)");
  run_cmd->add_option("--out", out_dir, "Output directory")->required();
  run_cmd->add_option("--seed", seed, "Override the config seed");
  run_cmd->add_option("--duration", duration, "Override the config duration, s");

  auto* validate_cmd = app.add_subcommand("validate", "Parse and check a config without running");
  validate_cmd->add_option("--config", config_path, "Scenario config (JSON)")->required();
  validate_cmd->add_option("--trajectory", trajectory_path, "Hand trajectory (CSV)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kExitOk : kExitConfig;
  }

  try {
    SimConfig config = load_config(config_path);
    if (seed) config.seed = *seed;
    if (duration) config.duration = *duration;
    config.validate();
    const std::string traj_path = resolve_trajectory(trajectory_path, config, config_path);

    if (validate_cmd->parsed()) {
      if (!traj_path.empty()) {
        const HandTrajectory hand = load_trajectory_or_throw(traj_path);
        config = resolve_initial_states(config, hand);
        std::cout << "trajectory        " << hand.size() << " samples, " << hand.times().front()
                  << " .. " << hand.times().back() << " s\n";
      }
      print_summary(std::cout, config);
      std::cout << "ok\n";
      return kExitOk;
    }

    const HandTrajectory hand = load_trajectory_or_throw(traj_path);
    std::error_code ec;
    fs::create_directories(out_dir, ec);
    if (ec || !fs::is_directory(out_dir))
      throw ConfigError("out", "cannot create output directory '" + out_dir + "'");

    RunResult result;
    try {
      result = run(config, hand);
    } catch (const SimulationFault& e) {
      std::cerr << "simulation fault: " << e.what() << '\n';
      return kExitFault;
    }

    {
      std::ofstream log_out(fs::path(out_dir) / "log.csv", std::ios::binary);
      if (!log_out) throw ConfigError("out", "cannot write log.csv");
      write_log_csv(log_out, result.log);
    }
    write_json(fs::path(out_dir) / "metrics.json", metrics_to_json(result.metrics));
    write_json(fs::path(out_dir) / "manifest.json",
               manifest_to_json(result.resolved, result.log.meta, config_path, traj_path));
    std::cout << "ticks " << result.log.ticks.size() << ", contacts "
              << result.metrics.contacts.size() << ", steady-state error "
              << result.metrics.steady_state_error_pct << " %, real-time factor "
              << result.metrics.real_time_factor << '\n';
    return kExitOk;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const ParseError& e) {
    std::cerr << "parse error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitConfig;
  }
}
