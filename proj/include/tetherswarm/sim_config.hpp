#pragma once

#include "tetherswarm/common.hpp"
#include "tetherswarm/control.hpp"
#include "tetherswarm/haptic_scene.hpp"
#include "tetherswarm/sensing.hpp"
#include "tetherswarm/tether.hpp"
#include "tetherswarm/vehicle_dynamics.hpp"

#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace tetherswarm {

struct DroneConfig {
  QuadrotorModel model;
  // Unset: start at rest at the leash anchor plus the follow offset.
  std::optional<RigidBodyState> initial;
};

struct SimConfig {
  double duration = 5.0;       // s
  double physics_dt = 0.001;   // s
  double control_rate = 100.0; // Hz
  double gravity = 9.81;       // m/s^2
  std::uint64_t seed = 1;

  std::vector<DroneConfig> drones;
  PolicySpec assignment;
  std::vector<TetherParams> tethers;  // one per binding, binding order
  std::vector<VirtualSurface> surfaces;
  ActivationConfig activation;
  double prediction_horizon = 1.0;  // s
  ControllerGains gains;
  MocapConfig mocap;
  // Feed ground-truth poses straight into the estimator, bypassing the mocap
  // noise and delay line.
  bool direct_feedback = false;
  double tension_noise_std = 0.0;  // N, on the tension fed back to the controller

  std::string trajectory;  // CSV path; may be overridden on the command line

  std::size_t physics_ticks() const {
    return static_cast<std::size_t>(std::llround(duration / physics_dt));
  }

  // Physics ticks per control tick.
  std::size_t control_divider() const {
    return static_cast<std::size_t>(std::llround(1.0 / (control_rate * physics_dt)));
  }

  void validate() const {
    if (!(duration >= 0.0) || !std::isfinite(duration))
      throw ConfigError("duration", "must be >= 0");
    if (!(physics_dt > 0.0) || !std::isfinite(physics_dt))
      throw ConfigError("physics_dt", "must be > 0");
    if (!(control_rate > 0.0) || !std::isfinite(control_rate))
      throw ConfigError("control_rate", "must be > 0");
    const double ratio = 1.0 / (control_rate * physics_dt);
    if (ratio < 1.0 - 1e-9 || std::abs(ratio - std::round(ratio)) > 1e-6)
      throw ConfigError("physics_dt", "must divide the control period exactly");
    if (!(gravity >= 0.0) || !std::isfinite(gravity)) throw ConfigError("gravity", "must be >= 0");

    const std::size_t need = drones_required(assignment.policy);
    if (drones.size() != need)
      throw ConfigError("drones", std::string(policy_name(assignment.policy)) + " uses " +
                                      std::to_string(need) + " drones, config has " +
                                      std::to_string(drones.size()));
    for (std::size_t i = 0; i < drones.size(); ++i) {
      const std::string p = "drones[" + std::to_string(i) + "]";
      drones[i].model.validate(p + ".model");
      if (drones[i].initial) {
        const RigidBodyState& s = *drones[i].initial;
        if (!s.finite()) throw ConfigError(p + ".initial", "must be finite");
        if (std::abs(s.orientation.norm() - 1.0) > 1e-6)
          throw ConfigError(p + ".initial.orientation", "must be a unit quaternion");
      }
    }

    if (tethers.empty()) throw ConfigError("tethers", "at least one tether is required");
    if (tethers.size() > need)
      throw ConfigError("tethers", "more tethers than assignment bindings");
    for (std::size_t i = 0; i < tethers.size(); ++i)
      tethers[i].validate("tethers[" + std::to_string(i) + "]");
    if (assignment.policy == AssignmentPolicy::DualTether &&
        (tethers.size() < 2 || tethers[0] == tethers[1]))
      throw ConfigError("tethers", "dual_tether needs two leashes with different properties");

    for (std::size_t i = 0; i < surfaces.size(); ++i)
      surfaces[i].validate("scene.surfaces[" + std::to_string(i) + "]");
    activation.validate("scene");
    if (!(prediction_horizon > 0.0))
      throw ConfigError("scene.prediction_horizon", "must be > 0");
    gains.validate("gains");
    mocap.validate("mocap");
    if (std::abs(mocap.rate - control_rate) > 1e-9 * control_rate)
      throw ConfigError("mocap.rate", "must equal control_rate");
    if (!(tension_noise_std >= 0.0)) throw ConfigError("tension_noise_std", "must be >= 0");
  }
};

}  // namespace tetherswarm
