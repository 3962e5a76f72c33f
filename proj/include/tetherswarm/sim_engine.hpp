#pragma once

// Fixed-step orchestrator.
//
// Every physics tick k (t = k * physics_dt) runs, in this order:
//   1. hand: interpolate the fingertip trajectory at t
//   2. on control ticks: mocap sample -> velocity estimate -> contact
//      prediction -> activation -> control_step per drone (command then held)
//   3. tether forces from the true drone and finger states
//   4. step_dynamics per drone with the tether reaction
//   5. log the tick (pre-step state, forces at t, command held over the tick)

#include "tetherswarm/common.hpp"
#include "tetherswarm/config_io.hpp"
#include "tetherswarm/control.hpp"
#include "tetherswarm/hand_trajectory.hpp"
#include "tetherswarm/haptic_scene.hpp"
#include "tetherswarm/sensing.hpp"
#include "tetherswarm/sim_config.hpp"
#include "tetherswarm/tether.hpp"
#include "tetherswarm/vehicle_dynamics.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

namespace tetherswarm {

inline constexpr int kLogSchemaVersion = 1;

struct DroneTick {
  bool tension = false;
  RigidBodyState state;
  RotorCommand command;
  bool saturated = false;
  Vec3 target_pos = Vec3::Zero();
  Vec3 commanded_force = Vec3::Zero();  // force the drone is rendering, ramp applied
  TetherForce tether;
};

struct FingerTick {
  Vec3 position = Vec3::Zero();
  Vec3 velocity = Vec3::Zero();
  Vec3 desired = Vec3::Zero();    // surface penalty force on the true finger state
  Vec3 delivered = Vec3::Zero();  // leash forces on this finger
  ContactStatus status = ContactStatus::Clear;  // latest control-tick prediction
  double time_to_contact = 0.0;
  double depth = 0.0;
};

struct TickRecord {
  double t = 0.0;
  std::vector<DroneTick> drones;
  std::array<FingerTick, kFingerCount> fingers{};
};

struct LogMeta {
  int schema = kLogSchemaVersion;
  std::uint64_t seed = 0;
  std::string config_hash;
  std::size_t drone_count = 0;
  double physics_dt = 0.0;
  double control_rate = 0.0;
  double ramp_time = 0.0;
};

struct SimLog {
  LogMeta meta;
  std::vector<TickRecord> ticks;
};

// One contact: within a Tension episode (a maximal run of Tension ticks), the
// span from the first to the last tick with a nonzero commanded force.
struct ContactMetrics {
  int drone = 0;
  double start = 0.0;
  double end = 0.0;
  double rms_error = 0.0;              // N, after the activation ramp
  double steady_state_error_pct = 0.0; // over the final 20% of the contact
  double steady_commanded = 0.0;       // N, mean |commanded| over the final 20%
  double steady_delivered = 0.0;       // N, mean tension over the final 20%
  double slack_fraction = 0.0;
  bool dragged = false;                // leash slack for more than 20% of the contact
};

struct Metrics {
  std::vector<ContactMetrics> contacts;
  double force_rms_error = 0.0;          // N, worst contact
  double steady_state_error_pct = 0.0;   // worst contact
  double max_tilt_rendering = 0.0;       // rad, over all Tension ticks
  double tension_slack_fraction = 0.0;   // over all contact ticks
  double follow_position_rms = 0.0;      // m, over all Follow ticks
  double real_time_factor = 0.0;         // simulated / wall-clock seconds; run() only
};

inline constexpr double kSteadyStateFraction = 0.2;
inline constexpr double kDraggedSlackFraction = 0.2;

// Pure function of the log. Leaves real_time_factor at zero.
inline Metrics compute_metrics(const SimLog& log) {
  Metrics m;
  if (log.ticks.empty()) return m;
  const std::size_t nd = log.meta.drone_count;

  double follow_sq = 0.0;
  std::size_t follow_n = 0;
  std::size_t contact_ticks = 0;
  std::size_t slack_ticks = 0;

  const auto& ticks = log.ticks;
  for (std::size_t d = 0; d < nd; ++d) {
    std::size_t k = 0;
    while (k < ticks.size()) {
      if (!ticks[k].drones[d].tension) {
        const DroneTick& r = ticks[k].drones[d];
        follow_sq += (r.state.position - r.target_pos).squaredNorm();
        ++follow_n;
        ++k;
        continue;
      }

      // One Tension episode [episode, k).
      const std::size_t episode = k;
      std::optional<std::size_t> first, last;
      for (; k < ticks.size() && ticks[k].drones[d].tension; ++k) {
        const DroneTick& r = ticks[k].drones[d];
        m.max_tilt_rendering = std::max(m.max_tilt_rendering, tilt_angle(r.state.orientation));
        if (r.commanded_force.norm() > 0.0) {
          if (!first) first = k;
          last = k;
        }
      }
      if (!first) continue;

      const std::size_t begin = *first;
      const std::size_t end = *last + 1;
      const double ramp_end = ticks[episode].t + log.meta.ramp_time;
      ContactMetrics c;
      c.drone = static_cast<int>(d);
      c.start = ticks[begin].t;
      c.end = ticks[end - 1].t;
      double sq = 0.0;
      std::size_t n = 0;
      std::size_t slack = 0;
      for (std::size_t i = begin; i < end; ++i) {
        const DroneTick& r = ticks[i].drones[d];
        if (!r.tether.taut) ++slack;
        if (ticks[i].t < ramp_end) continue;
        sq += (r.tether.on_finger - r.commanded_force).squaredNorm();
        ++n;
      }
      c.rms_error = n ? std::sqrt(sq / static_cast<double>(n)) : 0.0;
      const std::size_t len = end - begin;
      c.slack_fraction = static_cast<double>(slack) / static_cast<double>(len);
      c.dragged = c.slack_fraction > kDraggedSlackFraction;
      const auto tail = std::max<std::size_t>(
          1, static_cast<std::size_t>(std::ceil(kSteadyStateFraction * static_cast<double>(len))));
      double cmd_sum = 0.0, del_sum = 0.0;
      for (std::size_t i = end - tail; i < end; ++i) {
        cmd_sum += ticks[i].drones[d].commanded_force.norm();
        del_sum += ticks[i].drones[d].tether.tension;
      }
      c.steady_commanded = cmd_sum / static_cast<double>(tail);
      c.steady_delivered = del_sum / static_cast<double>(tail);
      c.steady_state_error_pct =
          c.steady_commanded > 0.0
              ? 100.0 * std::abs(c.steady_delivered - c.steady_commanded) / c.steady_commanded
              : 0.0;
      contact_ticks += len;
      slack_ticks += slack;
      m.contacts.push_back(c);
    }
  }

  std::sort(m.contacts.begin(), m.contacts.end(), [](const auto& a, const auto& b) {
    return a.start != b.start ? a.start < b.start : a.drone < b.drone;
  });
  for (const ContactMetrics& c : m.contacts) {
    m.force_rms_error = std::max(m.force_rms_error, c.rms_error);
    m.steady_state_error_pct = std::max(m.steady_state_error_pct, c.steady_state_error_pct);
  }
  m.tension_slack_fraction =
      contact_ticks ? static_cast<double>(slack_ticks) / static_cast<double>(contact_ticks) : 0.0;
  m.follow_position_rms = follow_n ? std::sqrt(follow_sq / static_cast<double>(follow_n)) : 0.0;
  return m;
}

// Fills in every unset initial state: at rest, level, at the leash anchor at
// t = 0 plus the follow offset.
inline SimConfig resolve_initial_states(SimConfig config, const HandTrajectory& hand) {
  const FingerAssignment assignment = [&] {
    std::vector<int> ids(config.drones.size());
    for (std::size_t i = 0; i < ids.size(); ++i) ids[i] = static_cast<int>(i);
    return assign_drones(ids, config.assignment, config.tethers);
  }();
  const Hand h0 = hand.at(0.0);
  for (const DroneBinding& b : assignment.bindings) {
    DroneConfig& d = config.drones[static_cast<std::size_t>(b.drone)];
    if (d.initial) continue;
    RigidBodyState s;
    s.position = leash_anchor(h0, b).position + config.activation.follow_offset;
    d.initial = s;
  }
  return config;
}

struct RunResult {
  SimLog log;
  Metrics metrics;
  SimConfig resolved;
};

namespace engine_detail {

inline Vec3 attach_point(const RigidBodyState& s, const QuadrotorModel& m) {
  return s.position + s.orientation * m.attach_offset_body();
}

inline Vec3 attach_velocity(const RigidBodyState& s, const QuadrotorModel& m) {
  return s.velocity + s.orientation * s.angular_velocity.cross(m.attach_offset_body());
}

}  // namespace engine_detail

inline RunResult run(const SimConfig& input, const HandTrajectory& hand) {
  using namespace engine_detail;
  const auto wall_start = std::chrono::steady_clock::now();

  input.validate();
  if (hand.empty()) throw ConfigError("trajectory", "hand trajectory is empty");
  RunResult result;
  result.resolved = resolve_initial_states(input, hand);
  const SimConfig& cfg = result.resolved;

  const std::size_t nd = cfg.drones.size();
  std::vector<int> ids(nd);
  for (std::size_t i = 0; i < nd; ++i) ids[i] = static_cast<int>(i);
  const FingerAssignment assignment = assign_drones(ids, cfg.assignment, cfg.tethers);
  const auto& bindings = assignment.bindings;

  SimLog& log = result.log;
  log.meta.seed = cfg.seed;
  log.meta.config_hash = config_hash(cfg);
  log.meta.drone_count = nd;
  log.meta.physics_dt = cfg.physics_dt;
  log.meta.control_rate = cfg.control_rate;
  log.meta.ramp_time = cfg.activation.ramp_time;

  const std::size_t ticks = cfg.physics_ticks();
  const std::size_t divider = cfg.control_divider();
  log.ticks.reserve(ticks);

  std::vector<RigidBodyState> states(nd);
  for (std::size_t i = 0; i < nd; ++i) states[i] = *cfg.drones[i].initial;

  MocapEmulator mocap(cfg.mocap, cfg.seed, nd);
  std::optional<MocapFrame> prev_frame;
  std::vector<std::mt19937_64> tension_rng;
  for (std::size_t i = 0; i < nd; ++i)
    tension_rng.emplace_back(body_seed(cfg.seed, static_cast<BodyKind>(3), i));

  std::vector<ActivationState> activation(bindings.size());
  std::vector<ControlOutput> held(nd);
  std::vector<SetpointMode> modes(nd, FollowMode{cfg.activation.follow_offset});
  std::array<ContactPrediction, kFingerCount> predictions{};
  std::vector<TetherForce> tethers(nd);

  for (std::size_t k = 0; k < ticks; ++k) {
    const double t = static_cast<double>(k) * cfg.physics_dt;
    const Hand truth = hand.at(t);

    // Tether forces depend only on the state at t; compute them once and use
    // them both as the controller's measurement and as the applied force.
    for (const DroneBinding& b : bindings) {
      const auto d = static_cast<std::size_t>(b.drone);
      const QuadrotorModel& model = cfg.drones[d].model;
      const FingerState anchor = leash_anchor(truth, b);
      try {
        tethers[d] = tether_force(attach_point(states[d], model), attach_velocity(states[d], model),
                                  anchor.position, anchor.velocity, b.tether);
      } catch (const Error& e) {
        throw SimulationFault(k, std::string("drone ") + std::to_string(d) + ": " + e.what());
      }
    }

    if (k % divider == 0) {
      WorldSnapshot snap;
      snap.drones.reserve(nd);
      for (const RigidBodyState& s : states) snap.drones.push_back({s.position, s.orientation});
      for (std::size_t f = 0; f < kFingerCount; ++f) snap.fingers[f] = truth.fingers[f].position;

      MocapFrame frame;
      if (cfg.direct_feedback) {
        frame.index = k / divider;
        frame.timestamp = static_cast<double>(frame.index) / cfg.mocap.rate;
        frame.drones = snap.drones;
        frame.fingers = snap.fingers;
      } else {
        frame = mocap.sample(snap, t);
      }
      VelocityEstimate vel;
      if (prev_frame) {
        vel = finite_difference_velocity(*prev_frame, frame, cfg.mocap.rate);
      } else {
        vel.drones.assign(nd, Vec3::Zero());
        vel.fingers.fill(Vec3::Zero());
      }

      Hand measured;
      for (std::size_t f = 0; f < kFingerCount; ++f)
        measured.fingers[f] = {frame.fingers[f], vel.fingers[f]};
      for (std::size_t f = 0; f < kFingerCount; ++f)
        predictions[f] = predict_contact(measured.fingers[f], cfg.surfaces, cfg.prediction_horizon);

      const std::vector<ActivationResult> act = activation_logic(
          predictions, measured, cfg.surfaces, assignment, activation, t, cfg.activation);

      for (std::size_t i = 0; i < bindings.size(); ++i) {
        const auto d = static_cast<std::size_t>(bindings[i].drone);
        modes[d] = act[i].mode;
        RigidBodyState estimate;
        estimate.position = frame.drones[d].position;
        estimate.orientation = frame.drones[d].orientation;
        estimate.velocity = vel.drones[d];
        estimate.angular_velocity = states[d].angular_velocity;  // onboard gyro

        TetherForce sensed = tethers[d];
        if (cfg.tension_noise_std > 0.0 && sensed.tension > 0.0) {
          std::normal_distribution<double> n(0.0, cfg.tension_noise_std);
          const double noisy = std::max(0.0, sensed.tension + n(tension_rng[d]));
          const double scale = noisy / sensed.tension;
          sensed.on_finger *= scale;
          sensed.on_drone = -sensed.on_finger;
          sensed.tension = noisy;
        }
        held[d] = control_step(modes[d], estimate, leash_anchor(measured, bindings[i]), sensed,
                               cfg.drones[d].model, cfg.gains, bindings[i].tether, cfg.gravity);
      }
      prev_frame = std::move(frame);
    }

    TickRecord rec;
    rec.t = t;
    rec.drones.resize(nd);
    for (std::size_t d = 0; d < nd; ++d) {
      DroneTick& r = rec.drones[d];
      r.tension = is_tension(modes[d]);
      r.state = states[d];
      r.command = held[d].command;
      r.saturated = held[d].saturated;
      r.target_pos = held[d].target_pos;
      if (const auto* tm = std::get_if<TensionMode>(&modes[d])) r.commanded_force = tm->commanded_force;
      r.tether = tethers[d];
    }
    for (std::size_t f = 0; f < kFingerCount; ++f) {
      FingerTick& ft = rec.fingers[f];
      ft.position = truth.fingers[f].position;
      ft.velocity = truth.fingers[f].velocity;
      const ContactPrediction& p = predictions[f];
      ft.status = p.status;
      ft.time_to_contact = p.time_to_contact;
      ft.depth = p.depth;
      const ContactPrediction exact =
          predict_contact(truth.fingers[f], cfg.surfaces, cfg.prediction_horizon);
      if (exact.status == ContactStatus::InContact)
        ft.desired = desired_force(truth.fingers[f],
                                   cfg.surfaces[static_cast<std::size_t>(exact.surface)],
                                   cfg.activation.max_force);
    }
    // A grouped leash is tied at the group centroid; each finger takes an
    // equal share.
    for (const DroneBinding& b : bindings) {
      const Vec3 share = tethers[static_cast<std::size_t>(b.drone)].on_finger /
                         static_cast<double>(b.fingers.size());
      for (Finger f : b.fingers) rec.fingers[index_of(f)].delivered += share;
    }

    for (std::size_t d = 0; d < nd; ++d) {
      try {
        states[d] = step_dynamics(states[d], held[d].command, tethers[d].on_drone, Vec3::Zero(),
                                  cfg.drones[d].model, cfg.gravity, cfg.physics_dt);
      } catch (const Error& e) {
        throw SimulationFault(k, std::string("drone ") + std::to_string(d) + ": " + e.what());
      }
    }
    log.ticks.push_back(std::move(rec));
  }

  result.metrics = compute_metrics(log);
  const double wall =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - wall_start).count();
  const double simulated = static_cast<double>(ticks) * cfg.physics_dt;
  result.metrics.real_time_factor = wall > 0.0 ? simulated / wall : 0.0;
  return result;
}

}  // namespace tetherswarm
