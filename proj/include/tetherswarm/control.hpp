#pragma once

// Cascaded per-drone controller.
//
//   SetpointMode --(follow offset | tension placement)--> position target
//   position_controller  -> collective thrust u1 + desired attitude
//   attitude_controller  -> body moments u2..u4
//   mix_inverse          -> rotor speeds
//
// In Tension mode the drone parks on the line through the finger along the
// commanded force, at the distance where the leash stretch produces that
// force, and feeds the expected tether pull forward into u1.

#include "tetherswarm/common.hpp"
#include "tetherswarm/tether.hpp"
#include "tetherswarm/vehicle_dynamics.hpp"

#include <cmath>
#include <numbers>
#include <string>
#include <variant>

namespace tetherswarm {

struct ControllerGains {
  double kp_pos = 12.0;      // 1/s^2
  double kd_pos = 7.0;       // 1/s
  double kp_att = 400.0;     // 1/s^2
  double kd_att = 40.0;      // 1/s
  double kp_tension = 0.5;   // dimensionless

  void validate(const std::string& prefix = "gains") const {
    const auto check = [&](double v, const char* name) {
      if (!(v >= 0.0) || !std::isfinite(v)) throw ConfigError(prefix + "." + name, "must be >= 0");
    };
    check(kp_pos, "kp_pos");
    check(kd_pos, "kd_pos");
    check(kp_att, "kp_att");
    check(kd_att, "kd_att");
    check(kp_tension, "kp_tension");
  }
};

struct FollowMode {
  Vec3 offset{0.0, 0.0, 0.4};  // drone position relative to its finger, W
};

struct TensionMode {
  Vec3 commanded_force = Vec3::Zero();  // force to deliver on the finger, W
};

using SetpointMode = std::variant<FollowMode, TensionMode>;

inline bool is_tension(const SetpointMode& mode) {
  return std::holds_alternative<TensionMode>(mode);
}

struct PositionCommand {
  double thrust = 0.0;
  Quat attitude = Quat::Identity();
  Vec3 desired_force = Vec3::Zero();  // before the thrust clamp
};

inline constexpr double kMinDesiredForce = 1e-9;

inline PositionCommand position_controller(const RigidBodyState& state, const Vec3& target_pos,
                                           const Vec3& target_vel, const Vec3& feedforward_force,
                                           const QuadrotorModel& model,
                                           const ControllerGains& gains, double gravity) {
  const Vec3 pos_err = target_pos - state.position;
  const Vec3 vel_err = target_vel - state.velocity;
  const Vec3 f_des = model.mass * (gains.kp_pos * pos_err + gains.kd_pos * vel_err) +
                     model.mass * gravity * kWorldUp + feedforward_force;

  PositionCommand out;
  out.desired_force = f_des;
  const double magnitude = f_des.norm();
  if (magnitude < kMinDesiredForce) {
    out.thrust = 0.0;
    out.attitude = state.orientation;
    return out;
  }
  out.thrust = std::min(magnitude, model.max_thrust());
  // Minimal rotation taking z_W onto the desired thrust axis: zero yaw.
  out.attitude = Quat::FromTwoVectors(kWorldUp, f_des / magnitude);
  return out;
}

// Rotation vector of q_err = q_state^-1 * q_des, shortest way round.
inline Vec3 attitude_error(const Quat& current, const Quat& desired) {
  Quat err = current.conjugate() * desired;
  if (err.w() < 0.0) err.coeffs() = -err.coeffs();
  const double vnorm = err.vec().norm();
  if (vnorm == 0.0) return Vec3::Zero();
  const double angle = 2.0 * std::atan2(vnorm, err.w());
  return err.vec() * (angle / vnorm);
}

// PD on the attitude error; returns body moments (u2, u3, u4).
inline Vec3 attitude_controller(const RigidBodyState& state, const Quat& attitude_des,
                                const QuadrotorModel& model, const ControllerGains& gains) {
  const Vec3 err = attitude_error(state.orientation, attitude_des);
  return model.inertia.cwiseProduct(gains.kp_att * err - gains.kd_att * state.angular_velocity);
}

struct TensionTarget {
  Vec3 attach_target = Vec3::Zero();  // where the leash attachment point should sit
  Vec3 target_pos = Vec3::Zero();     // centre-of-mass target for the position loop
  Vec3 target_vel = Vec3::Zero();
  Vec3 feedforward_force = Vec3::Zero();
};

// Widest angle from vertical at which the drone is placed along the commanded
// force direction. Steeper commands are placed on the cone boundary.
inline constexpr double kMaxPlacementAngle = std::numbers::pi / 4.0;

inline Vec3 placement_direction(const Vec3& commanded_force) {
  const double magnitude = commanded_force.norm();
  if (magnitude == 0.0) return kWorldUp;
  const Vec3 dir = commanded_force / magnitude;
  const Vec3 horizontal(dir.x(), dir.y(), 0.0);
  const double h = horizontal.norm();
  if (std::atan2(h, dir.z()) <= kMaxPlacementAngle) return dir;
  const double s = std::sin(kMaxPlacementAngle);
  const double c = std::cos(kMaxPlacementAngle);
  return Vec3(horizontal.x() / h * s, horizontal.y() / h * s, c);
}

inline TensionTarget tension_controller(const Vec3& finger_pos, const Vec3& finger_vel,
                                        const TetherForce& measured, const Vec3& commanded_force,
                                        const QuadrotorModel& model, const ControllerGains& gains,
                                        const TetherParams& tether) {
  if (!all_finite(commanded_force)) throw DomainError("commanded force must be finite");
  if (commanded_force.z() < 0.0)
    throw InfeasibleCommandError("a tether cannot push: commanded force has negative z");

  const double stretch = commanded_force.norm() / tether.active_stiffness();
  TensionTarget out;
  out.attach_target =
      finger_pos + (tether.rest_length + stretch) * placement_direction(commanded_force);
  // Level drone: the centre of mass sits attach_below above the attachment.
  out.target_pos = out.attach_target + model.attach_below * kWorldUp;
  out.target_vel = finger_vel;
  out.feedforward_force = commanded_force + gains.kp_tension * (commanded_force - measured.on_finger);
  return out;
}

struct FingerState {
  Vec3 position = Vec3::Zero();
  Vec3 velocity = Vec3::Zero();
};

struct ControlOutput {
  RotorCommand command;
  bool saturated = false;
  ControlInput desired;  // pre-allocation
  Vec3 target_pos = Vec3::Zero();
  Quat attitude_des = Quat::Identity();
};

inline ControlOutput control_step(const SetpointMode& mode, const RigidBodyState& drone,
                                  const FingerState& finger, const TetherForce& measured,
                                  const QuadrotorModel& model, const ControllerGains& gains,
                                  const TetherParams& tether, double gravity) {
  Vec3 target_pos;
  Vec3 target_vel = finger.velocity;
  Vec3 feedforward = Vec3::Zero();
  if (const auto* follow = std::get_if<FollowMode>(&mode)) {
    target_pos = finger.position + follow->offset;
  } else {
    const auto& tension = std::get<TensionMode>(mode);
    const TensionTarget t = tension_controller(finger.position, finger.velocity, measured,
                                               tension.commanded_force, model, gains, tether);
    target_pos = t.target_pos;
    target_vel = t.target_vel;
    feedforward = t.feedforward_force;
  }

  const PositionCommand pc =
      position_controller(drone, target_pos, target_vel, feedforward, model, gains, gravity);
  const Vec3 moments = attitude_controller(drone, pc.attitude, model, gains);

  ControlOutput out;
  out.desired = {pc.thrust, moments.x(), moments.y(), moments.z()};
  const Allocation alloc = mix_inverse(out.desired, model.rotors);
  out.command = alloc.command;
  out.saturated = alloc.saturated;
  out.target_pos = target_pos;
  out.attitude_des = pc.attitude;
  return out;
}

}  // namespace tetherswarm
