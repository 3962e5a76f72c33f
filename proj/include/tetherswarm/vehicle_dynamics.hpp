#pragma once

// Quadrotor actuation and rigid-body model.
//
// Rotor layout (plus configuration, body frame D, z up):
//
//            +x
//           (1)
//            |
//   +y (2) --+-- (4) -y
//            |
//           (3)
//            -x
//
// Thrust of rotor i is k_f * w_i^2 along z_D. Rotors 2/4 produce the body-x
// moment, rotors 1/3 the body-y moment:
//
//   u1 = k_f * (w1^2 + w2^2 + w3^2 + w4^2)
//   u2 = k_f * L * (w2^2 - w4^2)
//   u3 = k_f * L * (w3^2 - w1^2)
//   u4 = k_m * (w1^2 + w2^2 + w3^2 + w4^2)          YawConvention::Uniform
//   u4 = k_m * (w1^2 - w2^2 + w3^2 - w4^2)          YawConvention::AlternatingSigns
//
// The uniform yaw row is proportional to the thrust row, so that mixer is
// rank 3. Allocation and dynamics use AlternatingSigns.

#include "tetherswarm/common.hpp"

#include <array>
#include <cmath>
#include <string>

namespace tetherswarm {

enum class YawConvention { Uniform, AlternatingSigns };

struct RotorParams {
  double k_f = 1.7e-8;   // N s^2 / rad^2
  double k_m = 1.4e-10;  // N m s^2 / rad^2
  double arm_length = 0.046;
  double omega_min = 0.0;
  double omega_max = 2500.0;

  // Throws ConfigError naming the first violated field.
  void validate(const std::string& prefix = "rotors") const {
    if (!(k_f > 0.0)) throw ConfigError(prefix + ".k_f", "must be > 0");
    if (!(k_m > 0.0)) throw ConfigError(prefix + ".k_m", "must be > 0");
    if (!(arm_length > 0.0)) throw ConfigError(prefix + ".arm_length", "must be > 0");
    if (!(omega_min >= 0.0)) throw ConfigError(prefix + ".omega_min", "must be >= 0");
    if (!(omega_max > omega_min) || !std::isfinite(omega_max))
      throw ConfigError(prefix + ".omega_max", "must be finite and > omega_min");
  }
};

struct RotorCommand {
  std::array<double, 4> omega{0.0, 0.0, 0.0, 0.0};

  bool operator==(const RotorCommand&) const = default;
};

struct ControlInput {
  double u1 = 0.0;  // collective thrust, N
  double u2 = 0.0;  // body-x moment, N m
  double u3 = 0.0;  // body-y moment, N m
  double u4 = 0.0;  // yaw moment, N m

  Eigen::Vector4d as_vector() const { return {u1, u2, u3, u4}; }
  bool operator==(const ControlInput&) const = default;
};

struct RigidBodyState {
  Vec3 position = Vec3::Zero();          // W, m
  Vec3 velocity = Vec3::Zero();          // W, m/s
  Quat orientation = Quat::Identity();   // D -> W
  Vec3 angular_velocity = Vec3::Zero();  // D, rad/s

  Vec3 body_z() const { return orientation * kWorldUp; }

  bool finite() const {
    return all_finite(position) && all_finite(velocity) && all_finite(orientation) &&
           all_finite(angular_velocity);
  }
};

struct QuadrotorModel {
  double mass = 0.027;
  Vec3 inertia{1.4e-5, 1.4e-5, 2.2e-5};  // diagonal, kg m^2
  RotorParams rotors;
  // Tether attachment sits this far below the centre of mass on the body z axis.
  double attach_below = 0.01;

  Vec3 attach_offset_body() const { return {0.0, 0.0, -attach_below}; }

  // Largest collective thrust the rotors can produce.
  double max_thrust() const {
    return 4.0 * rotors.k_f * rotors.omega_max * rotors.omega_max;
  }

  // Rotor speed that balances weight with four equal rotors.
  double hover_omega(double gravity) const {
    return std::sqrt(mass * gravity / (4.0 * rotors.k_f));
  }

  void validate(const std::string& prefix = "model") const {
    if (!(mass > 0.0) || !std::isfinite(mass)) throw ConfigError(prefix + ".mass", "must be > 0");
    for (int i = 0; i < 3; ++i) {
      if (!(inertia[i] > 0.0) || !std::isfinite(inertia[i]))
        throw ConfigError(prefix + ".inertia", "diagonal entries must be > 0");
    }
    if (!(attach_below >= 0.0)) throw ConfigError(prefix + ".attach_below", "must be >= 0");
    rotors.validate(prefix + ".rotors");
  }
};

struct RotorForceMoment {
  double force = 0.0;   // N
  double moment = 0.0;  // N m
};

inline RotorForceMoment rotor_thrust_moment(double omega, const RotorParams& params) {
  if (!(omega >= 0.0)) throw DomainError("rotor speed must be non-negative and finite");
  const double w2 = omega * omega;
  return {params.k_f * w2, params.k_m * w2};
}

// Forward mixing matrix M with u = M * [w1^2 .. w4^2].
inline Eigen::Matrix4d mixer_matrix(const RotorParams& p, YawConvention yaw) {
  const double kfl = p.k_f * p.arm_length;
  const double s = yaw == YawConvention::Uniform ? 1.0 : -1.0;
  Eigen::Matrix4d m;
  // clang-format off
  m << p.k_f,  p.k_f,  p.k_f,    p.k_f,
       0.0,    kfl,    0.0,     -kfl,
      -kfl,    0.0,    kfl,      0.0,
       p.k_m,  s * p.k_m, p.k_m, s * p.k_m;
  // clang-format on
  return m;
}

inline ControlInput mix_forward(const RotorCommand& cmd, const RotorParams& p,
                                YawConvention yaw = YawConvention::AlternatingSigns) {
  std::array<double, 4> sq{};
  for (int i = 0; i < 4; ++i) sq[i] = cmd.omega[i] * cmd.omega[i];
  const double sum = (sq[0] + sq[1]) + (sq[2] + sq[3]);
  ControlInput u;
  u.u1 = p.k_f * sum;
  u.u2 = p.k_f * p.arm_length * (sq[1] - sq[3]);
  u.u3 = p.k_f * p.arm_length * (sq[2] - sq[0]);
  u.u4 = yaw == YawConvention::Uniform ? p.k_m * sum
                                            : p.k_m * ((sq[0] - sq[1]) + (sq[2] - sq[3]));
  return u;
}

struct Allocation {
  RotorCommand command;
  bool saturated = false;
};

// Closed-form inverse of the AlternatingSigns mixer. Squared speeds outside
// [omega_min^2, omega_max^2] are clamped per rotor and flagged.
inline Allocation mix_inverse(const ControlInput& u, const RotorParams& p) {
  if (!u.as_vector().allFinite()) throw DomainError("control input must be finite");
  if (u.u1 < 0.0) throw DomainError("collective thrust u1 must be non-negative");

  const double thrust = u.u1 / p.k_f;                     // sum of w^2
  const double roll = u.u2 / (p.k_f * p.arm_length);      // w2^2 - w4^2
  const double pitch = u.u3 / (p.k_f * p.arm_length);     // w3^2 - w1^2
  const double yaw = u.u4 / p.k_m;                        // w1^2 - w2^2 + w3^2 - w4^2
  const double pair13 = 0.5 * (thrust + yaw);
  const double pair24 = 0.5 * (thrust - yaw);
  const std::array<double, 4> sq{0.5 * (pair13 - pitch), 0.5 * (pair24 + roll),
                                 0.5 * (pair13 + pitch), 0.5 * (pair24 - roll)};

  const double lo = p.omega_min * p.omega_min;
  const double hi = p.omega_max * p.omega_max;
  Allocation out;
  for (int i = 0; i < 4; ++i) {
    double s = sq[i];
    if (s < lo) {
      s = lo;
      out.saturated = true;
    } else if (s > hi) {
      s = hi;
      out.saturated = true;
    }
    out.command.omega[i] = std::sqrt(s);
  }
  return out;
}

// Clamp each rotor speed into the admissible range.
inline RotorCommand clamp_command(RotorCommand cmd, const RotorParams& p) {
  for (double& w : cmd.omega) w = std::clamp(w, p.omega_min, p.omega_max);
  return cmd;
}

// One semi-implicit Euler step of the Newton-Euler equations.
//
// Thrust u1 acts along z_D, gravity along -z_W. `external_force_world` acts at
// the tether attachment point and adds r_attach x F (in D) to the torque.
// Velocities are updated first and the new velocities drive the pose update;
// the quaternion is renormalized afterwards.
inline RigidBodyState step_dynamics(const RigidBodyState& state, const RotorCommand& cmd,
                                    const Vec3& external_force_world,
                                    const Vec3& external_torque_body, const QuadrotorModel& model,
                                    double gravity, double dt) {
  if (!(dt > 0.0)) throw DomainError("dt must be positive");
  const RotorCommand clamped = clamp_command(cmd, model.rotors);
  const ControlInput u = mix_forward(clamped, model.rotors, YawConvention::AlternatingSigns);

  const Mat3 rot = state.orientation.toRotationMatrix();
  const Vec3 thrust_world = rot.col(2) * u.u1;
  const Vec3 accel =
      (thrust_world + external_force_world) / model.mass - Vec3(0.0, 0.0, gravity);

  const Vec3 force_body = rot.transpose() * external_force_world;
  const Vec3 torque = Vec3(u.u2, u.u3, u.u4) + model.attach_offset_body().cross(force_body) +
                      external_torque_body;
  const Vec3& w = state.angular_velocity;
  const Vec3 inertia_w = model.inertia.cwiseProduct(w);
  const Vec3 ang_accel = (torque - w.cross(inertia_w)).cwiseQuotient(model.inertia);

  RigidBodyState next;
  next.velocity = state.velocity + accel * dt;
  next.position = state.position + next.velocity * dt;
  next.angular_velocity = w + ang_accel * dt;

  const Vec3 rotvec = next.angular_velocity * dt;
  const double angle = rotvec.norm();
  Quat delta = Quat::Identity();
  if (angle > 0.0) delta = Quat(Eigen::AngleAxisd(angle, rotvec / angle));
  next.orientation = (state.orientation * delta).normalized();
  if (!next.finite()) throw SimulationFault("non-finite rigid-body state after step");
  return next;
}

}  // namespace tetherswarm
