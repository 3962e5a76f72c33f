#pragma once

// Massless leash between a fingertip and a drone's bottom attachment point.
// Both models are tension-only; an inextensible leash is realized as a stiff
// unilateral penalty so that it shares the force interface of the elastic one.

#include "tetherswarm/common.hpp"

#include <span>
#include <string>

namespace tetherswarm {

enum class TetherKind { Elastic, Inextensible };

struct TetherParams {
  TetherKind kind = TetherKind::Elastic;
  double rest_length = 0.5;
  double stiffness = 50.0;              // N/m, Elastic
  double damping = 0.5;                 // N s/m, Elastic
  double constraint_stiffness = 2000.0; // N/m, Inextensible
  double constraint_damping = 10.0;     // N s/m, Inextensible

  // Spring constants of whichever model `kind` selects.
  double active_stiffness() const {
    return kind == TetherKind::Elastic ? stiffness : constraint_stiffness;
  }
  double active_damping() const {
    return kind == TetherKind::Elastic ? damping : constraint_damping;
  }

  void validate(const std::string& prefix = "tether") const {
    if (!(rest_length > 0.0) || !std::isfinite(rest_length))
      throw ConfigError(prefix + ".rest_length", "must be > 0");
    if (!(stiffness >= 0.0)) throw ConfigError(prefix + ".stiffness", "must be >= 0");
    if (!(damping >= 0.0)) throw ConfigError(prefix + ".damping", "must be >= 0");
    if (!(constraint_stiffness >= 0.0))
      throw ConfigError(prefix + ".constraint_stiffness", "must be >= 0");
    if (!(constraint_damping >= 0.0))
      throw ConfigError(prefix + ".constraint_damping", "must be >= 0");
    if (!(active_stiffness() > 0.0))
      throw ConfigError(prefix + (kind == TetherKind::Elastic ? ".stiffness" : ".constraint_stiffness"),
                        "must be > 0 for the selected tether kind");
  }

  bool operator==(const TetherParams&) const = default;
};

struct TetherForce {
  Vec3 on_finger = Vec3::Zero();  // W, N
  Vec3 on_drone = Vec3::Zero();   // W, N; always -on_finger
  double tension = 0.0;
  bool taut = false;
};

inline constexpr double kMinTetherSeparation = 1e-9;

inline TetherForce tether_force(const Vec3& attach_pos, const Vec3& attach_vel,
                                const Vec3& finger_pos, const Vec3& finger_vel,
                                const TetherParams& params) {
  if (!all_finite(attach_pos) || !all_finite(finger_pos))
    throw DomainError("tether endpoints must be finite");
  const Vec3 line = attach_pos - finger_pos;
  const double length = line.norm();
  if (!(length > kMinTetherSeparation))
    throw DegenerateGeometryError("tether endpoints coincide");

  TetherForce out;
  const double stretch = length - params.rest_length;
  if (!(stretch > 0.0)) return out;
  out.taut = true;

  const Vec3 dir = line / length;
  const double stretch_rate = (attach_vel - finger_vel).dot(dir);
  const double tension =
      params.active_stiffness() * stretch + params.active_damping() * stretch_rate;
  if (tension > 0.0) {
    out.tension = tension;
    out.on_finger = dir * tension;
    out.on_drone = -out.on_finger;
  }
  return out;
}

// Net force on a finger from every leash attached to it.
inline Vec3 sum_finger_forces(std::span<const TetherForce> forces) {
  Vec3 total = Vec3::Zero();
  for (const TetherForce& f : forces) total += f.on_finger;
  return total;
}

}  // namespace tetherswarm
