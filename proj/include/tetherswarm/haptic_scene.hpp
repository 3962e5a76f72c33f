#pragma once

// Virtual scene seen by the hand: horizontal contact planes, the five tracked
// fingertips, finger-to-drone assignment, contact prediction and the
// activation state machine that switches drones between Follow and Tension.

#include "tetherswarm/common.hpp"
#include "tetherswarm/control.hpp"
#include "tetherswarm/tether.hpp"

#include <algorithm>
#include <array>
#include <cstddef>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace tetherswarm {

inline constexpr std::size_t kFingerCount = 5;

enum class Finger : std::size_t { Thumb = 0, Index = 1, Middle = 2, Ring = 3, Little = 4 };

inline constexpr std::array<std::string_view, kFingerCount> kFingerNames{"thumb", "index", "middle",
                                                                         "ring", "little"};

inline std::optional<Finger> finger_from_name(std::string_view name) {
  for (std::size_t i = 0; i < kFingerCount; ++i)
    if (kFingerNames[i] == name) return static_cast<Finger>(i);
  return std::nullopt;
}

inline std::size_t index_of(Finger f) { return static_cast<std::size_t>(f); }

struct Hand {
  std::array<FingerState, kFingerCount> fingers{};

  const FingerState& operator[](Finger f) const { return fingers[index_of(f)]; }
  FingerState& operator[](Finger f) { return fingers[index_of(f)]; }
};

struct Extent {
  double x_min = -std::numeric_limits<double>::infinity();
  double x_max = std::numeric_limits<double>::infinity();
  double y_min = -std::numeric_limits<double>::infinity();
  double y_max = std::numeric_limits<double>::infinity();

  bool contains(double x, double y) const {
    return x >= x_min && x <= x_max && y >= y_min && y <= y_max;
  }
};

// Horizontal plane segment (a piano key, a table top). Only the region inside
// `extent` is solid.
struct VirtualSurface {
  double height = 0.0;
  double stiffness = 100.0;  // N/m
  double damping = 0.0;      // N s/m
  Extent extent;

  void validate(const std::string& prefix = "surface") const {
    if (!std::isfinite(height)) throw ConfigError(prefix + ".height", "must be finite");
    if (!(stiffness > 0.0)) throw ConfigError(prefix + ".stiffness", "must be > 0");
    if (!(damping >= 0.0)) throw ConfigError(prefix + ".damping", "must be >= 0");
    if (!(extent.x_min <= extent.x_max) || !(extent.y_min <= extent.y_max))
      throw ConfigError(prefix + ".extent", "min must not exceed max");
  }
};

enum class ContactStatus { Clear = 0, Approaching = 1, InContact = 2 };

struct ContactPrediction {
  ContactStatus status = ContactStatus::Clear;
  double time_to_contact = 0.0;  // Approaching only
  double depth = 0.0;            // InContact only
  Vec3 predicted_point = Vec3::Zero();
  int surface = -1;              // index into the scene's surfaces
};

// Constant-velocity extrapolation of one fingertip against one plane.
inline ContactPrediction predict_contact(const FingerState& finger, const VirtualSurface& surface,
                                         double horizon) {
  if (!(horizon > 0.0)) throw DomainError("prediction horizon must be positive");
  ContactPrediction out;
  const Vec3& p = finger.position;
  const Vec3& v = finger.velocity;
  if (p.z() <= surface.height) {
    if (surface.extent.contains(p.x(), p.y())) {
      out.status = ContactStatus::InContact;
      out.depth = surface.height - p.z();
      out.predicted_point = p;
    }
    return out;
  }
  if (!(v.z() < 0.0)) return out;
  const double ttc = (p.z() - surface.height) / (-v.z());
  if (ttc > horizon) return out;
  const Vec3 hit(p.x() + v.x() * ttc, p.y() + v.y() * ttc, surface.height);
  if (!surface.extent.contains(hit.x(), hit.y())) return out;
  out.status = ContactStatus::Approaching;
  out.time_to_contact = ttc;
  out.predicted_point = hit;
  return out;
}

// Most urgent prediction across all surfaces: deepest contact, otherwise the
// earliest approach.
inline ContactPrediction predict_contact(const FingerState& finger,
                                         std::span<const VirtualSurface> surfaces, double horizon) {
  ContactPrediction best;
  for (std::size_t i = 0; i < surfaces.size(); ++i) {
    ContactPrediction p = predict_contact(finger, surfaces[i], horizon);
    p.surface = p.status == ContactStatus::Clear ? -1 : static_cast<int>(i);
    const bool better =
        (p.status == ContactStatus::InContact &&
         (best.status != ContactStatus::InContact || p.depth > best.depth)) ||
        (p.status == ContactStatus::Approaching && best.status != ContactStatus::InContact &&
         (best.status != ContactStatus::Approaching || p.time_to_contact < best.time_to_contact));
    if (better) best = p;
  }
  return best;
}

// Penalty force pushing the finger out of the surface, clamped to `max_force`.
inline Vec3 desired_force(const FingerState& finger, const VirtualSurface& surface,
                          double max_force) {
  const Vec3& p = finger.position;
  if (p.z() > surface.height || !surface.extent.contains(p.x(), p.y())) return Vec3::Zero();
  const double depth = surface.height - p.z();
  const double magnitude =
      surface.stiffness * depth + surface.damping * std::max(0.0, -finger.velocity.z());
  return Vec3(0.0, 0.0, std::clamp(magnitude, 0.0, max_force));
}

// --- assignment ---------------------------------------------------------

enum class AssignmentPolicy { OnePerFinger, ThreeGroups, DualTether };

inline std::string_view policy_name(AssignmentPolicy p) {
  switch (p) {
    case AssignmentPolicy::OnePerFinger: return "one_per_finger";
    case AssignmentPolicy::ThreeGroups: return "three_groups";
    case AssignmentPolicy::DualTether: return "dual_tether";
  }
  return "?";
}

inline std::optional<AssignmentPolicy> policy_from_name(std::string_view name) {
  for (auto p : {AssignmentPolicy::OnePerFinger, AssignmentPolicy::ThreeGroups,
                 AssignmentPolicy::DualTether})
    if (policy_name(p) == name) return p;
  return std::nullopt;
}

struct PolicySpec {
  AssignmentPolicy policy = AssignmentPolicy::OnePerFinger;
  Finger dual_finger = Finger::Index;  // DualTether only
};

inline std::size_t drones_required(AssignmentPolicy p) {
  switch (p) {
    case AssignmentPolicy::OnePerFinger: return 5;
    case AssignmentPolicy::ThreeGroups: return 3;
    case AssignmentPolicy::DualTether: return 2;
  }
  return 0;
}

// One drone, its leash, and the finger(s) the leash is tied to. With several
// fingers the leash end sits at their centroid.
struct DroneBinding {
  int drone = 0;
  std::vector<Finger> fingers;
  TetherParams tether;
};

struct FingerAssignment {
  std::vector<DroneBinding> bindings;

  // Drones whose leash ends on finger f, in binding order.
  std::vector<int> drones_for(Finger f) const {
    std::vector<int> out;
    for (const auto& b : bindings)
      if (std::find(b.fingers.begin(), b.fingers.end(), f) != b.fingers.end())
        out.push_back(b.drone);
    return out;
  }

  const DroneBinding* binding_for(int drone) const {
    for (const auto& b : bindings)
      if (b.drone == drone) return &b;
    return nullptr;
  }

  // Every bound drone appears exactly once and has a non-empty finger group;
  // no finger carries more than two leashes.
  bool valid() const {
    std::vector<int> seen;
    for (const auto& b : bindings) {
      if (b.fingers.empty()) return false;
      if (std::find(seen.begin(), seen.end(), b.drone) != seen.end()) return false;
      seen.push_back(b.drone);
    }
    for (std::size_t f = 0; f < kFingerCount; ++f)
      if (drones_for(static_cast<Finger>(f)).size() > 2) return false;
    return true;
  }
};

// Maps drones onto fingers. `tethers` supplies one leash per binding in
// binding order; when shorter, the last entry is reused. DualTether requires
// two leashes that differ.
inline FingerAssignment assign_drones(std::span<const int> drone_ids, const PolicySpec& spec,
                                      std::span<const TetherParams> tethers) {
  const std::size_t need = drones_required(spec.policy);
  if (drone_ids.size() < need)
    throw ConfigError("assignment.policy", std::string(policy_name(spec.policy)) + " needs " +
                                               std::to_string(need) + " drones, got " +
                                               std::to_string(drone_ids.size()));
  if (tethers.empty()) throw ConfigError("tethers", "at least one tether is required");

  std::vector<std::vector<Finger>> groups;
  switch (spec.policy) {
    case AssignmentPolicy::OnePerFinger:
      for (std::size_t f = 0; f < kFingerCount; ++f) groups.push_back({static_cast<Finger>(f)});
      break;
    case AssignmentPolicy::ThreeGroups:
      groups = {{Finger::Thumb}, {Finger::Index, Finger::Middle}, {Finger::Ring, Finger::Little}};
      break;
    case AssignmentPolicy::DualTether:
      groups = {{spec.dual_finger}, {spec.dual_finger}};
      break;
  }

  FingerAssignment out;
  for (std::size_t i = 0; i < groups.size(); ++i) {
    const TetherParams& t = tethers[std::min(i, tethers.size() - 1)];
    out.bindings.push_back({drone_ids[i], groups[i], t});
  }
  if (spec.policy == AssignmentPolicy::DualTether &&
      out.bindings[0].tether == out.bindings[1].tether)
    throw ConfigError("tethers", "dual_tether needs two leashes with different properties");
  return out;
}

// Point where a binding's leash is tied: centroid of its fingers.
inline FingerState leash_anchor(const Hand& hand, const DroneBinding& b) {
  FingerState s;
  for (Finger f : b.fingers) {
    s.position += hand[f].position;
    s.velocity += hand[f].velocity;
  }
  const double n = static_cast<double>(b.fingers.size());
  s.position /= n;
  s.velocity /= n;
  return s;
}

// --- activation ---------------------------------------------------------

struct ActivationConfig {
  double lead_time = 0.3;          // pre-position when contact is this close, s
  double deactivation_delay = 0.1; // stay in Tension this long after the trigger clears, s
  double ramp_time = 0.05;         // linear force ramp after activation, s
  double max_force = 1.0;          // clamp on rendered force, N
  Vec3 follow_offset{0.0, 0.0, 0.4};

  void validate(const std::string& prefix = "scene") const {
    if (!(lead_time >= 0.0)) throw ConfigError(prefix + ".lead_time", "must be >= 0");
    if (!(deactivation_delay >= 0.0))
      throw ConfigError(prefix + ".deactivation_delay", "must be >= 0");
    if (!(ramp_time >= 0.0)) throw ConfigError(prefix + ".ramp_time", "must be >= 0");
    if (!(max_force > 0.0)) throw ConfigError(prefix + ".max_force", "must be > 0");
    if (!all_finite(follow_offset) || !(follow_offset.z() > 0.0))
      throw ConfigError(prefix + ".follow_offset", "z component must be > 0");
  }
};

// Per-drone memory of the activation state machine.
struct ActivationState {
  bool tension = false;
  double activated_at = 0.0;
  double last_triggered = 0.0;
};

struct ActivationResult {
  SetpointMode mode;
  Vec3 target_force = Vec3::Zero();  // unramped share of the deepest finger's force
};

inline bool triggers(const ContactPrediction& p, double lead_time) {
  return p.status == ContactStatus::InContact ||
         (p.status == ContactStatus::Approaching && p.time_to_contact < lead_time);
}

// Advances the activation state machine of every bound drone by one control
// tick at time `t` and returns one mode per binding (binding order).
//
// A drone enters Tension as soon as any of its fingers triggers and leaves
// only after `deactivation_delay` of continuous non-triggering. A grouped
// drone renders the force of its deepest-penetrating finger; drones sharing a
// finger split that finger's force evenly.
inline std::vector<ActivationResult> activation_logic(
    std::span<const ContactPrediction> predictions, const Hand& hand,
    std::span<const VirtualSurface> surfaces, const FingerAssignment& assignment,
    std::span<ActivationState> states, double t, const ActivationConfig& cfg) {
  if (predictions.size() != kFingerCount) throw DomainError("expected one prediction per finger");
  if (states.size() != assignment.bindings.size())
    throw DomainError("expected one activation state per binding");

  std::vector<ActivationResult> out;
  out.reserve(assignment.bindings.size());
  for (std::size_t i = 0; i < assignment.bindings.size(); ++i) {
    const DroneBinding& b = assignment.bindings[i];
    ActivationState& st = states[i];

    bool triggered = false;
    int deepest = -1;
    double deepest_depth = -1.0;
    for (Finger f : b.fingers) {
      const ContactPrediction& p = predictions[index_of(f)];
      if (triggers(p, cfg.lead_time)) triggered = true;
      if (p.status == ContactStatus::InContact && p.depth > deepest_depth) {
        deepest_depth = p.depth;
        deepest = static_cast<int>(index_of(f));
      }
    }

    if (triggered) {
      if (!st.tension) {
        st.tension = true;
        st.activated_at = t;
      }
      st.last_triggered = t;
    } else if (st.tension && t - st.last_triggered >= cfg.deactivation_delay) {
      st.tension = false;
    }

    ActivationResult r;
    if (!st.tension) {
      r.mode = FollowMode{cfg.follow_offset};
      out.push_back(r);
      continue;
    }
    if (deepest >= 0) {
      const ContactPrediction& p = predictions[static_cast<std::size_t>(deepest)];
      const Finger f = static_cast<Finger>(deepest);
      const double share = 1.0 / static_cast<double>(assignment.drones_for(f).size());
      r.target_force = desired_force(hand[f], surfaces[static_cast<std::size_t>(p.surface)],
                                     cfg.max_force) * share;
    }
    const double ramp =
        cfg.ramp_time > 0.0 ? std::clamp((t - st.activated_at) / cfg.ramp_time, 0.0, 1.0) : 1.0;
    r.mode = TensionMode{r.target_force * ramp};
    out.push_back(r);
  }
  return out;
}

}  // namespace tetherswarm
