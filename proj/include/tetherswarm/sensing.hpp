#pragma once

// Motion-capture emulator: fixed-rate, noisy, delayed poses of every drone
// and fingertip. Noise comes from one seeded stream per body, each derived
// from the run seed so adding a body leaves the others' noise unchanged.

#include "tetherswarm/common.hpp"
#include "tetherswarm/haptic_scene.hpp"
#include "tetherswarm/vehicle_dynamics.hpp"

#include <cmath>
#include <cstdint>
#include <deque>
#include <optional>
#include <random>
#include <string>
#include <vector>

namespace tetherswarm {

struct MocapConfig {
  double rate = 100.0;                // Hz
  double position_noise_std = 5e-4;   // m
  double attitude_noise_std = 0.2 * 3.14159265358979323846 / 180.0;  // rad
  double latency = 0.01;              // s, whole number of sample periods

  std::size_t latency_samples() const {
    return static_cast<std::size_t>(std::llround(latency * rate));
  }

  void validate(const std::string& prefix = "mocap") const {
    if (!(rate > 0.0) || !std::isfinite(rate)) throw ConfigError(prefix + ".rate", "must be > 0");
    if (!(position_noise_std >= 0.0))
      throw ConfigError(prefix + ".position_noise_std", "must be >= 0");
    if (!(attitude_noise_std >= 0.0))
      throw ConfigError(prefix + ".attitude_noise_std", "must be >= 0");
    if (!(latency >= 0.0) || !std::isfinite(latency))
      throw ConfigError(prefix + ".latency", "must be >= 0");
    const double periods = latency * rate;
    if (std::abs(periods - std::round(periods)) > 1e-9)
      throw ConfigError(prefix + ".latency", "must be a whole number of sample periods");
  }
};

struct BodyPose {
  Vec3 position = Vec3::Zero();
  Quat orientation = Quat::Identity();

  bool operator==(const BodyPose& o) const {
    return position == o.position && orientation.coeffs() == o.orientation.coeffs();
  }
};

// Ground truth handed to the emulator at one sample instant.
struct WorldSnapshot {
  std::vector<BodyPose> drones;
  std::array<Vec3, kFingerCount> fingers{};
};

struct MocapFrame {
  std::uint64_t index = 0;  // sample number; timestamp = index / rate
  double timestamp = 0.0;
  std::vector<BodyPose> drones;
  std::array<Vec3, kFingerCount> fingers{};
};

// SplitMix64 finalizer, used to derive independent per-body seeds.
inline std::uint64_t mix_seed(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

enum class BodyKind : std::uint64_t { Drone = 1, Finger = 2 };

inline std::uint64_t body_seed(std::uint64_t run_seed, BodyKind kind, std::size_t index) {
  return mix_seed(mix_seed(run_seed ^ (static_cast<std::uint64_t>(kind) << 56)) + index);
}

class MocapEmulator {
 public:
  MocapEmulator(MocapConfig config, std::uint64_t seed, std::size_t drone_count)
      : config_(config), seed_(seed) {
    config_.validate();
    for (std::size_t i = 0; i < drone_count; ++i)
      drone_rng_.emplace_back(body_seed(seed, BodyKind::Drone, i));
    for (std::size_t i = 0; i < kFingerCount; ++i)
      finger_rng_.emplace_back(body_seed(seed, BodyKind::Finger, i));
  }

  const MocapConfig& config() const { return config_; }

  // Records the truth at time t and returns the frame `latency` behind it.
  // Samples must arrive on consecutive grid points k / rate; before the delay
  // line fills, the earliest recorded truth is reported.
  MocapFrame sample(const WorldSnapshot& truth, double t) {
    const double k_real = t * config_.rate;
    const double k_round = std::round(k_real);
    if (!(std::abs(k_real - k_round) <= 1e-6 * std::max(1.0, std::abs(k_real))) || k_round < 0.0)
      throw SchedulingError("sample time " + std::to_string(t) + " is off the mocap grid");
    const auto k = static_cast<std::uint64_t>(k_round);
    if (next_index_ && k != *next_index_)
      throw SchedulingError("expected mocap sample " + std::to_string(*next_index_) + ", got " +
                            std::to_string(k));
    if (truth.drones.size() != drone_rng_.size())
      throw DomainError("snapshot drone count does not match the emulator");
    next_index_ = k + 1;

    history_.push_back(truth);
    const std::size_t keep = config_.latency_samples() + 1;
    while (history_.size() > keep) history_.pop_front();
    const WorldSnapshot& delayed = history_.front();

    MocapFrame frame;
    frame.index = k;
    frame.timestamp = static_cast<double>(k) / config_.rate;
    frame.drones.reserve(delayed.drones.size());
    for (std::size_t i = 0; i < delayed.drones.size(); ++i)
      frame.drones.push_back(perturb(delayed.drones[i], drone_rng_[i]));
    for (std::size_t i = 0; i < kFingerCount; ++i)
      frame.fingers[i] = perturb_position(delayed.fingers[i], finger_rng_[i]);
    return frame;
  }

 private:
  Vec3 perturb_position(const Vec3& p, std::mt19937_64& rng) {
    if (config_.position_noise_std == 0.0) return p;
    std::normal_distribution<double> n(0.0, config_.position_noise_std);
    const double dx = n(rng), dy = n(rng), dz = n(rng);
    return p + Vec3(dx, dy, dz);
  }

  BodyPose perturb(const BodyPose& pose, std::mt19937_64& rng) {
    BodyPose out{perturb_position(pose.position, rng), pose.orientation};
    if (config_.attitude_noise_std == 0.0) return out;
    std::normal_distribution<double> n(0.0, config_.attitude_noise_std);
    const double rx = n(rng), ry = n(rng), rz = n(rng);
    const Vec3 rotvec(rx, ry, rz);
    const double angle = rotvec.norm();
    if (angle > 0.0)
      out.orientation = (pose.orientation * Quat(Eigen::AngleAxisd(angle, rotvec / angle))).normalized();
    return out;
  }

  MocapConfig config_;
  std::uint64_t seed_;
  std::vector<std::mt19937_64> drone_rng_;
  std::vector<std::mt19937_64> finger_rng_;
  std::deque<WorldSnapshot> history_;
  std::optional<std::uint64_t> next_index_;
};

struct VelocityEstimate {
  std::vector<Vec3> drones;
  std::array<Vec3, kFingerCount> fingers{};
};

// (p2 - p1) * rate for every body of two consecutive frames.
inline VelocityEstimate finite_difference_velocity(const MocapFrame& prev, const MocapFrame& next,
                                                   double rate) {
  if (next.index != prev.index + 1)
    throw SequencingError("frames " + std::to_string(prev.index) + " and " +
                          std::to_string(next.index) + " are not consecutive");
  if (prev.drones.size() != next.drones.size())
    throw SequencingError("frames track different numbers of drones");
  VelocityEstimate v;
  v.drones.reserve(next.drones.size());
  for (std::size_t i = 0; i < next.drones.size(); ++i)
    v.drones.push_back((next.drones[i].position - prev.drones[i].position) * rate);
  for (std::size_t i = 0; i < kFingerCount; ++i)
    v.fingers[i] = (next.fingers[i] - prev.fingers[i]) * rate;
  return v;
}

}  // namespace tetherswarm
