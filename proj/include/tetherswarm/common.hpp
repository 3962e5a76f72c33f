#pragma once

#include <Eigen/Dense>
#include <Eigen/Geometry>

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace tetherswarm {

using Vec3 = Eigen::Vector3d;
using Quat = Eigen::Quaterniond;
using Mat3 = Eigen::Matrix3d;

inline const Vec3 kWorldUp{0.0, 0.0, 1.0};

// Error hierarchy. Everything thrown by the library derives from Error so
// callers can map failures onto exit codes without string matching.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Argument outside the mathematical domain of an operation (negative rotor
// speed, non-finite control input).
class DomainError : public Error {
 public:
  using Error::Error;
};

// Tether endpoints coincide, so the line of action is undefined.
class DegenerateGeometryError : public Error {
 public:
  using Error::Error;
};

// A commanded force a tether cannot produce (tethers only pull).
class InfeasibleCommandError : public Error {
 public:
  using Error::Error;
};

class SchedulingError : public Error {
 public:
  using Error::Error;
};

class SequencingError : public Error {
 public:
  using Error::Error;
};

// Invalid configuration value. `field` is the dotted path of the offending
// entry, e.g. "drones[0].model.mass".
class ConfigError : public Error {
 public:
  ConfigError(std::string field, const std::string& what)
      : Error(field + ": " + what), field_(std::move(field)) {}
  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

// Malformed input file. `line` is 1-based.
class ParseError : public Error {
 public:
  ParseError(std::size_t line, const std::string& what)
      : Error("line " + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

// Non-finite state or degenerate tether geometry inside a running simulation.
class SimulationFault : public Error {
 public:
  explicit SimulationFault(const std::string& what) : Error(what), tick_(0) {}
  SimulationFault(std::size_t tick, const std::string& what)
      : Error("tick " + std::to_string(tick) + ": " + what), tick_(tick) {}
  std::size_t tick() const noexcept { return tick_; }

 private:
  std::size_t tick_;
};

inline bool all_finite(const Vec3& v) { return v.allFinite(); }

inline bool all_finite(const Quat& q) { return q.coeffs().allFinite(); }

// Angle between the body thrust axis and world vertical.
inline double tilt_angle(const Quat& orientation) {
  const Vec3 z_body = orientation * kWorldUp;
  return std::acos(std::clamp(z_body.z(), -1.0, 1.0));
}

}  // namespace tetherswarm
