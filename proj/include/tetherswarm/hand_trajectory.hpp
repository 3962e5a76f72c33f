#pragma once

// Time-indexed fingertip trajectories, linearly interpolated.
//
// CSV format: a header row followed by one row per sample,
//
//   t,thumb_x,thumb_y,thumb_z,index_x,...,little_z
//
// 16 columns, seconds and metres, strictly increasing t. Blank lines and
// lines starting with '#' are skipped.

#include "tetherswarm/common.hpp"
#include "tetherswarm/haptic_scene.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <fstream>
#include <istream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

namespace tetherswarm {

inline constexpr std::size_t kTrajectoryColumns = 1 + 3 * kFingerCount;

inline std::vector<std::string> trajectory_header() {
  std::vector<std::string> cols{"t"};
  for (auto name : kFingerNames)
    for (const char* axis : {"_x", "_y", "_z"}) cols.push_back(std::string(name) + axis);
  return cols;
}

class HandTrajectory {
 public:
  using Sample = std::array<Vec3, kFingerCount>;

  HandTrajectory() = default;

  // A hand that never moves.
  static HandTrajectory stationary(const Sample& pose) {
    HandTrajectory h;
    h.add_sample(0.0, pose);
    return h;
  }

  void add_sample(double t, const Sample& pose) {
    if (!times_.empty() && !(t > times_.back()))
      throw DomainError("trajectory timestamps must be strictly increasing");
    times_.push_back(t);
    poses_.push_back(pose);
  }

  bool empty() const { return times_.empty(); }
  std::size_t size() const { return times_.size(); }
  const std::vector<double>& times() const { return times_; }
  const std::vector<Sample>& poses() const { return poses_; }

  // Interpolated hand at time t. Outside the sampled span the hand rests at
  // the nearest endpoint with zero velocity.
  Hand at(double t) const {
    Hand hand;
    if (times_.empty()) return hand;
    if (t < times_.front() || t >= times_.back()) {
      const Sample& s = t < times_.front() ? poses_.front() : poses_.back();
      for (std::size_t f = 0; f < kFingerCount; ++f) hand.fingers[f] = {s[f], Vec3::Zero()};
      return hand;
    }
    const auto it = std::upper_bound(times_.begin(), times_.end(), t);
    const auto i = static_cast<std::size_t>(it - times_.begin()) - 1;
    const double span = times_[i + 1] - times_[i];
    const double alpha = (t - times_[i]) / span;
    for (std::size_t f = 0; f < kFingerCount; ++f) {
      const Vec3 delta = poses_[i + 1][f] - poses_[i][f];
      hand.fingers[f] = {poses_[i][f] + delta * alpha, delta / span};
    }
    return hand;
  }

 private:
  std::vector<double> times_;
  std::vector<Sample> poses_;
};

namespace detail {

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r'))
    s.remove_suffix(1);
  return s;
}

inline std::vector<std::string_view> split_csv(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    out.push_back(trim(line.substr(start, comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

inline bool parse_double(std::string_view s, double& out) {
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  const auto res = std::from_chars(s.data(), s.data() + s.size(), out);
  return res.ec == std::errc() && res.ptr == s.data() + s.size();
}

}  // namespace detail

inline HandTrajectory parse_hand_trajectory(std::istream& in) {
  const std::vector<std::string> expected = trajectory_header();
  HandTrajectory traj;
  std::string raw;
  std::size_t line_no = 0;
  bool have_header = false;
  while (std::getline(in, raw)) {
    ++line_no;
    const std::string_view line = detail::trim(raw);
    if (line.empty() || line.front() == '#') continue;
    const auto cells = detail::split_csv(line);
    if (cells.size() != kTrajectoryColumns)
      throw ParseError(line_no, "expected " + std::to_string(kTrajectoryColumns) +
                                    " columns, got " + std::to_string(cells.size()));
    if (!have_header) {
      for (std::size_t c = 0; c < kTrajectoryColumns; ++c)
        if (cells[c] != expected[c])
          throw ParseError(line_no, "header column " + std::to_string(c + 1) + " should be '" +
                                        expected[c] + "', got '" + std::string(cells[c]) + "'");
      have_header = true;
      continue;
    }
    std::array<double, kTrajectoryColumns> v{};
    for (std::size_t c = 0; c < kTrajectoryColumns; ++c)
      if (!detail::parse_double(cells[c], v[c]) || !std::isfinite(v[c]))
        throw ParseError(line_no, "column '" + expected[c] + "' is not a finite number: '" +
                                      std::string(cells[c]) + "'");
    if (!traj.empty() && !(v[0] > traj.times().back()))
      throw ParseError(line_no, "time " + std::string(cells[0]) +
                                    " does not increase monotonically");
    HandTrajectory::Sample s;
    for (std::size_t f = 0; f < kFingerCount; ++f) s[f] = {v[1 + 3 * f], v[2 + 3 * f], v[3 + 3 * f]};
    traj.add_sample(v[0], s);
  }
  if (!have_header) throw ParseError(line_no, "missing header row");
  if (traj.empty()) throw ParseError(line_no, "trajectory has no samples");
  return traj;
}

inline HandTrajectory load_hand_trajectory(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("trajectory", "cannot open '" + path + "'");
  return parse_hand_trajectory(in);
}

}  // namespace tetherswarm
