#pragma once

// Serializers for run outputs.
//
// log.csv: one schema comment line, one header row, then one row per physics
// tick. Numbers use the shortest representation that round-trips, so a log
// read back with read_log_csv is bit-identical to the one written. Column
// order is listed by log_columns().
//
// metrics.json and manifest.json keys are documented in the README.

#include "tetherswarm/config_io.hpp"
#include "tetherswarm/sim_engine.hpp"

#include <charconv>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

namespace tetherswarm {

inline constexpr const char* kLogMagic = "# tetherswarm-log";

inline std::vector<std::string> log_columns(std::size_t drone_count) {
  std::vector<std::string> cols{"t"};
  for (std::size_t d = 0; d < drone_count; ++d) {
    const std::string p = "d" + std::to_string(d) + "_";
    for (const char* c :
         {"mode", "px", "py", "pz", "vx", "vy", "vz", "qw", "qx", "qy", "qz", "wx", "wy", "wz",
          "w1", "w2", "w3", "w4", "saturated", "target_x", "target_y", "target_z", "cmd_fx",
          "cmd_fy", "cmd_fz", "finger_fx", "finger_fy", "finger_fz", "drone_fx", "drone_fy",
          "drone_fz", "tension", "taut"})
      cols.push_back(p + c);
  }
  for (auto name : kFingerNames) {
    const std::string p = std::string(name) + "_";
    for (const char* c : {"px", "py", "pz", "vx", "vy", "vz", "desired_fx", "desired_fy",
                          "desired_fz", "delivered_fx", "delivered_fy", "delivered_fz", "status",
                          "ttc", "depth"})
      cols.push_back(p + c);
  }
  return cols;
}

namespace log_detail {

class RowWriter {
 public:
  explicit RowWriter(std::string& out) : out_(out) {}

  void num(double v) {
    sep();
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    out_.append(buf, res.ptr);
  }
  void vec(const Vec3& v) {
    num(v.x());
    num(v.y());
    num(v.z());
  }
  void flag(bool b) {
    sep();
    out_.push_back(b ? '1' : '0');
  }
  void end() {
    out_.push_back('\n');
    first_ = true;
  }

 private:
  void sep() {
    if (!first_) out_.push_back(',');
    first_ = false;
  }
  std::string& out_;
  bool first_ = true;
};

inline std::string format_double(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

}  // namespace log_detail

inline std::string log_meta_line(const LogMeta& m) {
  using log_detail::format_double;
  return std::string(kLogMagic) + " v" + std::to_string(m.schema) +
         " seed=" + std::to_string(m.seed) + " config_hash=" + m.config_hash +
         " drones=" + std::to_string(m.drone_count) + " physics_dt=" + format_double(m.physics_dt) +
         " control_rate=" + format_double(m.control_rate) +
         " ramp_time=" + format_double(m.ramp_time);
}

inline void write_log_csv(std::ostream& os, const SimLog& log) {
  std::string buf;
  buf.reserve(1 << 20);
  buf += log_meta_line(log.meta);
  buf.push_back('\n');
  const auto cols = log_columns(log.meta.drone_count);
  for (std::size_t i = 0; i < cols.size(); ++i) {
    if (i) buf.push_back(',');
    buf += cols[i];
  }
  buf.push_back('\n');

  log_detail::RowWriter w(buf);
  for (const TickRecord& r : log.ticks) {
    w.num(r.t);
    for (const DroneTick& d : r.drones) {
      w.flag(d.tension);
      w.vec(d.state.position);
      w.vec(d.state.velocity);
      const Quat& q = d.state.orientation;
      w.num(q.w());
      w.num(q.x());
      w.num(q.y());
      w.num(q.z());
      w.vec(d.state.angular_velocity);
      for (double om : d.command.omega) w.num(om);
      w.flag(d.saturated);
      w.vec(d.target_pos);
      w.vec(d.commanded_force);
      w.vec(d.tether.on_finger);
      w.vec(d.tether.on_drone);
      w.num(d.tether.tension);
      w.flag(d.tether.taut);
    }
    for (const FingerTick& f : r.fingers) {
      w.vec(f.position);
      w.vec(f.velocity);
      w.vec(f.desired);
      w.vec(f.delivered);
      w.num(static_cast<double>(static_cast<int>(f.status)));
      w.num(f.time_to_contact);
      w.num(f.depth);
    }
    w.end();
    if (buf.size() > (1u << 20)) {
      os.write(buf.data(), static_cast<std::streamsize>(buf.size()));
      buf.clear();
    }
  }
  os.write(buf.data(), static_cast<std::streamsize>(buf.size()));
}

inline std::string log_to_string(const SimLog& log) {
  std::ostringstream os;
  write_log_csv(os, log);
  return os.str();
}

inline SimLog read_log_csv(std::istream& in) {
  SimLog log;
  std::string line;
  std::size_t line_no = 1;
  if (!std::getline(in, line) || line.rfind(kLogMagic, 0) != 0)
    throw ParseError(line_no, "missing log schema line");
  {
    std::istringstream meta(line.substr(std::string(kLogMagic).size()));
    std::string tok;
    meta >> tok;
    if (tok != "v" + std::to_string(kLogSchemaVersion))
      throw ParseError(line_no, "unsupported log schema '" + tok + "'");
    while (meta >> tok) {
      const auto eq = tok.find('=');
      if (eq == std::string::npos) throw ParseError(line_no, "bad metadata token '" + tok + "'");
      const std::string key = tok.substr(0, eq);
      const std::string val = tok.substr(eq + 1);
      double num = 0.0;
      if (key == "seed") {
        log.meta.seed = std::stoull(val);
      } else if (key == "config_hash") {
        log.meta.config_hash = val;
      } else if (key == "drones") {
        log.meta.drone_count = std::stoul(val);
      } else if (detail::parse_double(val, num)) {
        if (key == "physics_dt") log.meta.physics_dt = num;
        else if (key == "control_rate") log.meta.control_rate = num;
        else if (key == "ramp_time") log.meta.ramp_time = num;
      }
    }
  }
  const auto cols = log_columns(log.meta.drone_count);
  ++line_no;
  if (!std::getline(in, line)) throw ParseError(line_no, "missing header row");
  if (detail::split_csv(line).size() != cols.size())
    throw ParseError(line_no, "header has the wrong number of columns");

  std::vector<double> v(cols.size());
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto cells = detail::split_csv(line);
    if (cells.size() != cols.size())
      throw ParseError(line_no, "expected " + std::to_string(cols.size()) + " columns");
    for (std::size_t c = 0; c < cells.size(); ++c)
      if (!detail::parse_double(cells[c], v[c]))
        throw ParseError(line_no, "column '" + cols[c] + "' is not a number");

    std::size_t c = 0;
    const auto next = [&] { return v[c++]; };
    const auto next_vec = [&] {
      const double x = next(), y = next(), z = next();
      return Vec3(x, y, z);
    };
    TickRecord r;
    r.t = next();
    r.drones.resize(log.meta.drone_count);
    for (DroneTick& d : r.drones) {
      d.tension = next() != 0.0;
      d.state.position = next_vec();
      d.state.velocity = next_vec();
      const double qw = next(), qx = next(), qy = next(), qz = next();
      d.state.orientation = Quat(qw, qx, qy, qz);
      d.state.angular_velocity = next_vec();
      for (double& om : d.command.omega) om = next();
      d.saturated = next() != 0.0;
      d.target_pos = next_vec();
      d.commanded_force = next_vec();
      d.tether.on_finger = next_vec();
      d.tether.on_drone = next_vec();
      d.tether.tension = next();
      d.tether.taut = next() != 0.0;
    }
    for (FingerTick& f : r.fingers) {
      f.position = next_vec();
      f.velocity = next_vec();
      f.desired = next_vec();
      f.delivered = next_vec();
      f.status = static_cast<ContactStatus>(static_cast<int>(next()));
      f.time_to_contact = next();
      f.depth = next();
    }
    log.ticks.push_back(std::move(r));
  }
  return log;
}

inline Json metrics_to_json(const Metrics& m) {
  Json contacts = Json::array();
  for (const ContactMetrics& c : m.contacts)
    contacts.push_back({{"drone", c.drone},
                        {"start", c.start},
                        {"end", c.end},
                        {"rms_error", c.rms_error},
                        {"steady_state_error_pct", c.steady_state_error_pct},
                        {"steady_commanded", c.steady_commanded},
                        {"steady_delivered", c.steady_delivered},
                        {"slack_fraction", c.slack_fraction},
                        {"dragged", c.dragged}});
  return {{"force_rms_error", m.force_rms_error},
          {"steady_state_error_pct", m.steady_state_error_pct},
          {"max_tilt_rendering", m.max_tilt_rendering},
          {"tension_slack_fraction", m.tension_slack_fraction},
          {"follow_position_rms", m.follow_position_rms},
          {"real_time_factor", m.real_time_factor},
          {"contacts", contacts}};
}

inline Json manifest_to_json(const SimConfig& resolved, const LogMeta& meta,
                             const std::string& config_path, const std::string& trajectory_path) {
  return {{"log_schema", meta.schema},
          {"seed", meta.seed},
          {"config_hash", meta.config_hash},
          {"config_path", config_path},
          {"trajectory_path", trajectory_path},
          {"config", config_to_json(resolved)}};
}

}  // namespace tetherswarm
