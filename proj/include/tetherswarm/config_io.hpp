#pragma once

// JSON (de)serialization of SimConfig. Every field is optional and falls back
// to its default; unknown keys and type mismatches are rejected with a
// ConfigError naming the dotted field path.

#include "tetherswarm/sim_config.hpp"

#include <json.hpp>

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <initializer_list>
#include <set>
#include <sstream>
#include <string>

namespace tetherswarm {

using Json = nlohmann::json;

namespace config_detail {

inline std::string join(const std::string& prefix, const std::string& key) {
  return prefix.empty() ? key : prefix + "." + key;
}

inline void require_object(const Json& j, const std::string& path) {
  if (!j.is_object()) throw ConfigError(path.empty() ? "<root>" : path, "expected an object");
}

inline void reject_unknown(const Json& j, const std::string& path,
                           std::initializer_list<const char*> known) {
  const std::set<std::string> allowed(known.begin(), known.end());
  for (const auto& item : j.items())
    if (!allowed.count(item.key())) throw ConfigError(join(path, item.key()), "unknown field");
}

inline void read(const Json& j, const std::string& path, const char* key, double& out) {
  if (!j.contains(key)) return;
  const Json& v = j.at(key);
  if (!v.is_number()) throw ConfigError(join(path, key), "expected a number");
  out = v.get<double>();
}

inline void read(const Json& j, const std::string& path, const char* key, bool& out) {
  if (!j.contains(key)) return;
  const Json& v = j.at(key);
  if (!v.is_boolean()) throw ConfigError(join(path, key), "expected true or false");
  out = v.get<bool>();
}

inline void read(const Json& j, const std::string& path, const char* key, std::uint64_t& out) {
  if (!j.contains(key)) return;
  const Json& v = j.at(key);
  if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<std::int64_t>() >= 0))
    throw ConfigError(join(path, key), "expected a non-negative integer");
  out = v.get<std::uint64_t>();
}

inline void read(const Json& j, const std::string& path, const char* key, std::string& out) {
  if (!j.contains(key)) return;
  const Json& v = j.at(key);
  if (!v.is_string()) throw ConfigError(join(path, key), "expected a string");
  out = v.get<std::string>();
}

inline void read(const Json& j, const std::string& path, const char* key, Vec3& out) {
  if (!j.contains(key)) return;
  const Json& v = j.at(key);
  if (!v.is_array() || v.size() != 3)
    throw ConfigError(join(path, key), "expected an array of 3 numbers");
  for (std::size_t i = 0; i < 3; ++i) {
    if (!v[i].is_number()) throw ConfigError(join(path, key), "expected an array of 3 numbers");
    out[static_cast<Eigen::Index>(i)] = v[i].get<double>();
  }
}

inline void read(const Json& j, const std::string& path, const char* key, Quat& out) {
  if (!j.contains(key)) return;
  const Json& v = j.at(key);
  if (!v.is_array() || v.size() != 4)
    throw ConfigError(join(path, key), "expected [w, x, y, z]");
  double c[4];
  for (std::size_t i = 0; i < 4; ++i) {
    if (!v[i].is_number()) throw ConfigError(join(path, key), "expected [w, x, y, z]");
    c[i] = v[i].get<double>();
  }
  out = Quat(c[0], c[1], c[2], c[3]);
}

inline Json vec(const Vec3& v) { return Json::array({v.x(), v.y(), v.z()}); }
inline Json quat(const Quat& q) { return Json::array({q.w(), q.x(), q.y(), q.z()}); }

}  // namespace config_detail

inline QuadrotorModel model_from_json(const Json& j, const std::string& path,
                                      QuadrotorModel m = {}) {
  using namespace config_detail;
  require_object(j, path);
  reject_unknown(j, path, {"mass", "inertia", "attach_below", "rotors"});
  read(j, path, "mass", m.mass);
  read(j, path, "inertia", m.inertia);
  read(j, path, "attach_below", m.attach_below);
  if (j.contains("rotors")) {
    const std::string rp = join(path, "rotors");
    const Json& r = j.at("rotors");
    require_object(r, rp);
    reject_unknown(r, rp, {"k_f", "k_m", "arm_length", "omega_min", "omega_max"});
    read(r, rp, "k_f", m.rotors.k_f);
    read(r, rp, "k_m", m.rotors.k_m);
    read(r, rp, "arm_length", m.rotors.arm_length);
    read(r, rp, "omega_min", m.rotors.omega_min);
    read(r, rp, "omega_max", m.rotors.omega_max);
  }
  return m;
}

inline Json model_to_json(const QuadrotorModel& m) {
  using config_detail::vec;
  return {{"mass", m.mass},
          {"inertia", vec(m.inertia)},
          {"attach_below", m.attach_below},
          {"rotors",
           {{"k_f", m.rotors.k_f},
            {"k_m", m.rotors.k_m},
            {"arm_length", m.rotors.arm_length},
            {"omega_min", m.rotors.omega_min},
            {"omega_max", m.rotors.omega_max}}}};
}

inline TetherParams tether_from_json(const Json& j, const std::string& path) {
  using namespace config_detail;
  require_object(j, path);
  reject_unknown(j, path, {"kind", "rest_length", "stiffness", "damping", "constraint_stiffness",
                           "constraint_damping"});
  TetherParams t;
  std::string kind = "elastic";
  read(j, path, "kind", kind);
  if (kind == "elastic") {
    t.kind = TetherKind::Elastic;
  } else if (kind == "inextensible") {
    t.kind = TetherKind::Inextensible;
  } else {
    throw ConfigError(join(path, "kind"), "expected \"elastic\" or \"inextensible\"");
  }
  read(j, path, "rest_length", t.rest_length);
  read(j, path, "stiffness", t.stiffness);
  read(j, path, "damping", t.damping);
  read(j, path, "constraint_stiffness", t.constraint_stiffness);
  read(j, path, "constraint_damping", t.constraint_damping);
  return t;
}

inline Json tether_to_json(const TetherParams& t) {
  return {{"kind", t.kind == TetherKind::Elastic ? "elastic" : "inextensible"},
          {"rest_length", t.rest_length},
          {"stiffness", t.stiffness},
          {"damping", t.damping},
          {"constraint_stiffness", t.constraint_stiffness},
          {"constraint_damping", t.constraint_damping}};
}

inline SimConfig config_from_json(const Json& j) {
  using namespace config_detail;
  require_object(j, "");
  reject_unknown(j, "", {"duration", "physics_dt", "control_rate", "gravity", "seed", "model",
                         "drones", "assignment", "tethers", "scene", "gains", "mocap",
                         "direct_feedback", "tension_noise_std", "trajectory"});
  SimConfig c;
  read(j, "", "duration", c.duration);
  read(j, "", "physics_dt", c.physics_dt);
  read(j, "", "control_rate", c.control_rate);
  read(j, "", "gravity", c.gravity);
  read(j, "", "seed", c.seed);
  read(j, "", "direct_feedback", c.direct_feedback);
  read(j, "", "tension_noise_std", c.tension_noise_std);
  read(j, "", "trajectory", c.trajectory);

  QuadrotorModel base;
  if (j.contains("model")) base = model_from_json(j.at("model"), "model");

  if (j.contains("assignment")) {
    const Json& a = j.at("assignment");
    require_object(a, "assignment");
    reject_unknown(a, "assignment", {"policy", "finger"});
    std::string policy = "one_per_finger";
    read(a, "assignment", "policy", policy);
    const auto p = policy_from_name(policy);
    if (!p)
      throw ConfigError("assignment.policy",
                        "expected one_per_finger, three_groups or dual_tether");
    c.assignment.policy = *p;
    std::string finger = "index";
    read(a, "assignment", "finger", finger);
    const auto f = finger_from_name(finger);
    if (!f) throw ConfigError("assignment.finger", "unknown finger '" + finger + "'");
    c.assignment.dual_finger = *f;
  }

  if (j.contains("drones")) {
    const Json& d = j.at("drones");
    if (!d.is_array()) throw ConfigError("drones", "expected an array");
    for (std::size_t i = 0; i < d.size(); ++i) {
      const std::string p = "drones[" + std::to_string(i) + "]";
      require_object(d[i], p);
      reject_unknown(d[i], p, {"model", "initial"});
      DroneConfig dc;
      dc.model = d[i].contains("model") ? model_from_json(d[i].at("model"), p + ".model", base)
                                        : base;
      if (d[i].contains("initial")) {
        const Json& s = d[i].at("initial");
        const std::string sp = p + ".initial";
        require_object(s, sp);
        reject_unknown(s, sp, {"position", "velocity", "orientation", "angular_velocity"});
        RigidBodyState st;
        read(s, sp, "position", st.position);
        read(s, sp, "velocity", st.velocity);
        read(s, sp, "orientation", st.orientation);
        read(s, sp, "angular_velocity", st.angular_velocity);
        dc.initial = st;
      }
      c.drones.push_back(dc);
    }
  } else {
    c.drones.assign(drones_required(c.assignment.policy), DroneConfig{base, std::nullopt});
  }

  if (j.contains("tethers")) {
    const Json& t = j.at("tethers");
    if (!t.is_array()) throw ConfigError("tethers", "expected an array");
    for (std::size_t i = 0; i < t.size(); ++i)
      c.tethers.push_back(tether_from_json(t[i], "tethers[" + std::to_string(i) + "]"));
  } else {
    c.tethers.push_back(TetherParams{});
  }

  if (j.contains("scene")) {
    const Json& s = j.at("scene");
    require_object(s, "scene");
    reject_unknown(s, "scene", {"surfaces", "lead_time", "deactivation_delay", "ramp_time",
                                "max_force", "follow_offset", "prediction_horizon"});
    read(s, "scene", "lead_time", c.activation.lead_time);
    read(s, "scene", "deactivation_delay", c.activation.deactivation_delay);
    read(s, "scene", "ramp_time", c.activation.ramp_time);
    read(s, "scene", "max_force", c.activation.max_force);
    read(s, "scene", "follow_offset", c.activation.follow_offset);
    read(s, "scene", "prediction_horizon", c.prediction_horizon);
    if (s.contains("surfaces")) {
      const Json& arr = s.at("surfaces");
      if (!arr.is_array()) throw ConfigError("scene.surfaces", "expected an array");
      for (std::size_t i = 0; i < arr.size(); ++i) {
        const std::string p = "scene.surfaces[" + std::to_string(i) + "]";
        const Json& e = arr[i];
        require_object(e, p);
        reject_unknown(e, p, {"type", "height", "stiffness", "damping", "extent"});
        std::string type = "horizontal_plane";
        read(e, p, "type", type);
        if (type != "horizontal_plane")
          throw ConfigError(p + ".type", "only horizontal_plane is supported");
        VirtualSurface vs;
        read(e, p, "height", vs.height);
        read(e, p, "stiffness", vs.stiffness);
        read(e, p, "damping", vs.damping);
        if (e.contains("extent")) {
          const Json& x = e.at("extent");
          const std::string xp = p + ".extent";
          require_object(x, xp);
          reject_unknown(x, xp, {"x_min", "x_max", "y_min", "y_max"});
          read(x, xp, "x_min", vs.extent.x_min);
          read(x, xp, "x_max", vs.extent.x_max);
          read(x, xp, "y_min", vs.extent.y_min);
          read(x, xp, "y_max", vs.extent.y_max);
        }
        c.surfaces.push_back(vs);
      }
    }
  }

  if (j.contains("gains")) {
    const Json& g = j.at("gains");
    require_object(g, "gains");
    reject_unknown(g, "gains", {"kp_pos", "kd_pos", "kp_att", "kd_att", "kp_tension"});
    read(g, "gains", "kp_pos", c.gains.kp_pos);
    read(g, "gains", "kd_pos", c.gains.kd_pos);
    read(g, "gains", "kp_att", c.gains.kp_att);
    read(g, "gains", "kd_att", c.gains.kd_att);
    read(g, "gains", "kp_tension", c.gains.kp_tension);
  }

  c.mocap.rate = c.control_rate;
  if (j.contains("mocap")) {
    const Json& m = j.at("mocap");
    require_object(m, "mocap");
    reject_unknown(m, "mocap", {"rate", "position_noise_std", "attitude_noise_std", "latency"});
    read(m, "mocap", "rate", c.mocap.rate);
    read(m, "mocap", "position_noise_std", c.mocap.position_noise_std);
    read(m, "mocap", "attitude_noise_std", c.mocap.attitude_noise_std);
    read(m, "mocap", "latency", c.mocap.latency);
  }
  return c;
}

// Fully explicit form of a config; feeding it back through config_from_json
// reproduces the same config.
inline Json config_to_json(const SimConfig& c) {
  using config_detail::quat;
  using config_detail::vec;
  Json drones = Json::array();
  for (const DroneConfig& d : c.drones) {
    Json e = {{"model", model_to_json(d.model)}};
    if (d.initial)
      e["initial"] = {{"position", vec(d.initial->position)},
                      {"velocity", vec(d.initial->velocity)},
                      {"orientation", quat(d.initial->orientation)},
                      {"angular_velocity", vec(d.initial->angular_velocity)}};
    drones.push_back(e);
  }
  Json tethers = Json::array();
  for (const TetherParams& t : c.tethers) tethers.push_back(tether_to_json(t));
  Json surfaces = Json::array();
  for (const VirtualSurface& s : c.surfaces) {
    Json extent = Json::object();
    const auto put = [&](const char* k, double v) {
      if (std::isfinite(v)) extent[k] = v;
    };
    put("x_min", s.extent.x_min);
    put("x_max", s.extent.x_max);
    put("y_min", s.extent.y_min);
    put("y_max", s.extent.y_max);
    surfaces.push_back({{"type", "horizontal_plane"},
                        {"height", s.height},
                        {"stiffness", s.stiffness},
                        {"damping", s.damping},
                        {"extent", extent}});
  }
  Json out = {
      {"duration", c.duration},
      {"physics_dt", c.physics_dt},
      {"control_rate", c.control_rate},
      {"gravity", c.gravity},
      {"seed", c.seed},
      {"drones", drones},
      {"assignment",
       {{"policy", policy_name(c.assignment.policy)},
        {"finger", kFingerNames[index_of(c.assignment.dual_finger)]}}},
      {"tethers", tethers},
      {"scene",
       {{"surfaces", surfaces},
        {"lead_time", c.activation.lead_time},
        {"deactivation_delay", c.activation.deactivation_delay},
        {"ramp_time", c.activation.ramp_time},
        {"max_force", c.activation.max_force},
        {"follow_offset", vec(c.activation.follow_offset)},
        {"prediction_horizon", c.prediction_horizon}}},
      {"gains",
       {{"kp_pos", c.gains.kp_pos},
        {"kd_pos", c.gains.kd_pos},
        {"kp_att", c.gains.kp_att},
        {"kd_att", c.gains.kd_att},
        {"kp_tension", c.gains.kp_tension}}},
      {"mocap",
       {{"rate", c.mocap.rate},
        {"position_noise_std", c.mocap.position_noise_std},
        {"attitude_noise_std", c.mocap.attitude_noise_std},
        {"latency", c.mocap.latency}}},
      {"direct_feedback", c.direct_feedback},
      {"tension_noise_std", c.tension_noise_std},
  };
  if (!c.trajectory.empty()) out["trajectory"] = c.trajectory;
  return out;
}

inline SimConfig parse_config(std::istream& in) {
  Json j;
  try {
    j = Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw ConfigError("<json>", e.what());
  }
  return config_from_json(j);
}

inline SimConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config", "cannot open '" + path + "'");
  return parse_config(in);
}

// FNV-1a over the canonical JSON dump. Identifies a resolved config in logs.
inline std::string config_hash(const SimConfig& c) {
  const std::string text = config_to_json(c).dump();
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : text) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace tetherswarm
