#include "tetherswarm/config_io.hpp"

#include <gtest/gtest.h>

#include <sstream>

namespace tetherswarm {
namespace {

std::string scenario(const std::string& name) {
  return std::string(TETHERSWARM_SCENARIO_DIR) + "/" + name;
}

std::string config_error_field(const std::string& text) {
  try {
    std::istringstream in(text);
    parse_config(in).validate();
  } catch (const ConfigError& e) {
    return e.field();
  }
  return "<no error>";
}

TEST(ConfigIo, DefaultsFromEmptyObject) {
  std::istringstream in("{}");
  const SimConfig c = parse_config(in);
  EXPECT_EQ(c.drones.size(), 5u);
  EXPECT_EQ(c.tethers.size(), 1u);
  EXPECT_EQ(c.mocap.rate, c.control_rate);
  EXPECT_NO_THROW(c.validate());
}

TEST(ConfigIo, RoundTripIsIdentity) {
  for (const char* name : {"press.json", "chord.json", "three_groups.json", "dual_tether.json",
                           "piano.json"}) {
    const SimConfig a = load_config(scenario(name));
    const Json ja = config_to_json(a);
    const SimConfig b = config_from_json(Json::parse(ja.dump()));
    EXPECT_EQ(config_to_json(b), ja) << name;
    EXPECT_EQ(config_hash(a), config_hash(b)) << name;
  }
}

TEST(ConfigIo, RoundTripPreservesInitialStates) {
  std::istringstream in(R"({"drones": [{"initial": {"position": [0.1, 0.2, 0.3],
      "orientation": [0.9238795325112867, 0, 0, 0.3826834323650898]}}],
      "assignment": {"policy": "dual_tether"},
      "tethers": [{"kind": "elastic"}, {"kind": "inextensible"}]})");
  const SimConfig a = parse_config(in);
  const SimConfig b = config_from_json(config_to_json(a));
  ASSERT_TRUE(b.drones[0].initial);
  EXPECT_EQ(b.drones[0].initial->position, Vec3(0.1, 0.2, 0.3));
  EXPECT_EQ(b.drones[0].initial->orientation.coeffs(), a.drones[0].initial->orientation.coeffs());
  EXPECT_EQ(config_hash(a), config_hash(b));
}

TEST(ConfigIo, HashChangesWithContent) {
  SimConfig a = load_config(scenario("press.json"));
  SimConfig b = a;
  b.seed += 1;
  EXPECT_NE(config_hash(a), config_hash(b));
  EXPECT_EQ(config_hash(a).size(), 16u);
}

TEST(ConfigIo, ValidationCitesField) {
  EXPECT_EQ(config_error_field(R"({"model": {"mass": -0.1}})"), "drones[0].model.mass");
  EXPECT_EQ(config_error_field(R"({"tethers": [{"rest_length": 0}]})"), "tethers[0].rest_length");
  EXPECT_EQ(config_error_field(R"({"scene": {"surfaces": [{"heigth": 0.8}]}})"),
            "scene.surfaces[0].heigth");
  EXPECT_EQ(config_error_field(R"({"gains": {"kp_pos": "fast"}})"), "gains.kp_pos");
  EXPECT_EQ(config_error_field(R"({"assignment": {"policy": "four_groups"}})"),
            "assignment.policy");
  EXPECT_EQ(config_error_field(R"({"physics_dt": 0.003})"), "physics_dt");
  EXPECT_EQ(config_error_field(R"({"duration": 1,)"), "<json>");
  EXPECT_EQ(config_error_field(R"({"mocap": {"latency": 0.015}})"), "mocap.latency");
}

TEST(ConfigIo, MissingFile) {
  EXPECT_THROW(load_config("/nonexistent/config.json"), ConfigError);
}

}  // namespace
}  // namespace tetherswarm
