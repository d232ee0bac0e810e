#include "l2x/errors.hpp"
#include "l2x/sensors.hpp"
#include "support/generators.hpp"
#include "support/oracles.hpp"

#include <doctest.h>

using namespace l2x;

namespace {

WorldSpec single(Vector2 at, double radius, Rgb color) {
  WorldSpec s;
  ObjectSpec o;
  o.id = "ball";
  o.class_name = "ball";
  o.position = at;
  o.radius = radius;
  o.color = color;
  s.objects.push_back(o);
  return s;
}

}  // namespace

TEST_CASE("tensor shape follows rays and modalities") {
  SimState st = reset(WorldSpec{});
  SensorConfig c;
  c.num_rays = 7;
  CHECK(emit(st, c).tensor.rows() == 7);
  CHECK(emit(st, c).channels() == 5);
  c.modalities = kDepth | kSemantic;
  const Observation o = emit(st, c);
  CHECK(o.channels() == 2);
  CHECK(o.column(kColor) == -1);
  CHECK(o.column(kDepth) == 0);
  CHECK(o.column(kSemantic) == 1);
}

TEST_CASE("a head-on ray sees the near surface") {
  SimState st = reset(single(Vector2(3, 0), 0.5, {255, 0, 0}));
  SensorConfig c;
  c.num_rays = 1;
  const Observation o = emit(st, c);
  CHECK(o.tensor(0, 3) == doctest::Approx(0.25));
  CHECK(o.tensor(0, 0) == 1.0);
  CHECK(o.tensor(0, 1) == 0.0);
  CHECK(o.tensor(0, 4) == 1.0);
}

TEST_CASE("misses report range and background") {
  WorldSpec s = single(Vector2(-3, 0), 0.5, {255, 0, 0});
  s.environment.background_class = 4;
  s.environment.background_color = {0, 51, 102};
  SimState st = reset(s);
  SensorConfig c;
  c.num_rays = 3;
  const Observation o = emit(st, c);
  for (int i = 0; i < 3; ++i) {
    CHECK(o.tensor(i, 3) == 1.0);
    CHECK(o.tensor(i, 4) == 4.0);
    CHECK(o.tensor(i, 1) == doctest::Approx(0.2));
  }
}

TEST_CASE("objects beyond max range are invisible") {
  SimState st = reset(single(Vector2(4.5, 0), 0.2, {255, 0, 0}));
  SensorConfig c;
  c.num_rays = 1;
  c.max_range = 4.0;
  CHECK(emit(st, c).tensor(0, 3) == 1.0);
  c.max_range = 4.5;
  CHECK(emit(st, c).tensor(0, 3) == doctest::Approx(4.3 / 4.5));
}

TEST_CASE("rays sweep left to right") {
  CHECK(ray_offset(SensorConfig{}, 0) == doctest::Approx(std::numbers::pi / 4));
  CHECK(ray_offset(SensorConfig{}, 31) == doctest::Approx(-std::numbers::pi / 4));
  // an object to the left shows up in the first rays only
  SimState st = reset(single(Vector2(2, 2), 0.3, {0, 0, 255}));
  const Observation o = emit(st, SensorConfig{});
  CHECK(o.tensor(0, 3) < 1.0);
  CHECK(o.tensor(31, 3) == 1.0);
}

TEST_CASE("halving the lighting halves color only") {
  WorldSpec s = single(Vector2(3, 0), 1.0, {200, 100, 50});
  const Observation bright = emit(reset(s), SensorConfig{});
  s.environment.lighting = 0.5;
  const Observation dim = emit(reset(s), SensorConfig{});
  CHECK((dim.tensor.leftCols(3) * 2.0 - bright.tensor.leftCols(3)).cwiseAbs().maxCoeff() == 0.0);
  CHECK(dim.tensor.rightCols(2) == bright.tensor.rightCols(2));
}

TEST_CASE("random scenes agree with the quadratic oracle") {
  testing::Gen gen(41);
  for (int scene = 0; scene < 200; ++scene) {
    WorldSpec s = gen.spec(8);
    SensorConfig c;
    c.num_rays = gen.integer(1, 40);
    c.fov = gen.real(0.1, 2 * std::numbers::pi);
    c.max_range = gen.real(0.5, 30);
    const SimState st = reset(s);
    const Observation o = emit(st, c);
    const auto truth = testing::cast_rays(st, c.num_rays, c.fov, c.max_range);
    for (int i = 0; i < c.num_rays; ++i) {
      REQUIRE(std::abs(o.tensor(i, 3) - truth[i].depth) < 1e-9);
      REQUIRE(std::abs(o.tensor(i, 0) - truth[i].r) < 1e-9);
      REQUIRE(std::abs(o.tensor(i, 1) - truth[i].g) < 1e-9);
      REQUIRE(std::abs(o.tensor(i, 2) - truth[i].b) < 1e-9);
      REQUIRE(o.tensor(i, 4) == truth[i].cls);
    }
  }
}

TEST_CASE("state vector layout") {
  WorldSpec s = single(Vector2(3, 1), 0.5, {1, 2, 3});
  s.agent.start_pose.position = Vector2(1, 1);
  SimState st = reset(s);
  SensorConfig c;
  c.state_vector_enabled = true;
  c.state_vector_size = 10;
  const Eigen::VectorXd v = *emit(st, c).state_vector;
  CHECK(v.size() == 10);
  CHECK(v(0) == 1.0);
  CHECK(v(2) == 1.0);
  CHECK(v(5) == 2.0);
  CHECK(v(6) == 0.0);
  CHECK(v(7) == 1.0);
  CHECK(v(9) == 0.0);
  destroy_object(st, "ball");
  CHECK(emit_state_vector(st, c)(7) == 0.0);
  c.state_vector_size = 6;
  CHECK(emit_state_vector(st, c).size() == 6);
  c.state_vector_size = 4;
  CHECK_THROWS_AS(emit_state_vector(st, c), ConfigError);
}

TEST_CASE("sensor config validation and JSON") {
  SensorConfig c;
  c.num_rays = 0;
  CHECK_THROWS_AS(validate(c), ConfigError);
  c = {};
  c.fov = 0;
  CHECK_THROWS_AS(validate(c), ConfigError);
  c = {};
  c.modalities = 0;
  CHECK_THROWS_AS(validate(c), ConfigError);
  c = {};
  c.num_rays = 9;
  c.modalities = kColor;
  CHECK(sensor_from_json(to_json(c)) == c);
  CHECK_THROWS_AS(sensor_from_json(nlohmann::json::parse(R"({"rays":3})")), ConfigError);
  CHECK_THROWS_AS(sensor_from_json(nlohmann::json::parse(R"({"modalities":["sonar"]})")), ConfigError);
  CHECK_THROWS_AS(sensor_from_json(nlohmann::json::parse(R"({"modalities":[3]})")), ConfigError);
}

TEST_CASE("observation JSON is row-major") {
  SimState st = reset(single(Vector2(3, 0), 0.5, {255, 0, 0}));
  SensorConfig c;
  c.num_rays = 2;
  const Observation o = emit(st, c);
  const nlohmann::json j = to_json(o);
  CHECK(j["shape"] == nlohmann::json::array({2, 5}));
  CHECK(j["data"].size() == 10);
  CHECK(j["data"][5].get<double>() == o.tensor(1, 0));
}
