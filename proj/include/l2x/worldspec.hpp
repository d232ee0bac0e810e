#ifndef L2X_WORLDSPEC_HPP
#define L2X_WORLDSPEC_HPP

#include "l2x/geometry.hpp"

#include <json.hpp>

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

namespace l2x {

using Json = nlohmann::json;

struct Rgb {
  int r = 0;
  int g = 0;
  int b = 0;
  bool operator==(const Rgb&) const = default;
};

struct ProximityZone {
  double zone_radius = 1.0;
  bool operator==(const ProximityZone&) const = default;
};
struct Contact {
  bool operator==(const Contact&) const = default;
};
struct ExplicitInteract {
  double zone_radius = 1.0;
  bool operator==(const ExplicitInteract&) const = default;
};
using InteractionModel = std::variant<ProximityZone, Contact, ExplicitInteract>;

struct StaticMotion {
  bool operator==(const StaticMotion&) const = default;
};
/// Constant velocity with specular reflection at the environment bounds.
struct LinearMotion {
  Vector2 velocity = Vector2::Zero();
  bool operator==(const LinearMotion& o) const { return velocity == o.velocity; }
};
using MotionModel = std::variant<StaticMotion, LinearMotion>;

struct EnvironmentParams {
  Bounds bounds{Vector2(-5.0, -5.0), Vector2(5.0, 5.0)};
  double lighting = 1.0;
  int background_class = 0;
  Rgb background_color{128, 128, 128};
  std::int64_t episode_step_limit = 500;
  double dt = 0.1;
  bool operator==(const EnvironmentParams&) const = default;
};

enum class ActionMode { Continuous, Discretized };

struct Pose {
  Vector2 position = Vector2::Zero();
  double heading = 0.0;
  bool operator==(const Pose& o) const {
    return position == o.position && heading == o.heading;
  }
};

struct AgentParams {
  Pose start_pose;
  double radius = 0.25;
  double max_linear_speed = 1.0;
  double max_angular_speed = 1.0;
  ActionMode action_mode = ActionMode::Continuous;
  bool interact_enabled = false;
  bool operator==(const AgentParams&) const = default;
};

struct ObjectSpec {
  std::string id;
  std::string class_name = "object";
  Rgb color{128, 128, 128};
  Vector2 position = Vector2::Zero();
  double radius = 0.5;
  InteractionModel interaction = Contact{};
  double reward_value = 1.0;
  double reward_probability = 1.0;
  bool destroy_on_interact = true;
  MotionModel motion = StaticMotion{};

  bool operator==(const ObjectSpec& o) const {
    return id == o.id && class_name == o.class_name && color == o.color &&
           position == o.position && radius == o.radius &&
           interaction == o.interaction && reward_value == o.reward_value &&
           reward_probability == o.reward_probability &&
           destroy_on_interact == o.destroy_on_interact && motion == o.motion;
  }
};

/// The declarative document that configures one episode: environment,
/// agent and object parameters plus the seed for all intrinsic randomness.
struct WorldSpec {
  EnvironmentParams environment;
  AgentParams agent;
  std::vector<ObjectSpec> objects;
  std::uint64_t seed = 0;

  bool operator==(const WorldSpec&) const = default;

  const ObjectSpec* find_object(std::string_view id) const;
};

/// A single (key-path, value) override. A null value on an object element
/// path (`objects.<id>`) removes it; the path `objects.+` appends.
using Override = std::pair<std::string, Json>;

/// Parses and validates a world document. Throws SyntaxError, SchemaError
/// or ValidationError.
WorldSpec parse_spec(std::string_view document);

/// Same, from an already parsed JSON value.
WorldSpec spec_from_json(const Json& document);

/// Canonical JSON value of a spec: every default materialized.
Json to_json(const WorldSpec& spec);

/// Deterministic serialization: sorted keys, shortest round-trip numbers.
std::string canonicalize(const WorldSpec& spec);

/// Checks every invariant; throws ValidationError naming the field.
void validate(const WorldSpec& spec);

WorldSpec apply_variant(const WorldSpec& base, std::span<const Override> overrides);

/// Named colors come from a fixed 16-entry table.
Rgb resolve_color(std::string_view name);
/// Accepts either a color name or a literal [r, g, b] triple.
Rgb color_from_json(const Json& value);
/// The committed color table, in table order.
const std::vector<std::pair<std::string_view, Rgb>>& color_table();

/// Semantic class ids in first-appearance order of class_name, from 1.
std::map<std::string, int> class_ids(const WorldSpec& spec);

Json to_json(const ObjectSpec& object);
/// Schema-checks one object element (no cross-field validation).
ObjectSpec object_from_json(const Json& value);
void validate_object(const ObjectSpec& object, const EnvironmentParams& env);

std::string dump_canonical(const Json& value);

}  // namespace l2x

#endif  // L2X_WORLDSPEC_HPP
