#include "l2x/worldspec.hpp"

#include "l2x/errors.hpp"
#include "l2x/keypath.hpp"

#include <algorithm>
#include <cmath>
#include <initializer_list>
#include <set>

namespace l2x {

namespace {

// Strict accessor over one JSON object: rejects unknown keys and wrong types,
// and names the full key-path in every message.
class Fields {
 public:
  Fields(const Json& node, std::string path, std::initializer_list<std::string_view> allowed)
      : node_(node), path_(std::move(path)) {
    if (!node.is_object()) throw SchemaError(where() + " must be an object");
    for (const auto& [key, _] : node.items()) {
      if (std::find(allowed.begin(), allowed.end(), key) == allowed.end())
        throw SchemaError("unknown key '" + child(key) + "'");
    }
  }

  const Json* get(std::string_view key) const {
    auto it = node_.find(key);
    return it == node_.end() ? nullptr : &*it;
  }

  const Json& require(std::string_view key) const {
    const Json* v = get(key);
    if (!v) throw SchemaError("missing required key '" + child(key) + "'");
    return *v;
  }

  double real(std::string_view key, double fallback) const {
    const Json* v = get(key);
    return v ? as_real(*v, child(key)) : fallback;
  }

  bool boolean(std::string_view key, bool fallback) const {
    const Json* v = get(key);
    if (!v) return fallback;
    if (!v->is_boolean()) throw SchemaError("'" + child(key) + "' must be a boolean");
    return v->get<bool>();
  }

  std::int64_t integer(std::string_view key, std::int64_t fallback) const {
    const Json* v = get(key);
    if (!v) return fallback;
    if (!v->is_number_integer()) throw SchemaError("'" + child(key) + "' must be an integer");
    if (v->is_number_unsigned() && v->get<std::uint64_t>() > std::uint64_t(INT64_MAX))
      throw SchemaError("'" + child(key) + "' is out of range");
    return v->get<std::int64_t>();
  }

  std::string string(std::string_view key, std::string fallback) const {
    const Json* v = get(key);
    if (!v) return fallback;
    if (!v->is_string()) throw SchemaError("'" + child(key) + "' must be a string");
    return v->get<std::string>();
  }

  std::string child(std::string_view key) const {
    return path_.empty() ? std::string(key) : path_ + "." + std::string(key);
  }
  std::string where() const { return path_.empty() ? "document" : "'" + path_ + "'"; }

  static double as_real(const Json& v, const std::string& path) {
    if (!v.is_number()) throw SchemaError("'" + path + "' must be a number");
    return v.get<double>();
  }

 private:
  const Json& node_;
  std::string path_;
};

Vector2 read_vec2(const Json& v, const std::string& path) {
  if (!v.is_array() || v.size() != 2)
    throw SchemaError("'" + path + "' must be an array of two numbers");
  return Vector2(Fields::as_real(v[0], path + ".0"), Fields::as_real(v[1], path + ".1"));
}

Json vec2_json(const Vector2& v) { return Json::array({v.x(), v.y()}); }

Json rgb_json(const Rgb& c) { return Json::array({c.r, c.g, c.b}); }

Rgb read_color(const Json& v, const std::string& path) {
  try {
    return color_from_json(v);
  } catch (const UnknownColor& e) {
    throw SchemaError("'" + path + "': " + e.what());
  }
}

void check(bool ok, const std::string& field, const std::string& rule) {
  if (!ok) throw ValidationError("'" + field + "' " + rule);
}

bool finite(const Vector2& v) { return std::isfinite(v.x()) && std::isfinite(v.y()); }

EnvironmentParams environment_from_json(const Json& j) {
  Fields f(j, "environment",
           {"bounds", "lighting", "background_class", "background_color", "episode_step_limit", "dt"});
  EnvironmentParams env;
  if (const Json* b = f.get("bounds")) {
    Fields bf(*b, "environment.bounds", {"min", "max"});
    env.bounds.min = read_vec2(bf.require("min"), "environment.bounds.min");
    env.bounds.max = read_vec2(bf.require("max"), "environment.bounds.max");
  }
  env.lighting = f.real("lighting", env.lighting);
  const std::int64_t bg = f.integer("background_class", env.background_class);
  if (bg < 0 || bg > INT32_MAX) throw ValidationError("'environment.background_class' must be a non-negative class id");
  env.background_class = static_cast<int>(bg);
  if (const Json* c = f.get("background_color")) env.background_color = read_color(*c, "environment.background_color");
  env.episode_step_limit = f.integer("episode_step_limit", env.episode_step_limit);
  env.dt = f.real("dt", env.dt);
  return env;
}

AgentParams agent_from_json(const Json& j) {
  Fields f(j, "agent",
           {"start_pose", "radius", "max_linear_speed", "max_angular_speed", "action_mode", "interact_enabled"});
  AgentParams agent;
  if (const Json* p = f.get("start_pose")) {
    Fields pf(*p, "agent.start_pose", {"x", "y", "heading"});
    agent.start_pose.position = Vector2(pf.real("x", 0.0), pf.real("y", 0.0));
    agent.start_pose.heading = wrap_angle(pf.real("heading", 0.0));
  }
  agent.radius = f.real("radius", agent.radius);
  agent.max_linear_speed = f.real("max_linear_speed", agent.max_linear_speed);
  agent.max_angular_speed = f.real("max_angular_speed", agent.max_angular_speed);
  const std::string mode = f.string("action_mode", "continuous");
  if (mode == "continuous")
    agent.action_mode = ActionMode::Continuous;
  else if (mode == "discretized")
    agent.action_mode = ActionMode::Discretized;
  else
    throw SchemaError("'agent.action_mode' must be \"continuous\" or \"discretized\"");
  agent.interact_enabled = f.boolean("interact_enabled", agent.interact_enabled);
  return agent;
}

std::string object_path(const ObjectSpec& o) { return "objects." + o.id; }

}  // namespace

const ObjectSpec* WorldSpec::find_object(std::string_view id) const {
  for (const ObjectSpec& o : objects)
    if (o.id == id) return &o;
  return nullptr;
}

const std::vector<std::pair<std::string_view, Rgb>>& color_table() {
  static const std::vector<std::pair<std::string_view, Rgb>> table = {
      {"black", {0, 0, 0}},       {"silver", {192, 192, 192}}, {"gray", {128, 128, 128}},
      {"white", {255, 255, 255}}, {"maroon", {128, 0, 0}},     {"red", {255, 0, 0}},
      {"purple", {128, 0, 128}},  {"fuchsia", {255, 0, 255}},  {"green", {0, 128, 0}},
      {"lime", {0, 255, 0}},      {"olive", {128, 128, 0}},    {"yellow", {255, 255, 0}},
      {"navy", {0, 0, 128}},      {"blue", {0, 0, 255}},       {"teal", {0, 128, 128}},
      {"aqua", {0, 255, 255}},
  };
  return table;
}

Rgb resolve_color(std::string_view name) {
  for (const auto& [n, c] : color_table())
    if (n == name) return c;
  throw UnknownColor("unknown color '" + std::string(name) + "'");
}

Rgb color_from_json(const Json& value) {
  if (value.is_string()) return resolve_color(std::string_view(value.get_ref<const std::string&>()));
  if (value.is_array() && value.size() == 3) {
    int ch[3];
    for (int i = 0; i < 3; ++i) {
      const Json& c = value[i];
      if (!c.is_number_integer() || c.get<std::int64_t>() < 0 || c.get<std::int64_t>() > 255)
        throw UnknownColor("color channels must be integers in 0..255");
      ch[i] = c.get<int>();
    }
    return {ch[0], ch[1], ch[2]};
  }
  throw UnknownColor("color must be a name or an [r, g, b] triple");
}

std::map<std::string, int> class_ids(const WorldSpec& spec) {
  std::map<std::string, int> ids;
  int next = 1;
  for (const ObjectSpec& o : spec.objects)
    if (ids.emplace(o.class_name, next).second) ++next;
  return ids;
}

ObjectSpec object_from_json(const Json& j) {
  std::string path = "objects";
  if (j.is_object()) {
    auto it = j.find("id");
    if (it != j.end() && it->is_string()) path += "." + it->get<std::string>();
  }
  Fields f(j, path,
           {"id", "class_name", "color", "position", "radius", "interaction", "reward_value",
            "reward_probability", "destroy_on_interact", "motion"});
  ObjectSpec o;
  const Json& id = f.require("id");
  if (!id.is_string()) throw SchemaError("'" + f.child("id") + "' must be a string");
  o.id = id.get<std::string>();
  o.class_name = f.string("class_name", o.class_name);
  if (const Json* c = f.get("color")) o.color = read_color(*c, f.child("color"));
  o.position = read_vec2(f.require("position"), f.child("position"));
  o.radius = f.real("radius", o.radius);
  if (const Json* i = f.get("interaction")) {
    const std::string ipath = f.child("interaction");
    if (!i->is_object() || !i->contains("type") || !(*i)["type"].is_string())
      throw SchemaError("'" + ipath + "' must be an object with a string 'type'");
    const std::string type = (*i)["type"].get<std::string>();
    if (type == "proximity") {
      Fields fi(*i, ipath, {"type", "zone_radius"});
      o.interaction = ProximityZone{fi.real("zone_radius", 1.0)};
    } else if (type == "contact") {
      Fields fi(*i, ipath, {"type"});
      o.interaction = Contact{};
    } else if (type == "interact") {
      Fields fi(*i, ipath, {"type", "zone_radius"});
      o.interaction = ExplicitInteract{fi.real("zone_radius", 1.0)};
    } else {
      throw SchemaError("'" + ipath + ".type' must be one of proximity, contact, interact");
    }
  }
  o.reward_value = f.real("reward_value", o.reward_value);
  o.reward_probability = f.real("reward_probability", o.reward_probability);
  o.destroy_on_interact = f.boolean("destroy_on_interact", o.destroy_on_interact);
  if (const Json* m = f.get("motion")) {
    const std::string mpath = f.child("motion");
    if (!m->is_object() || !m->contains("type") || !(*m)["type"].is_string())
      throw SchemaError("'" + mpath + "' must be an object with a string 'type'");
    const std::string type = (*m)["type"].get<std::string>();
    if (type == "static") {
      Fields fm(*m, mpath, {"type"});
      o.motion = StaticMotion{};
    } else if (type == "linear") {
      Fields fm(*m, mpath, {"type", "velocity"});
      o.motion = LinearMotion{read_vec2(fm.require("velocity"), mpath + ".velocity")};
    } else {
      throw SchemaError("'" + mpath + ".type' must be static or linear");
    }
  }
  return o;
}

void validate_object(const ObjectSpec& o, const EnvironmentParams& env) {
  check(!o.id.empty(), "objects[].id", "must be non-empty");
  check(o.id.find('.') == std::string::npos && o.id != "+", "objects[].id",
        "'" + o.id + "' must not contain '.' or be '+'");
  const std::string p = object_path(o);
  check(!o.class_name.empty(), p + ".class_name", "must be non-empty");
  check(finite(o.position), p + ".position", "must be finite");
  check(env.bounds.contains(o.position), p + ".position", "must lie inside environment bounds");
  check(std::isfinite(o.radius) && o.radius > 0, p + ".radius", "must be > 0");
  check(std::isfinite(o.reward_value), p + ".reward_value", "must be finite");
  check(o.reward_probability >= 0 && o.reward_probability <= 1, p + ".reward_probability",
        "must lie in [0, 1]");
  std::visit(
      [&](const auto& m) {
        using T = std::decay_t<decltype(m)>;
        if constexpr (!std::is_same_v<T, Contact>)
          check(std::isfinite(m.zone_radius) && m.zone_radius >= 0, p + ".interaction.zone_radius",
                "must be >= 0");
      },
      o.interaction);
  if (const auto* lm = std::get_if<LinearMotion>(&o.motion))
    check(finite(lm->velocity), p + ".motion.velocity", "must be finite");
}

void validate(const WorldSpec& spec) {
  const EnvironmentParams& env = spec.environment;
  check(finite(env.bounds.min) && finite(env.bounds.max), "environment.bounds", "must be finite");
  check((env.bounds.min.array() < env.bounds.max.array()).all(), "environment.bounds",
        "min must be strictly less than max");
  check(env.lighting >= 0 && env.lighting <= 1, "environment.lighting", "must lie in [0, 1]");
  check(std::isfinite(env.dt) && env.dt > 0, "environment.dt", "must be > 0");
  check(env.episode_step_limit >= 1, "environment.episode_step_limit", "must be >= 1");
  check(env.background_class >= 0, "environment.background_class", "must be >= 0");

  const AgentParams& a = spec.agent;
  check(finite(a.start_pose.position), "agent.start_pose", "must be finite");
  check(env.bounds.contains(a.start_pose.position), "agent.start_pose",
        "must lie inside environment bounds");
  check(a.start_pose.heading >= -std::numbers::pi && a.start_pose.heading < std::numbers::pi,
        "agent.start_pose.heading", "must be normalized to [-pi, pi)");
  check(std::isfinite(a.radius) && a.radius > 0, "agent.radius", "must be > 0");
  check(std::isfinite(a.max_linear_speed) && a.max_linear_speed > 0, "agent.max_linear_speed", "must be > 0");
  check(std::isfinite(a.max_angular_speed) && a.max_angular_speed > 0, "agent.max_angular_speed",
        "must be > 0");

  std::set<std::string> seen;
  for (const ObjectSpec& o : spec.objects) {
    validate_object(o, env);
    if (!seen.insert(o.id).second) throw ValidationError("duplicate object id '" + o.id + "'");
  }
}

WorldSpec spec_from_json(const Json& j) {
  Fields f(j, "", {"environment", "agent", "objects", "seed"});
  WorldSpec spec;
  if (const Json* e = f.get("environment")) spec.environment = environment_from_json(*e);
  if (const Json* a = f.get("agent")) spec.agent = agent_from_json(*a);
  if (const Json* objs = f.get("objects")) {
    if (!objs->is_array()) throw SchemaError("'objects' must be an array");
    for (const Json& o : *objs) spec.objects.push_back(object_from_json(o));
  }
  if (const Json* s = f.get("seed")) {
    if (!s->is_number_integer() || (s->is_number_integer() && !s->is_number_unsigned() && s->get<std::int64_t>() < 0))
      throw SchemaError("'seed' must be a non-negative integer");
    spec.seed = s->get<std::uint64_t>();
  }
  validate(spec);
  return spec;
}

WorldSpec parse_spec(std::string_view document) {
  Json j;
  try {
    j = Json::parse(document.begin(), document.end());
  } catch (const Json::parse_error& e) {
    throw SyntaxError(e.what());
  }
  return spec_from_json(j);
}

Json to_json(const ObjectSpec& o) {
  Json j;
  j["id"] = o.id;
  j["class_name"] = o.class_name;
  j["color"] = rgb_json(o.color);
  j["position"] = vec2_json(o.position);
  j["radius"] = o.radius;
  j["interaction"] = std::visit(
      [](const auto& m) -> Json {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, ProximityZone>)
          return {{"type", "proximity"}, {"zone_radius", m.zone_radius}};
        else if constexpr (std::is_same_v<T, ExplicitInteract>)
          return {{"type", "interact"}, {"zone_radius", m.zone_radius}};
        else
          return {{"type", "contact"}};
      },
      o.interaction);
  j["reward_value"] = o.reward_value;
  j["reward_probability"] = o.reward_probability;
  j["destroy_on_interact"] = o.destroy_on_interact;
  if (const auto* lm = std::get_if<LinearMotion>(&o.motion))
    j["motion"] = {{"type", "linear"}, {"velocity", vec2_json(lm->velocity)}};
  else
    j["motion"] = {{"type", "static"}};
  return j;
}

Json to_json(const WorldSpec& spec) {
  const EnvironmentParams& env = spec.environment;
  const AgentParams& a = spec.agent;
  Json j;
  j["environment"] = {
      {"bounds", {{"min", vec2_json(env.bounds.min)}, {"max", vec2_json(env.bounds.max)}}},
      {"lighting", env.lighting},
      {"background_class", env.background_class},
      {"background_color", rgb_json(env.background_color)},
      {"episode_step_limit", env.episode_step_limit},
      {"dt", env.dt},
  };
  j["agent"] = {
      {"start_pose",
       {{"x", a.start_pose.position.x()}, {"y", a.start_pose.position.y()}, {"heading", a.start_pose.heading}}},
      {"radius", a.radius},
      {"max_linear_speed", a.max_linear_speed},
      {"max_angular_speed", a.max_angular_speed},
      {"action_mode", a.action_mode == ActionMode::Continuous ? "continuous" : "discretized"},
      {"interact_enabled", a.interact_enabled},
  };
  j["objects"] = Json::array();
  for (const ObjectSpec& o : spec.objects) j["objects"].push_back(to_json(o));
  j["seed"] = spec.seed;
  return j;
}

std::string dump_canonical(const Json& value) {
  // nlohmann objects are key-sorted and floats print in shortest round-trip form
  return value.dump(2, ' ', false, Json::error_handler_t::replace) + "\n";
}

std::string canonicalize(const WorldSpec& spec) { return dump_canonical(to_json(spec)); }

WorldSpec apply_variant(const WorldSpec& base, std::span<const Override> overrides) {
  if (overrides.empty()) return base;
  Json doc = to_json(base);
  for (const auto& [path, value] : overrides) keypath::assign(doc, path, value);
  try {
    return spec_from_json(doc);
  } catch (const SchemaError& e) {
    throw ValidationError(e.what());
  }
}

}  // namespace l2x
