#include "l2x/tasks.hpp"

#include "l2x/errors.hpp"
#include "l2x/keypath.hpp"
#include "l2x/rng.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <set>
#include <sstream>

namespace l2x {

namespace {

constexpr std::string_view kPalette[] = {"blue", "red", "green", "yellow", "purple", "teal", "olive", "navy"};

WorldSpec arena_spec(const ArenaOptions& arena) {
  WorldSpec spec;
  spec.environment.bounds = Bounds{Vector2(-arena.half_extent, -arena.half_extent),
                                   Vector2(arena.half_extent, arena.half_extent)};
  spec.environment.episode_step_limit = arena.step_limit;
  spec.environment.dt = arena.dt;
  return spec;
}

bool path_resolves(const Json& doc, const std::string& path) {
  if (path == "+" ) return false;
  if (path.size() > 2 && path.ends_with(".+")) {
    const Json* parent = keypath::find(doc, path.substr(0, path.size() - 2));
    return parent && parent->is_array();
  }
  return keypath::resolves(doc, path);
}

// Places `count` disks uniformly inside the arena away from the agent start
// and from each other. Gives up on separation after a bounded number of tries.
std::vector<Vector2> scatter(RngStream& rng, int count, double half_extent, const Vector2& avoid) {
  std::vector<Vector2> out;
  const double lo = -half_extent + 1.0;
  const double hi = half_extent - 1.0;
  for (int k = 0; k < count; ++k) {
    Vector2 p;
    for (int attempt = 0; attempt < 1000; ++attempt) {
      p = Vector2(rng.uniform(lo, hi), rng.uniform(lo, hi));
      bool ok = (p - avoid).norm() > 1.5;
      for (const Vector2& q : out) ok = ok && (p - q).norm() > 1.5;
      if (ok) break;
    }
    out.push_back(p);
  }
  return out;
}

Json sample(const Distribution& dist, RngStream rng) {
  return std::visit(
      [&](const auto& d) -> Json {
        using T = std::decay_t<decltype(d)>;
        if constexpr (std::is_same_v<T, UniformDist>) {
          return rng.uniform(d.min, d.max);
        } else if constexpr (std::is_same_v<T, CategoricalDist>) {
          std::vector<double> w = d.weights;
          if (w.empty()) w.assign(d.values.size(), 1.0);
          double total = 0;
          for (double x : w) total += x;
          double u = rng.uniform() * total;
          for (std::size_t i = 0; i < w.size(); ++i) {
            if (u < w[i]) return d.values[i];
            u -= w[i];
          }
          return d.values.back();
        } else {
          return d.value;
        }
      },
      dist);
}

std::string segment_conflict(const std::vector<std::string>& a, const std::vector<std::string>& b) {
  for (const auto& x : a)
    for (const auto& y : b)
      if (keypath::is_prefix(x, y) || keypath::is_prefix(y, x)) return x + "' / '" + y;
  return {};
}

}  // namespace

std::string_view to_string(TaskFamily f) {
  switch (f) {
    case TaskFamily::FindObjects: return "FindObjects";
    case TaskFamily::GetToGoal: return "GetToGoal";
    case TaskFamily::SelectObject: return "SelectObject";
    case TaskFamily::MovingObject: return "MovingObject";
    case TaskFamily::ScavengerHunt: return "ScavengerHunt";
  }
  return "FindObjects";
}

TaskFamily family_from_string(std::string_view name) {
  for (TaskFamily f : {TaskFamily::FindObjects, TaskFamily::GetToGoal, TaskFamily::SelectObject,
                       TaskFamily::MovingObject, TaskFamily::ScavengerHunt})
    if (to_string(f) == name) return f;
  throw SchemaError("unknown task family '" + std::string(name) + "'");
}

void validate(const TaskDefinition& task) {
  validate(task.base_spec);
  validate(task.sensor);
  const Json doc = to_json(task.base_spec);

  std::vector<std::string> fixed = task.fixed_params, variant, randomized;
  for (const auto& v : task.variant_params) variant.push_back(v.path);
  for (const auto& r : task.randomized_params) randomized.push_back(r.path);
  for (const auto* set : {&fixed, &variant, &randomized})
    for (const std::string& p : *set)
      if (!path_resolves(doc, p)) throw ValidationError("task key-path '" + p + "' does not resolve in base_spec");
  for (auto [a, b] : {std::pair{&fixed, &variant}, std::pair{&fixed, &randomized}, std::pair{&variant, &randomized}}) {
    const std::string clash = segment_conflict(*a, *b);
    if (!clash.empty()) throw ValidationError("task parameter sets overlap at '" + clash + "'");
  }
  for (const auto& v : task.variant_params)
    if (v.min && v.max && *v.min > *v.max) throw ValidationError("variant param '" + v.path + "' has min > max");
  for (const auto& r : task.randomized_params) {
    if (const auto* u = std::get_if<UniformDist>(&r.distribution); u && !(u->min <= u->max))
      throw ValidationError("randomized param '" + r.path + "' has min > max");
    if (const auto* c = std::get_if<CategoricalDist>(&r.distribution)) {
      if (c->values.empty()) throw ValidationError("randomized param '" + r.path + "' has no values");
      if (!c->weights.empty()) {
        if (c->weights.size() != c->values.size())
          throw ValidationError("randomized param '" + r.path + "' weights/values size mismatch");
        double total = 0;
        for (double w : c->weights) {
          if (!(w >= 0)) throw ValidationError("randomized param '" + r.path + "' has a negative weight");
          total += w;
        }
        if (!(total > 0)) throw ValidationError("randomized param '" + r.path + "' weights sum to zero");
      }
    }
  }
  for (const std::string& id : task.rules.sequence)
    if (!task.base_spec.find_object(id)) throw ValidationError("sequence id '" + id + "' is not an object of base_spec");
  if (const auto* g = std::get_if<GoalReached>(&task.rules.terminal);
      g && !task.base_spec.environment.bounds.contains(g->goal))
    throw ValidationError("goal lies outside the environment bounds");
  if (std::holds_alternative<PotentialDistance>(task.rules.shaping) &&
      !std::holds_alternative<GoalReached>(task.rules.terminal))
    throw ValidationError("potential_distance shaping requires a goal_reached terminal rule");
}

std::string VariantInstance::digest() const {
  Json j = {{"overrides", Json::array()}, {"sampled", Json::array()}};
  for (const auto& [p, v] : overrides) j["overrides"].push_back({p, v});
  for (const auto& [p, v] : sampled) j["sampled"].push_back({p, v});
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a64(j.dump())));
  return buf;
}

VariantInstance realize(std::shared_ptr<const TaskDefinition> task, std::span<const Override> overrides,
                        std::uint64_t rng_seed) {
  VariantInstance inst;
  for (const auto& [path, value] : overrides) {
    const VariantParam* match = nullptr;
    for (const auto& v : task->variant_params)
      if (keypath::is_prefix(v.path, path) && (!match || v.path.size() > match->path.size())) match = &v;
    if (!match) throw UnknownPath("'" + path + "' is not a variant parameter of task '" + task->label + "'");
    if (match->path == path) {
      if ((match->min || match->max) && !value.is_number())
        throw RangeError("variant '" + path + "' expects a number");
      const double x = value.is_number() ? value.get<double>() : 0.0;
      if ((match->min && x < *match->min) || (match->max && x > *match->max))
        throw RangeError("variant '" + path + "' value " + value.dump() + " is outside its admissible range");
      if (!match->choices.empty() &&
          std::find(match->choices.begin(), match->choices.end(), value) == match->choices.end())
        throw RangeError("variant '" + path + "' value " + value.dump() + " is not an admissible choice");
    }
    inst.overrides.emplace_back(path, value);
  }
  const CounterRng base(hash_combine(rng_seed, fnv1a64("realize")));
  for (const auto& r : task->randomized_params)
    inst.sampled.emplace_back(r.path, sample(r.distribution, RngStream(base.split(r.path))));

  std::vector<Override> all = inst.overrides;
  all.insert(all.end(), inst.sampled.begin(), inst.sampled.end());
  inst.realized_spec = apply_variant(task->base_spec, all);
  inst.task = std::move(task);
  return inst;
}

// -- task families ------------------------------------------------------------

TaskDefinition make_find_objects(int targets, int distractors, std::uint64_t rng_seed, const ArenaOptions& arena) {
  if (targets < 1) throw ArgumentError("find-objects needs at least one target");
  if (distractors < 0) throw ArgumentError("distractor count must be >= 0");
  if (!(arena.half_extent > 1.0)) throw ArgumentError("arena half extent must exceed 1 m");
  TaskDefinition t;
  t.family = TaskFamily::FindObjects;
  t.label = "FindObjects";
  t.base_spec = arena_spec(arena);
  t.base_spec.seed = rng_seed;

  RngStream rng(CounterRng(rng_seed).split("layout"));
  const auto spots = scatter(rng, targets + distractors, arena.half_extent, t.base_spec.agent.start_pose.position);
  for (int k = 0; k < targets; ++k) {
    ObjectSpec o;
    o.id = "target" + std::to_string(k + 1);
    o.class_name = "target";
    o.color = resolve_color("blue");
    o.position = spots[k];
    o.radius = 0.4;
    o.reward_value = 1.0;
    t.base_spec.objects.push_back(o);
  }
  for (int k = 0; k < distractors; ++k) {
    ObjectSpec o;
    o.id = "distractor" + std::to_string(k + 1);
    o.class_name = "distractor";
    o.color = resolve_color("gray");
    o.position = spots[targets + k];
    o.radius = 0.4;
    o.reward_value = 0.0;
    o.destroy_on_interact = false;
    t.base_spec.objects.push_back(o);
  }
  t.rules.terminal = AllTargetsConsumed{};
  t.fixed_params = {"environment.bounds", "environment.dt", "agent.radius"};
  const double lo = -arena.half_extent + 1.0, hi = arena.half_extent - 1.0;
  for (int k = 0; k < targets; ++k) {
    const std::string p = "objects.target" + std::to_string(k + 1);
    t.variant_params.push_back({p + ".color", {}, {}, {}});
    t.variant_params.push_back({p + ".class_name", {}, {}, {}});
    t.variant_params.push_back({p + ".interaction", {}, {}, {}});
    t.variant_params.push_back({p + ".reward_value", {}, {}, {}});
    t.randomized_params.push_back({p + ".position.0", UniformDist{lo, hi}});
    t.randomized_params.push_back({p + ".position.1", UniformDist{lo, hi}});
  }
  for (int k = 0; k < distractors; ++k) {
    const std::string p = "objects.distractor" + std::to_string(k + 1);
    t.variant_params.push_back({p + ".class_name", {}, {}, {}});
    t.variant_params.push_back({p + ".position", {}, {}, {}});
  }
  t.variant_params.push_back({"objects.+", {}, {}, {}});
  t.variant_params.push_back({"environment.lighting", 0.0, 1.0, {}});
  t.variant_params.push_back({"agent.max_linear_speed", 1e-3, 100.0, {}});
  t.variant_params.push_back({"agent.max_angular_speed", 1e-3, 100.0, {}});
  t.randomized_params.push_back({"agent.start_pose.heading", UniformDist{-std::numbers::pi, std::numbers::pi}});
  validate(t);
  return t;
}

TaskDefinition make_get_to_goal(const Vector2& goal, double shaping_alpha, const ArenaOptions& arena) {
  if (!(shaping_alpha >= 0)) throw ArgumentError("shaping alpha must be >= 0");
  TaskDefinition t;
  t.family = TaskFamily::GetToGoal;
  t.label = "GetToGoal";
  t.base_spec = arena_spec(arena);
  if (!t.base_spec.environment.bounds.contains(goal)) throw ArgumentError("goal lies outside the arena");
  t.rules.terminal = GoalReached{goal, 0.5, 1.0};
  if (shaping_alpha > 0) t.rules.shaping = PotentialDistance{shaping_alpha};
  t.fixed_params = {"environment.bounds", "environment.dt", "agent.radius"};
  t.variant_params = {{"objects", {}, {}, {}}, {"environment.lighting", 0.0, 1.0, {}}};
  t.randomized_params.push_back({"agent.start_pose.heading", UniformDist{-std::numbers::pi, std::numbers::pi}});
  validate(t);
  return t;
}

TaskDefinition make_select_object(int arms, const std::vector<double>& probabilities,
                                  const std::vector<double>& values) {
  if (arms < 1) throw ArgumentError("select-object needs at least one arm");
  if (probabilities.size() != std::size_t(arms) || values.size() != std::size_t(arms))
    throw ArgumentError("arms, probabilities and values must have equal length");
  for (double p : probabilities)
    if (!(p >= 0 && p <= 1)) throw ArgumentError("arm probabilities must lie in [0, 1]");
  for (double v : values)
    if (!std::isfinite(v)) throw ArgumentError("arm values must be finite");

  // arms on a ring around the agent; zones never overlap each other or the start
  const double ring = std::max(1.0, 0.3 * arms);
  const double chord = arms > 1 ? 2 * ring * std::sin(std::numbers::pi / arms) : 2 * ring;
  const double zone = std::min(0.95 * ring, 0.475 * chord);

  TaskDefinition t;
  t.family = TaskFamily::SelectObject;
  t.label = "SelectObject";
  t.base_spec = arena_spec({ring + 1.0, 200, 0.1});
  t.base_spec.agent.start_pose.heading = std::numbers::pi / 2;
  t.base_spec.agent.interact_enabled = true;
  t.base_spec.agent.max_angular_speed = std::numbers::pi / 2;
  for (int k = 0; k < arms; ++k) {
    const double a = 2 * std::numbers::pi * k / arms;
    ObjectSpec o;
    o.id = "arm" + std::to_string(k + 1);
    o.class_name = "arm";
    o.color = resolve_color(kPalette[k % std::size(kPalette)]);
    o.position = Vector2(ring * std::cos(a), ring * std::sin(a));
    o.radius = 0.2;
    o.interaction = ExplicitInteract{zone};
    o.reward_value = values[k];
    o.reward_probability = probabilities[k];
    t.base_spec.objects.push_back(o);
    t.variant_params.push_back({"objects." + o.id + ".reward_probability", 0.0, 1.0, {}});
    t.variant_params.push_back({"objects." + o.id + ".reward_value", {}, {}, {}});
    t.variant_params.push_back({"objects." + o.id + ".class_name", {}, {}, {}});
    t.variant_params.push_back({"objects." + o.id + ".color", {}, {}, {}});
  }
  t.rules.terminal = SelectionMade{};
  t.fixed_params = {"environment.bounds", "agent.start_pose", "agent.interact_enabled"};
  t.sensor.state_vector_enabled = true;
  t.sensor.state_vector_size = 5 + 3 * arms;
  validate(t);
  return t;
}

TaskDefinition make_moving_object(double speed, std::uint64_t rng_seed, const ArenaOptions& arena) {
  if (!(speed >= 0) || !std::isfinite(speed)) throw ArgumentError("object speed must be >= 0");
  TaskDefinition t = make_find_objects(1, 0, rng_seed, arena);
  t.family = TaskFamily::MovingObject;
  t.label = "MovingObject";
  if (speed > 0) {
    RngStream rng(CounterRng(rng_seed).split("motion"));
    const double a = rng.uniform(-std::numbers::pi, std::numbers::pi);
    t.base_spec.objects[0].motion = LinearMotion{speed * Vector2(std::cos(a), std::sin(a))};
  }
  t.variant_params.push_back({"objects.target1.motion", {}, {}, {}});
  validate(t);
  return t;
}

TaskDefinition make_scavenger_hunt(const std::vector<std::string>& sequence, double wrong_order_penalty,
                                   const ArenaOptions& arena) {
  if (sequence.empty()) throw ArgumentError("scavenger sequence must be non-empty");
  if (std::set<std::string>(sequence.begin(), sequence.end()).size() != sequence.size())
    throw ArgumentError("scavenger sequence ids must be distinct");
  if (!std::isfinite(wrong_order_penalty)) throw ArgumentError("wrong-order penalty must be finite");
  TaskDefinition t;
  t.family = TaskFamily::ScavengerHunt;
  t.label = "ScavengerHunt";
  t.base_spec = arena_spec(arena);
  const double ring = std::min(3.0, arena.half_extent - 1.0);
  const std::size_t n = sequence.size();
  for (std::size_t k = 0; k < n; ++k) {
    const double a = 2 * std::numbers::pi * double(k) / double(n);
    ObjectSpec o;
    o.id = sequence[k];
    o.class_name = "landmark";
    o.color = resolve_color(kPalette[k % std::size(kPalette)]);
    o.position = Vector2(ring * std::cos(a), ring * std::sin(a));
    o.radius = 0.3;
    o.interaction = ProximityZone{0.75};
    o.reward_value = 1.0;
    t.base_spec.objects.push_back(o);
    t.variant_params.push_back({"objects." + o.id + ".color", {}, {}, {}});
    t.variant_params.push_back({"objects." + o.id + ".class_name", {}, {}, {}});
    t.variant_params.push_back({"objects." + o.id + ".reward_value", {}, {}, {}});
  }
  try {
    validate(t.base_spec);
  } catch (const ValidationError& e) {
    throw ArgumentError(e.what());
  }
  t.rules.terminal = SequenceComplete{};
  t.rules.sequence = sequence;
  t.rules.wrong_order_penalty = wrong_order_penalty;
  t.fixed_params = {"environment.bounds", "environment.dt"};
  t.variant_params.push_back({"objects.+", {}, {}, {}});
  t.variant_params.push_back({"environment.lighting", 0.0, 1.0, {}});
  validate(t);
  return t;
}

// -- serialization --------------------------------------------------------------

Json to_json(const TaskDefinition& t) {
  Json variants = Json::array();
  for (const auto& v : t.variant_params) {
    Json j = {{"path", v.path}};
    if (v.min) j["min"] = *v.min;
    if (v.max) j["max"] = *v.max;
    if (!v.choices.empty()) j["choices"] = v.choices;
    variants.push_back(j);
  }
  Json randomized = Json::array();
  for (const auto& r : t.randomized_params) {
    Json d = std::visit(
        [](const auto& x) -> Json {
          using T = std::decay_t<decltype(x)>;
          if constexpr (std::is_same_v<T, UniformDist>)
            return {{"type", "uniform"}, {"min", x.min}, {"max", x.max}};
          else if constexpr (std::is_same_v<T, CategoricalDist>) {
            Json c = {{"type", "categorical"}, {"values", x.values}};
            if (!x.weights.empty()) c["weights"] = x.weights;
            return c;
          } else
            return {{"type", "fixed"}, {"value", x.value}};
        },
        r.distribution);
    randomized.push_back({{"path", r.path}, {"distribution", d}});
  }
  return {{"family", std::string(to_string(t.family))},
          {"label", t.label},
          {"base_spec", to_json(t.base_spec)},
          {"fixed_params", t.fixed_params},
          {"variant_params", variants},
          {"randomized_params", randomized},
          {"rules", to_json(t.rules)},
          {"sensor", to_json(t.sensor)}};
}

TaskDefinition task_from_json(const Json& j) {
  if (!j.is_object()) throw SchemaError("task document must be an object");
  static const std::set<std::string> allowed = {"family",           "label",  "base_spec", "fixed_params",
                                                "variant_params",   "rules",  "sensor",    "randomized_params"};
  for (const auto& [k, _] : j.items())
    if (!allowed.count(k)) throw SchemaError("unknown key '" + k + "' in task document");
  auto strings = [](const Json& v, const std::string& what) {
    std::vector<std::string> out;
    if (!v.is_array()) throw SchemaError("'" + what + "' must be an array of key-paths");
    for (const auto& s : v) {
      if (!s.is_string()) throw SchemaError("'" + what + "' must be an array of key-paths");
      out.push_back(s.get<std::string>());
    }
    return out;
  };
  auto number = [](const Json& v, const std::string& what) {
    if (!v.is_number()) throw SchemaError("'" + what + "' must be a number");
    return v.get<double>();
  };
  TaskDefinition t;
  if (!j.contains("family") || !j["family"].is_string()) throw SchemaError("task requires a string 'family'");
  t.family = family_from_string(j["family"].get<std::string>());
  t.label = std::string(to_string(t.family));
  if (j.contains("label")) {
    if (!j["label"].is_string() || j["label"].get<std::string>().empty())
      throw SchemaError("'label' must be a non-empty string");
    t.label = j["label"].get<std::string>();
  }
  if (!j.contains("base_spec")) throw SchemaError("task requires 'base_spec'");
  t.base_spec = spec_from_json(j["base_spec"]);
  if (j.contains("fixed_params")) t.fixed_params = strings(j["fixed_params"], "fixed_params");
  if (j.contains("variant_params")) {
    if (!j["variant_params"].is_array()) throw SchemaError("'variant_params' must be an array");
    for (const auto& v : j["variant_params"]) {
      if (!v.is_object() || !v.contains("path") || !v["path"].is_string())
        throw SchemaError("each variant param needs a string 'path'");
      VariantParam p;
      p.path = v["path"].get<std::string>();
      for (const auto& [k, x] : v.items()) {
        if (k == "path") continue;
        if (k == "min")
          p.min = number(x, "variant_params.min");
        else if (k == "max")
          p.max = number(x, "variant_params.max");
        else if (k == "choices") {
          if (!x.is_array()) throw SchemaError("'variant_params.choices' must be an array");
          p.choices = x.get<std::vector<Json>>();
        } else
          throw SchemaError("unknown key '" + k + "' in variant param");
      }
      t.variant_params.push_back(std::move(p));
    }
  }
  if (j.contains("randomized_params")) {
    if (!j["randomized_params"].is_array()) throw SchemaError("'randomized_params' must be an array");
    for (const auto& r : j["randomized_params"]) {
      if (!r.is_object() || !r.contains("path") || !r["path"].is_string() || !r.contains("distribution") ||
          !r["distribution"].is_object() || !r["distribution"].contains("type"))
        throw SchemaError("each randomized param needs 'path' and a typed 'distribution'");
      RandomizedParam p;
      p.path = r["path"].get<std::string>();
      const Json& d = r["distribution"];
      const std::string type = d["type"].is_string() ? d["type"].get<std::string>() : "";
      if (type == "uniform") {
        p.distribution = UniformDist{number(d.value("min", Json()), "distribution.min"),
                                     number(d.value("max", Json()), "distribution.max")};
      } else if (type == "categorical") {
        CategoricalDist c;
        if (!d.contains("values") || !d["values"].is_array()) throw SchemaError("categorical needs 'values'");
        c.values = d["values"].get<std::vector<Json>>();
        if (d.contains("weights")) {
          if (!d["weights"].is_array()) throw SchemaError("'weights' must be an array");
          for (const auto& w : d["weights"]) c.weights.push_back(number(w, "distribution.weights"));
        }
        p.distribution = c;
      } else if (type == "fixed") {
        if (!d.contains("value")) throw SchemaError("fixed distribution needs 'value'");
        p.distribution = FixedDist{d["value"]};
      } else {
        throw SchemaError("unknown distribution type '" + type + "'");
      }
      t.randomized_params.push_back(std::move(p));
    }
  }
  if (j.contains("rules")) t.rules = rules_from_json(j["rules"]);
  if (j.contains("sensor")) {
    try {
      t.sensor = sensor_from_json(j["sensor"]);
    } catch (const ConfigError& e) {
      throw SchemaError(e.what());
    }
  }
  validate(t);
  return t;
}

TaskDefinition load_task_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw TaskLoadError("cannot open task file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  try {
    return task_from_json(Json::parse(ss.str()));
  } catch (const Json::parse_error& e) {
    throw TaskLoadError("task file '" + path + "': " + e.what());
  } catch (const Error& e) {
    throw TaskLoadError("task file '" + path + "': " + e.what());
  }
}

}  // namespace l2x
