#include "l2x/simcore.hpp"

#include "l2x/errors.hpp"
#include "l2x/sensors.hpp"

#include <algorithm>
#include <cmath>

namespace l2x {

namespace {

ObjectState make_object_state(const ObjectSpec& spec, int class_id, std::uint64_t generation) {
  ObjectState o;
  o.spec = spec;
  o.position = spec.position;
  if (const auto* lm = std::get_if<LinearMotion>(&spec.motion)) o.velocity = lm->velocity;
  o.class_id = class_id;
  o.generation = generation;
  return o;
}

int class_id_for(SimState& state, const std::string& class_name) {
  auto it = state.classes.find(class_name);
  if (it != state.classes.end()) return it->second;
  int next = 1;
  for (const auto& [_, id] : state.classes) next = std::max(next, id + 1);
  state.classes.emplace(class_name, next);
  return next;
}

// Whether the agent is inside the object's trigger region.
bool inside_trigger(const SimState& state, const ObjectState& o) {
  const double d = (o.position - state.pose.position).norm();
  return std::visit(
      [&](const auto& m) {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, Contact>)
          return d <= state.spec.agent.radius + o.spec.radius;
        else
          return d <= m.zone_radius;
      },
      o.spec.interaction);
}

double snap(double v, double max) {
  if (std::abs(v) < max / 2) return 0.0;
  return v > 0 ? max : -max;
}

void reflect_axis(double& p, double& v, double lo, double hi) {
  if (p > hi) {
    p = std::max(lo, 2 * hi - p);
    v = -std::abs(v);
  } else if (p < lo) {
    p = std::min(hi, 2 * lo - p);
    v = std::abs(v);
  } else if (p == hi && v > 0) {
    v = -v;
  } else if (p == lo && v < 0) {
    v = -v;
  }
}

bool any_target_live(const SimState& state) {
  return std::any_of(state.live_objects.begin(), state.live_objects.end(),
                     [](const auto& kv) { return kv.second.spec.reward_value > 0; });
}

}  // namespace

SimState reset(const WorldSpec& spec, const EpisodeRules& rules) {
  SimState s;
  s.spec = spec;
  s.rules = rules;
  s.pose = spec.agent.start_pose;
  s.rng = CounterRng(spec.seed);
  s.classes = class_ids(spec);
  for (const ObjectSpec& o : spec.objects) {
    s.live_objects.emplace(o.id, make_object_state(o, s.classes.at(o.class_name), 0));
    s.tracked.push_back(o.id);
  }
  return s;
}

Action clamp_action(const AgentParams& agent, const Action& a, bool* clamped) {
  Action out = a;
  auto clamp = [&](double v, double max) {
    if (std::isnan(v)) {
      if (clamped) *clamped = true;
      return 0.0;
    }
    double c = std::clamp(v, -max, max);
    if (c != v && clamped) *clamped = true;
    return c;
  };
  if (clamped) *clamped = false;
  out.linear_velocity = clamp(a.linear_velocity, agent.max_linear_speed);
  out.angular_velocity = clamp(a.angular_velocity, agent.max_angular_speed);
  if (agent.action_mode == ActionMode::Discretized) {
    out.linear_velocity = snap(out.linear_velocity, agent.max_linear_speed);
    out.angular_velocity = snap(out.angular_velocity, agent.max_angular_speed);
  }
  out.interact = agent.interact_enabled && a.interact;
  return out;
}

void advance_motion(SimState& state) {
  const Bounds& b = state.spec.environment.bounds;
  const double dt = state.spec.environment.dt;
  for (auto& [_, o] : state.live_objects) {
    if (!std::holds_alternative<LinearMotion>(o.spec.motion)) continue;
    o.position += o.velocity * dt;
    reflect_axis(o.position.x(), o.velocity.x(), b.min.x(), b.max.x());
    reflect_axis(o.position.y(), o.velocity.y(), b.min.y(), b.max.y());
  }
}

std::vector<InteractionEvent> resolve_interactions(const SimState& state, const Action& action) {
  struct Candidate {
    double distance;
    const ObjectState* object;
  };
  std::vector<Candidate> hits;
  for (const auto& [id, o] : state.live_objects) {
    if (!inside_trigger(state, o)) continue;
    const bool fires = std::visit(
        [&](const auto& m) {
          using T = std::decay_t<decltype(m)>;
          if constexpr (std::is_same_v<T, ExplicitInteract>)
            return action.interact && state.spec.agent.interact_enabled;
          else
            return !o.was_inside && !o.latched;
        },
        o.spec.interaction);
    if (fires) hits.push_back({(o.position - state.pose.position).norm(), &o});
  }
  std::stable_sort(hits.begin(), hits.end(),
                   [](const Candidate& a, const Candidate& b) { return a.distance < b.distance; });
  if (std::holds_alternative<SelectionMade>(state.rules.terminal) && hits.size() > 1) hits.resize(1);

  const auto& seq = state.rules.sequence;
  std::size_t progress = state.progress;
  const CounterRng reward_rng = state.rng.split("reward");

  std::vector<InteractionEvent> events;
  for (const Candidate& c : hits) {
    const ObjectState& o = *c.object;
    InteractionEvent ev;
    ev.object_id = o.spec.id;
    const bool explicit_model = std::holds_alternative<ExplicitInteract>(o.spec.interaction);
    auto sampled = [&] {
      const double u =
          reward_rng.split(o.spec.id).split(o.generation).uniform(static_cast<std::uint64_t>(state.step_count));
      return u < o.spec.reward_probability ? o.spec.reward_value : 0.0;
    };
    const bool in_sequence = std::find(seq.begin(), seq.end(), o.spec.id) != seq.end();
    if (in_sequence && (progress >= seq.size() || seq[progress] != o.spec.id)) {
      ev.kind = InteractionEvent::Kind::WrongOrder;
      ev.reward = state.rules.wrong_order_penalty;
    } else {
      ev.kind = in_sequence ? InteractionEvent::Kind::SequenceAdvance : InteractionEvent::Kind::Reward;
      ev.reward = sampled();
      ev.destroys = o.spec.destroy_on_interact;
      ev.latches = !explicit_model;
      if (in_sequence) ++progress;
    }
    events.push_back(std::move(ev));
  }
  return events;
}

void spawn_object(SimState& state, const ObjectSpec& object) {
  if (state.live_objects.count(object.id)) throw DuplicateId("object id '" + object.id + "' is already live");
  validate_object(object, state.spec.environment);
  const int cid = class_id_for(state, object.class_name);
  state.live_objects.emplace(object.id, make_object_state(object, cid, ++state.spawn_count));
  if (std::find(state.tracked.begin(), state.tracked.end(), object.id) == state.tracked.end())
    state.tracked.push_back(object.id);
}

bool destroy_object(SimState& state, const std::string& id) { return state.live_objects.erase(id) > 0; }

StepResult step(SimState& state, const Action& requested, const SensorConfig& sensors) {
  if (state.done) throw EpisodeFinished("step called after the episode finished");
  const EnvironmentParams& env = state.spec.environment;
  StepResult result;

  bool clamped = false;
  const Action action = clamp_action(state.spec.agent, requested, &clamped);
  result.info["clamped"] = clamped;

  // heading first, then translation along the new heading
  state.pose.heading = wrap_angle(state.pose.heading + action.angular_velocity * env.dt);
  state.pose.position = env.bounds.clamp(state.pose.position +
                                         action.linear_velocity * env.dt * heading_vector(state.pose.heading));

  advance_motion(state);

  double reward = 0.0;
  result.events = resolve_interactions(state, action);
  for (const InteractionEvent& ev : result.events) {
    reward += ev.reward;
    if (ev.kind == InteractionEvent::Kind::SequenceAdvance) ++state.progress;
    if (ev.destroys)
      state.live_objects.erase(ev.object_id);
    else if (ev.latches)
      state.live_objects.at(ev.object_id).latched = true;
  }
  for (auto& [_, o] : state.live_objects) o.was_inside = inside_trigger(state, o);

  const GoalReached* goal = std::get_if<GoalReached>(&state.rules.terminal);
  if (const auto* pd = std::get_if<PotentialDistance>(&state.rules.shaping); pd && goal) {
    const double shaping = -pd->alpha * (state.pose.position - goal->goal).norm();
    result.info["shaping"] = shaping;
    reward += shaping;
  }

  ++state.step_count;

  std::string terminal;
  if (goal && (state.pose.position - goal->goal).norm() <= goal->radius) {
    reward += goal->arrival_reward;
    terminal = "goal_reached";
  } else if (std::holds_alternative<AllTargetsConsumed>(state.rules.terminal) && !any_target_live(state)) {
    terminal = "all_targets_consumed";
  } else if (std::holds_alternative<SelectionMade>(state.rules.terminal) && !result.events.empty()) {
    terminal = "selection_made";
  } else if (std::holds_alternative<SequenceComplete>(state.rules.terminal) &&
             state.progress >= state.rules.sequence.size()) {
    terminal = "sequence_complete";
  } else if (state.step_count >= env.episode_step_limit) {
    terminal = "step_limit";
  }
  state.done = !terminal.empty();
  if (state.done) result.info["terminal"] = terminal;
  result.info["events"] = result.events.size();

  state.episode_reward += reward;
  result.reward = reward;
  result.done = state.done;
  result.observation = emit(state, sensors);
  return result;
}

WorldSpec current_spec(const SimState& state) {
  WorldSpec spec = state.spec;
  spec.agent.start_pose = state.pose;
  spec.objects.clear();
  for (const std::string& id : state.tracked) {
    auto it = state.live_objects.find(id);
    if (it == state.live_objects.end()) continue;
    ObjectSpec o = it->second.spec;
    o.position = it->second.position;
    if (auto* lm = std::get_if<LinearMotion>(&o.motion)) lm->velocity = it->second.velocity;
    spec.objects.push_back(std::move(o));
  }
  return spec;
}

nlohmann::json state_to_json(const SimState& s) {
  nlohmann::json objects = nlohmann::json::object();
  for (const auto& [id, o] : s.live_objects) {
    objects[id] = {{"spec", to_json(o.spec)},
                   {"position", {o.position.x(), o.position.y()}},
                   {"velocity", {o.velocity.x(), o.velocity.y()}},
                   {"class_id", o.class_id},
                   {"generation", o.generation},
                   {"was_inside", o.was_inside},
                   {"latched", o.latched}};
  }
  return {{"spec", to_json(s.spec)},
          {"rules", to_json(s.rules)},
          {"pose", {s.pose.position.x(), s.pose.position.y(), s.pose.heading}},
          {"live_objects", objects},
          {"tracked", s.tracked},
          {"classes", s.classes},
          {"step_count", s.step_count},
          {"episode_reward", s.episode_reward},
          {"done", s.done},
          {"progress", s.progress},
          {"spawn_count", s.spawn_count},
          {"rng_key", s.rng.key()}};
}

// -- rules serialization ----------------------------------------------------

nlohmann::json to_json(const EpisodeRules& rules) {
  nlohmann::json terminal = std::visit(
      [](const auto& r) -> nlohmann::json {
        using T = std::decay_t<decltype(r)>;
        if constexpr (std::is_same_v<T, StepLimitOnly>)
          return {{"type", "step_limit_only"}};
        else if constexpr (std::is_same_v<T, GoalReached>)
          return {{"type", "goal_reached"},
                  {"goal", {r.goal.x(), r.goal.y()}},
                  {"radius", r.radius},
                  {"arrival_reward", r.arrival_reward}};
        else if constexpr (std::is_same_v<T, AllTargetsConsumed>)
          return {{"type", "all_targets_consumed"}};
        else if constexpr (std::is_same_v<T, SelectionMade>)
          return {{"type", "selection_made"}};
        else
          return {{"type", "sequence_complete"}};
      },
      rules.terminal);
  nlohmann::json shaping = {{"type", "none"}};
  if (const auto* pd = std::get_if<PotentialDistance>(&rules.shaping))
    shaping = {{"type", "potential_distance"}, {"alpha", pd->alpha}};
  return {{"terminal", terminal},
          {"shaping", shaping},
          {"sequence", rules.sequence},
          {"wrong_order_penalty", rules.wrong_order_penalty}};
}

EpisodeRules rules_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw SchemaError("'rules' must be an object");
  EpisodeRules rules;
  auto number = [](const nlohmann::json& v, const std::string& path) {
    if (!v.is_number()) throw SchemaError("'" + path + "' must be a number");
    return v.get<double>();
  };
  for (const auto& [key, v] : j.items()) {
    if (key == "terminal") {
      if (!v.is_object() || !v.contains("type") || !v["type"].is_string())
        throw SchemaError("'rules.terminal' must be an object with a string 'type'");
      const std::string type = v["type"].get<std::string>();
      auto only = [&](std::initializer_list<std::string_view> allowed) {
        for (const auto& [k, _] : v.items())
          if (std::find(allowed.begin(), allowed.end(), k) == allowed.end())
            throw SchemaError("unknown key 'rules.terminal." + k + "'");
      };
      if (type == "step_limit_only") {
        only({"type"});
        rules.terminal = StepLimitOnly{};
      } else if (type == "goal_reached") {
        only({"type", "goal", "radius", "arrival_reward"});
        GoalReached g;
        if (!v.contains("goal") || !v["goal"].is_array() || v["goal"].size() != 2)
          throw SchemaError("'rules.terminal.goal' must be an array of two numbers");
        g.goal = Vector2(number(v["goal"][0], "rules.terminal.goal.0"), number(v["goal"][1], "rules.terminal.goal.1"));
        if (v.contains("radius")) g.radius = number(v["radius"], "rules.terminal.radius");
        if (v.contains("arrival_reward")) g.arrival_reward = number(v["arrival_reward"], "rules.terminal.arrival_reward");
        if (!(g.radius >= 0)) throw ValidationError("'rules.terminal.radius' must be >= 0");
        rules.terminal = g;
      } else if (type == "all_targets_consumed") {
        only({"type"});
        rules.terminal = AllTargetsConsumed{};
      } else if (type == "selection_made") {
        only({"type"});
        rules.terminal = SelectionMade{};
      } else if (type == "sequence_complete") {
        only({"type"});
        rules.terminal = SequenceComplete{};
      } else {
        throw SchemaError("unknown terminal rule '" + type + "'");
      }
    } else if (key == "shaping") {
      if (!v.is_object() || !v.contains("type") || !v["type"].is_string())
        throw SchemaError("'rules.shaping' must be an object with a string 'type'");
      const std::string type = v["type"].get<std::string>();
      if (type == "none") {
        if (v.size() != 1) throw SchemaError("'rules.shaping' of type none takes no parameters");
        rules.shaping = NoShaping{};
      } else if (type == "potential_distance") {
        for (const auto& [k, _] : v.items())
          if (k != "type" && k != "alpha") throw SchemaError("unknown key 'rules.shaping." + k + "'");
        PotentialDistance pd{v.contains("alpha") ? number(v["alpha"], "rules.shaping.alpha") : 0.0};
        if (!(pd.alpha >= 0)) throw ValidationError("'rules.shaping.alpha' must be >= 0");
        rules.shaping = pd;
      } else {
        throw SchemaError("unknown shaping rule '" + type + "'");
      }
    } else if (key == "sequence") {
      if (!v.is_array()) throw SchemaError("'rules.sequence' must be an array of ids");
      for (const auto& id : v) {
        if (!id.is_string()) throw SchemaError("'rules.sequence' must be an array of ids");
        rules.sequence.push_back(id.get<std::string>());
      }
    } else if (key == "wrong_order_penalty") {
      rules.wrong_order_penalty = number(v, "rules.wrong_order_penalty");
    } else {
      throw SchemaError("unknown key 'rules." + key + "'");
    }
  }
  std::vector<std::string> sorted = rules.sequence;
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
    throw ValidationError("'rules.sequence' ids must be distinct");
  if (std::holds_alternative<PotentialDistance>(rules.shaping) && !std::holds_alternative<GoalReached>(rules.terminal))
    throw ValidationError("'rules.shaping' potential_distance requires a goal_reached terminal rule");
  return rules;
}

}  // namespace l2x
