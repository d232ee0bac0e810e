#include "l2x/protocol.hpp"

#include "l2x/errors.hpp"
#include "l2x/sensors.hpp"

#include <istream>
#include <ostream>

namespace l2x {

namespace {

std::string dump_line(const Json& j) { return j.dump(-1, ' ', false, Json::error_handler_t::replace); }

bool blank(std::string_view line) { return line.find_first_not_of(" \t\r") == std::string_view::npos; }

double number_field(const Json& payload, const char* key, double fallback) {
  if (!payload.contains(key)) return fallback;
  if (!payload[key].is_number()) throw SchemaError(std::string("'payload.") + key + "' must be a number");
  return payload[key].get<double>();
}

void check_rules_against(const EpisodeRules& rules, const WorldSpec& spec) {
  for (const std::string& id : rules.sequence)
    if (!spec.find_object(id)) throw ValidationError("'rules.sequence' names unknown object '" + id + "'");
  if (const auto* g = std::get_if<GoalReached>(&rules.terminal); g && !spec.environment.bounds.contains(g->goal))
    throw ValidationError("'rules.terminal.goal' lies outside the environment bounds");
}

}  // namespace

std::string hello_line() {
  return dump_line({{"id", 0}, {"channel", "hello"}, {"ok", true}, {"result", {{"version", kProtocolVersion}}}});
}

std::string error_line(const Json& id, std::string_view code, std::string_view message) {
  return dump_line({{"id", id}, {"ok", false}, {"error", {{"code", code}, {"message", message}}}});
}

std::optional<std::string> Session::handle_line(std::string_view line) {
  if (blank(line)) return std::nullopt;
  auto fail = [&](const Json& id, const Json& channel, std::string_view code, std::string_view message) {
    last_error_ = {{"code", code}, {"message", message}};
    ++messages_;
    Json r = {{"id", id}, {"ok", false}, {"error", {{"code", code}, {"message", message}}}};
    if (!channel.is_null()) r["channel"] = channel;
    return dump_line(r);
  };
  if (line.size() > kMaxFrameBytes) return oversized_frame();

  Json frame;
  try {
    frame = Json::parse(line.begin(), line.end());
  } catch (const Json::exception& e) {
    return fail(nullptr, nullptr, "malformed-frame", e.what());
  }
  if (!frame.is_object()) return fail(nullptr, nullptr, "malformed-frame", "frame must be a JSON object");
  if (!frame.contains("id") || !frame["id"].is_number_unsigned())
    return fail(nullptr, nullptr, "bad-envelope", "'id' must be a non-negative integer");
  const Json id = frame["id"];
  const std::uint64_t id_value = id.get<std::uint64_t>();
  for (const auto& [k, _] : frame.items())
    if (k != "id" && k != "channel" && k != "payload")
      return fail(id, nullptr, "bad-envelope", "unknown envelope key '" + k + "'");
  if (!frame.contains("channel") || !frame["channel"].is_string())
    return fail(id, nullptr, "bad-envelope", "'channel' must be a string");
  const Json channel = frame["channel"];
  if (last_id_ && id_value <= *last_id_)
    return fail(id, channel, "bad-id", "message ids must be strictly increasing");
  last_id_ = id_value;
  const Json payload = frame.contains("payload") ? frame["payload"] : Json::object();

  try {
    Json result = dispatch(channel.get<std::string>(), payload);
    ++messages_;
    return dump_line({{"id", id}, {"channel", channel}, {"ok", true}, {"result", std::move(result)}});
  } catch (const Error& e) {
    return fail(id, channel, e.code(), e.what());
  } catch (const Json::exception& e) {
    return fail(id, channel, "schema-error", e.what());
  } catch (const std::exception& e) {
    return fail(id, channel, "internal-error", e.what());
  }
}

std::string Session::oversized_frame() {
  last_error_ = {{"code", "frame-too-large"}, {"message", "frame exceeds 1 MiB"}};
  ++messages_;
  return error_line(nullptr, "frame-too-large", "frame exceeds 1 MiB");
}

Json Session::dispatch(const std::string& channel, const Json& payload) {
  if (channel == "reset") return handle_reset(payload);
  if (channel == "step") return handle_step(payload);
  if (channel == "query_state") return handle_query_state();
  if (channel == "debug") return handle_debug(payload);
  if (channel == "hello") {
    if (!payload.is_object() || !payload.contains("version") || payload["version"] != kProtocolVersion)
      throw VersionMismatch("server speaks " + std::string(kProtocolVersion));
    return {{"version", kProtocolVersion}};
  }
  throw UnknownChannel("unknown channel '" + channel + "'");
}

Json Session::handle_reset(const Json& payload) {
  if (!payload.is_object()) throw SchemaError("reset payload must be a world document or {world, sensor, rules}");
  WorldSpec spec;
  SensorConfig sensor;
  EpisodeRules rules;
  if (payload.contains("world")) {
    for (const auto& [k, _] : payload.items())
      if (k != "world" && k != "sensor" && k != "rules") throw SchemaError("unknown key 'payload." + k + "'");
    spec = spec_from_json(payload["world"]);
    if (payload.contains("sensor")) sensor = sensor_from_json(payload["sensor"]);
    if (payload.contains("rules")) rules = rules_from_json(payload["rules"]);
  } else {
    spec = spec_from_json(payload);
  }
  check_rules_against(rules, spec);
  SimState state = reset(spec, rules);
  Observation obs = emit(state, sensor);
  episode_ = std::move(state);
  sensor_ = sensor;
  return {{"observation", to_json(obs)}, {"step_count", 0}};
}

Json Session::handle_step(const Json& payload) {
  if (!episode_) throw NoEpisode("step before any reset");
  if (episode_->done) throw EpisodeFinished("the episode has finished; reset to start another");
  if (!payload.is_object()) throw SchemaError("step payload must be an object");
  for (const auto& [k, _] : payload.items())
    if (k != "linear_velocity" && k != "angular_velocity" && k != "interact" && k != "spawn")
      throw SchemaError("unknown key 'payload." + k + "'");
  Action a;
  a.linear_velocity = number_field(payload, "linear_velocity", 0.0);
  a.angular_velocity = number_field(payload, "angular_velocity", 0.0);
  if (payload.contains("interact")) {
    if (!payload["interact"].is_boolean()) throw SchemaError("'payload.interact' must be a boolean");
    a.interact = payload["interact"].get<bool>();
  }
  if (payload.contains("spawn")) {
    if (!payload["spawn"].is_array()) throw SchemaError("'payload.spawn' must be an array of objects");
    // validate the whole batch on a copy so a bad spawn leaves the episode untouched
    SimState trial = *episode_;
    for (const Json& o : payload["spawn"]) spawn_object(trial, object_from_json(o));
    *episode_ = std::move(trial);
  }
  StepResult r = step(*episode_, a, sensor_);
  ++total_steps_;
  return {{"observation", to_json(r.observation)}, {"reward", r.reward}, {"done", r.done}, {"info", r.info}};
}

Json Session::handle_query_state() const {
  if (!episode_) throw NoEpisode("query_state before any reset");
  return {{"world", to_json(current_spec(*episode_))},
          {"step_count", episode_->step_count},
          {"episode_reward", episode_->episode_reward},
          {"done", episode_->done}};
}

Json Session::handle_debug(const Json& payload) const {
  Json r = {{"version", kProtocolVersion},
            {"messages_handled", messages_},
            {"total_steps", total_steps_},
            {"episode_steps", episode_ ? episode_->step_count : 0},
            {"live_objects", episode_ ? episode_->live_objects.size() : 0},
            {"last_error", last_error_}};
  if (payload.is_object() && payload.contains("echo")) r["echo"] = payload["echo"];
  return r;
}

void serve_stream(std::istream& in, std::ostream& out) {
  Session session;
  out << hello_line() << '\n' << std::flush;
  std::string line;
  while (std::getline(in, line)) {
    if (auto response = session.handle_line(line)) out << *response << '\n' << std::flush;
  }
}

}  // namespace l2x
