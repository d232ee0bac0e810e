#include "l2x/curriculum.hpp"

#include "l2x/errors.hpp"
#include "l2x/rng.hpp"
#include "l2x/sensors.hpp"

#include <filesystem>
#include <fstream>
#include <istream>
#include <map>
#include <numbers>
#include <ostream>
#include <set>
#include <sstream>

namespace l2x {

namespace {

namespace fs = std::filesystem;

struct ColorObject {
  const char* id;
  const char* color;
  double value;
  Vector2 position;
};

TaskDefinition color_reward_task(char phase) {
  static const ColorObject all[] = {
      {"blue1", "blue", 100.0, Vector2(2.0, 1.2)},
      {"red1", "red", -50.0, Vector2(-2.0, 1.2)},
      {"green1", "green", 50.0, Vector2(0.0, -2.2)},
  };
  const int count = phase == 'a' ? 1 : phase == 'b' ? 2 : 3;
  TaskDefinition t;
  t.family = TaskFamily::FindObjects;
  t.label = std::string("color_reward_") + phase;
  t.base_spec.environment.bounds = Bounds{Vector2(-3, -3), Vector2(3, 3)};
  t.base_spec.environment.episode_step_limit = 200;
  t.fixed_params = {"environment.bounds", "environment.dt", "agent.radius"};
  t.variant_params.push_back({"environment.lighting", 0.0, 1.0, {}});
  for (int k = 0; k < count; ++k) {
    ObjectSpec o;
    o.id = all[k].id;
    o.class_name = all[k].color + std::string("_object");
    o.color = resolve_color(all[k].color);
    o.position = all[k].position;
    o.radius = 0.4;
    o.reward_value = all[k].value;
    t.base_spec.objects.push_back(o);
    const std::string p = "objects." + o.id;
    t.variant_params.push_back({p + ".color", {}, {}, {}});
    t.variant_params.push_back({p + ".reward_value", {}, {}, {}});
    t.randomized_params.push_back({p + ".position.0", UniformDist{o.position.x() - 0.5, o.position.x() + 0.5}});
    t.randomized_params.push_back({p + ".position.1", UniformDist{o.position.y() - 0.5, o.position.y() + 0.5}});
  }
  t.randomized_params.push_back({"agent.start_pose.heading", UniformDist{-std::numbers::pi, std::numbers::pi}});
  t.rules.terminal = AllTargetsConsumed{};
  validate(t);
  return t;
}

const std::map<std::string, std::function<TaskDefinition()>>& builtins() {
  static const std::map<std::string, std::function<TaskDefinition()>> table = {
      {"color_reward_a", [] { return color_reward_task('a'); }},
      {"color_reward_b", [] { return color_reward_task('b'); }},
      {"color_reward_c", [] { return color_reward_task('c'); }},
      {"find_objects", [] { return make_find_objects(1, 0, 0, {2.5, 200, 0.1}); }},
      {"get_to_goal", [] { return make_get_to_goal(Vector2(3, 3), 0.1); }},
      {"select_object", [] { return make_select_object(2, {0.8, 0.2}, {1.0, 1.0}); }},
      {"moving_object", [] { return make_moving_object(0.3, 0); }},
      {"scavenger_hunt", [] { return make_scavenger_hunt({"red_flag", "blue_flag", "green_flag"}, -1.0); }},
  };
  return table;
}

BlockKind kind_from_string(const std::string& s, const std::string& where) {
  if (s == "learn") return BlockKind::Learn;
  if (s == "eval") return BlockKind::Eval;
  throw SchemaError(where + " must be \"learn\" or \"eval\"");
}

std::uint64_t overrides_hash(const std::vector<Override>& overrides) {
  Json j = Json::array();
  for (const auto& [p, v] : overrides) j.push_back({p, v});
  return fnv1a64(j.dump());
}

Json overrides_json(const std::vector<Override>& overrides) {
  Json j = Json::array();
  for (const auto& [p, v] : overrides) j.push_back({{"path", p}, {"value", v}});
  return j;
}

}  // namespace

std::string_view to_string(BlockKind kind) { return kind == BlockKind::Learn ? "learn" : "eval"; }

// -- log records ----------------------------------------------------------------

Json to_json(const EpisodeRecord& r) {
  return {{"lifetime_id", r.lifetime_id},       {"block_index", r.block_index},
          {"block_kind", std::string(to_string(r.block_kind))},
          {"task_name", r.task_name},           {"variant_digest", r.variant_digest},
          {"episode_index", r.episode_index},   {"total_reward", r.total_reward},
          {"steps", r.steps},                   {"wall_time", r.wall_time}};
}

EpisodeRecord record_from_json(const Json& j) {
  if (!j.is_object()) throw LogFormatError("log record must be an object");
  static const std::set<std::string> fields = {"lifetime_id",    "block_index",   "block_kind",
                                               "task_name",      "variant_digest", "episode_index",
                                               "total_reward",   "steps",          "wall_time"};
  for (const auto& [k, _] : j.items())
    if (!fields.count(k)) throw LogFormatError("unknown log field '" + k + "'");
  for (const auto& f : fields)
    if (!j.contains(f)) throw LogFormatError("log record lacks '" + f + "'");
  auto str = [&](const char* k) {
    if (!j[k].is_string()) throw LogFormatError(std::string("'") + k + "' must be a string");
    return j[k].get<std::string>();
  };
  auto integer = [&](const char* k) {
    if (!j[k].is_number_integer()) throw LogFormatError(std::string("'") + k + "' must be an integer");
    return j[k].get<std::int64_t>();
  };
  auto real = [&](const char* k) {
    if (!j[k].is_number()) throw LogFormatError(std::string("'") + k + "' must be a number");
    return j[k].get<double>();
  };
  EpisodeRecord r;
  r.lifetime_id = str("lifetime_id");
  r.block_index = static_cast<int>(integer("block_index"));
  const std::string kind = str("block_kind");
  if (kind == "learn")
    r.block_kind = BlockKind::Learn;
  else if (kind == "eval")
    r.block_kind = BlockKind::Eval;
  else
    throw LogFormatError("'block_kind' must be \"learn\" or \"eval\"");
  r.task_name = str("task_name");
  r.variant_digest = str("variant_digest");
  r.episode_index = integer("episode_index");
  r.total_reward = real("total_reward");
  r.steps = integer("steps");
  r.wall_time = real("wall_time");
  if (r.block_index < 0 || r.episode_index < 0 || r.steps < 0)
    throw LogFormatError("log indices and step counts must be non-negative");
  return r;
}

std::string to_log_line(const EpisodeRecord& r) {
  return to_json(r).dump(-1, ' ', false, Json::error_handler_t::replace);
}

std::vector<EpisodeRecord> read_log(std::istream& in) {
  std::vector<EpisodeRecord> out;
  std::string line;
  std::size_t n = 0;
  while (std::getline(in, line)) {
    ++n;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      out.push_back(record_from_json(Json::parse(line)));
    } catch (const Json::parse_error& e) {
      throw LogFormatError("line " + std::to_string(n) + ": " + e.what());
    } catch (const LogFormatError& e) {
      throw LogFormatError("line " + std::to_string(n) + ": " + e.what());
    }
  }
  return out;
}

std::vector<EpisodeRecord> read_log_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw LogFormatError("cannot open log file '" + path + "'");
  return read_log(in);
}

std::function<void(const EpisodeRecord&)> log_writer(std::ostream& out) {
  return [&out](const EpisodeRecord& r) { out << to_log_line(r) << '\n' << std::flush; };
}

// -- syllabus documents -----------------------------------------------------------

std::shared_ptr<const TaskDefinition> builtin_task(const std::string& name) {
  auto it = builtins().find(name);
  if (it == builtins().end()) throw DanglingReference("unknown builtin task 'builtin:" + name + "'");
  return std::make_shared<const TaskDefinition>(it->second());
}

std::vector<std::string> builtin_task_names() {
  std::vector<std::string> out;
  for (const auto& [k, _] : builtins()) out.push_back(k);
  return out;
}

Syllabus syllabus_from_json(const Json& j, const std::string& base_dir) {
  if (!j.is_object()) throw SchemaError("syllabus must be an object");
  for (const auto& [k, _] : j.items())
    if (k != "lifetime_id" && k != "global_seed" && k != "metadata" && k != "blocks")
      throw SchemaError("unknown key '" + k + "' in syllabus");
  Syllabus s;
  if (!j.contains("lifetime_id") || !j["lifetime_id"].is_string() || j["lifetime_id"].get<std::string>().empty())
    throw SchemaError("syllabus requires a non-empty string 'lifetime_id'");
  s.lifetime_id = j["lifetime_id"].get<std::string>();
  if (j.contains("global_seed")) {
    if (!j["global_seed"].is_number_unsigned()) throw SchemaError("'global_seed' must be a non-negative integer");
    s.global_seed = j["global_seed"].get<std::uint64_t>();
  }
  if (j.contains("metadata")) {
    if (!j["metadata"].is_object()) throw SchemaError("'metadata' must be an object");
    s.metadata = j["metadata"];
  }
  if (!j.contains("blocks") || !j["blocks"].is_array()) throw SchemaError("syllabus requires a 'blocks' array");
  if (j["blocks"].empty()) throw SchemaError("syllabus 'blocks' must not be empty");

  std::map<std::string, std::shared_ptr<const TaskDefinition>> cache;
  auto resolve = [&](const std::string& ref, const std::string& where) {
    if (auto it = cache.find(ref); it != cache.end()) return it->second;
    std::shared_ptr<const TaskDefinition> task;
    if (ref.starts_with("builtin:")) {
      task = builtin_task(ref.substr(8));
    } else {
      fs::path p(ref);
      if (p.is_relative()) p = fs::path(base_dir) / p;
      if (!fs::exists(p)) throw DanglingReference(where + ": task file '" + p.string() + "' does not exist");
      task = std::make_shared<const TaskDefinition>(load_task_file(p.string()));
    }
    cache[ref] = task;
    return task;
  };

  bool any_learn = false;
  for (std::size_t b = 0; b < j["blocks"].size(); ++b) {
    const Json& bj = j["blocks"][b];
    const std::string where = "blocks." + std::to_string(b);
    if (!bj.is_object()) throw SchemaError(where + " must be an object");
    for (const auto& [k, _] : bj.items())
      if (k != "kind" && k != "tags" && k != "entries" && k != "index")
        throw SchemaError("unknown key '" + k + "' in " + where);
    Block block;
    block.index = static_cast<int>(b);
    if (bj.contains("index") && !(bj["index"].is_number_integer() && bj["index"].get<std::int64_t>() == block.index))
      throw SchemaError(where + ".index must equal the block's position");
    if (!bj.contains("kind") || !bj["kind"].is_string()) throw SchemaError(where + ".kind is required");
    block.kind = kind_from_string(bj["kind"].get<std::string>(), where + ".kind");
    any_learn = any_learn || block.kind == BlockKind::Learn;
    if (bj.contains("tags")) {
      if (!bj["tags"].is_array()) throw SchemaError(where + ".tags must be an array of strings");
      for (const auto& t : bj["tags"]) {
        if (!t.is_string()) throw SchemaError(where + ".tags must be an array of strings");
        block.tags.push_back(t.get<std::string>());
      }
    }
    if (!bj.contains("entries") || !bj["entries"].is_array() || bj["entries"].empty())
      throw SchemaError(where + ".entries must be a non-empty array");
    for (std::size_t e = 0; e < bj["entries"].size(); ++e) {
      const Json& ej = bj["entries"][e];
      const std::string ew = where + ".entries." + std::to_string(e);
      if (!ej.is_object()) throw SchemaError(ew + " must be an object");
      for (const auto& [k, _] : ej.items())
        if (k != "task" && k != "overrides" && k != "episodes" && k != "seed")
          throw SchemaError("unknown key '" + k + "' in " + ew);
      SyllabusEntry entry;
      if (!ej.contains("task") || !ej["task"].is_string()) throw SchemaError(ew + ".task must be a string");
      entry.task_ref = ej["task"].get<std::string>();
      if (!ej.contains("episodes") || !ej["episodes"].is_number_integer() || ej["episodes"].get<std::int64_t>() < 1)
        throw SchemaError(ew + ".episodes must be an integer >= 1");
      entry.episodes = ej["episodes"].get<std::int64_t>();
      if (ej.contains("seed")) {
        if (!ej["seed"].is_number_unsigned()) throw SchemaError(ew + ".seed must be a non-negative integer");
        entry.seed = ej["seed"].get<std::uint64_t>();
      }
      if (ej.contains("overrides")) {
        if (!ej["overrides"].is_array()) throw SchemaError(ew + ".overrides must be an array");
        for (const auto& o : ej["overrides"]) {
          if (!o.is_object() || o.size() != 2 || !o.contains("path") || !o["path"].is_string() || !o.contains("value"))
            throw SchemaError(ew + ".overrides entries need exactly 'path' and 'value'");
          entry.overrides.emplace_back(o["path"].get<std::string>(), o["value"]);
        }
      }
      entry.task = resolve(entry.task_ref, ew);
      try {
        (void)realize(entry.task, entry.overrides, 0);
      } catch (const Error& err) {
        throw SchemaError(ew + ".overrides: " + err.what());
      }
      block.entries.push_back(std::move(entry));
    }
    s.blocks.push_back(std::move(block));
  }
  if (!any_learn) throw SchemaError("syllabus needs at least one learn block");
  return s;
}

Syllabus load_syllabus_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DanglingReference("cannot open syllabus file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  Json doc;
  try {
    doc = Json::parse(ss.str());
  } catch (const Json::parse_error& e) {
    throw SyntaxError("syllabus '" + path + "': " + e.what());
  }
  const fs::path parent = fs::path(path).parent_path();
  return syllabus_from_json(doc, parent.empty() ? "." : parent.string());
}

Json to_json(const Syllabus& s) {
  Json blocks = Json::array();
  for (const Block& b : s.blocks) {
    Json entries = Json::array();
    for (const SyllabusEntry& e : b.entries) {
      Json ej = {{"task", e.task_ref}, {"episodes", e.episodes}, {"seed", e.seed}};
      if (!e.overrides.empty()) ej["overrides"] = overrides_json(e.overrides);
      entries.push_back(ej);
    }
    Json bj = {{"kind", std::string(to_string(b.kind))}, {"entries", entries}};
    if (!b.tags.empty()) bj["tags"] = b.tags;
    blocks.push_back(bj);
  }
  return {{"lifetime_id", s.lifetime_id}, {"global_seed", s.global_seed}, {"metadata", s.metadata}, {"blocks", blocks}};
}

// -- execution ---------------------------------------------------------------------

std::uint64_t episode_seed(const Syllabus& s, int block_index, int entry_index, std::int64_t episode_index) {
  const SyllabusEntry& e = s.blocks.at(block_index).entries.at(entry_index);
  if (s.blocks[block_index].kind == BlockKind::Eval)
    return hash_combine(s.global_seed, fnv1a64("eval"), fnv1a64(e.task ? e.task->label : e.task_ref), overrides_hash(e.overrides), e.seed,
                        static_cast<std::uint64_t>(episode_index));
  return hash_combine(s.global_seed, static_cast<std::uint64_t>(block_index), static_cast<std::uint64_t>(entry_index),
                      static_cast<std::uint64_t>(episode_index), e.seed);
}

RunSummary run_syllabus(const Syllabus& s, Agent& agent, const RunOptions& options) {
  RunSummary summary;
  auto guarded = [](const char* what, auto&& fn) {
    try {
      return fn();
    } catch (const AgentFault&) {
      throw;
    } catch (const TaskMismatch&) {
      throw;
    } catch (const std::exception& e) {
      throw AgentFault(std::string("agent raised in ") + what + ": " + e.what());
    }
  };
  for (const Block& block : s.blocks) {
    const bool learning = block.kind == BlockKind::Learn;
    guarded("set_frozen", [&] { agent.set_frozen(!learning); });
    std::int64_t running = 0;
    for (std::size_t ei = 0; ei < block.entries.size(); ++ei) {
      const SyllabusEntry& entry = block.entries[ei];
      const TaskDefinition& task = *entry.task;
      for (std::int64_t ep = 0; ep < entry.episodes; ++ep) {
        const std::uint64_t seed = episode_seed(s, block.index, static_cast<int>(ei), ep);
        VariantInstance inst = realize(entry.task, entry.overrides, seed);
        inst.realized_spec.seed = seed;
        SimState state = reset(inst.realized_spec, task.rules);
        Observation obs = emit(state, task.sensor);

        EpisodeContext ctx;
        ctx.task = &task;
        ctx.spec = &inst.realized_spec;
        ctx.object_ids = state.tracked;
        ctx.learning = learning;
        guarded("begin_episode", [&] { agent.begin_episode(ctx); });
        while (!state.done) {
          const Action action = guarded("act", [&] { return agent.act(obs); });
          StepResult r = step(state, action, task.sensor);
          if (learning) guarded("observe", [&] { agent.observe(r.observation, action, r.reward, r.done); });
          if (options.on_step) options.on_step(block, state, r);
          obs = std::move(r.observation);
        }
        EpisodeRecord rec;
        rec.lifetime_id = s.lifetime_id;
        rec.block_index = block.index;
        rec.block_kind = block.kind;
        rec.task_name = task.label;
        rec.variant_digest = inst.digest();
        rec.episode_index = running++;
        rec.total_reward = state.episode_reward;
        rec.steps = state.step_count;
        rec.wall_time = static_cast<double>(state.step_count) * state.spec.environment.dt;
        if (options.sink) options.sink(rec);
        ++summary.episodes;
        summary.steps += state.step_count;
      }
    }
  }
  return summary;
}

Syllabus build_color_reward_curriculum(std::uint64_t global_seed, std::int64_t learn_episodes,
                                       std::int64_t eval_episodes) {
  Syllabus s;
  s.lifetime_id = "color_reward";
  s.global_seed = global_seed;
  s.metadata = {{"description", "blue reward, red penalty, green reward, mixed under dim light"}};
  auto entry = [](const std::string& name, std::int64_t episodes, std::vector<Override> overrides = {}) {
    SyllabusEntry e;
    e.task_ref = "builtin:" + name;
    e.task = builtin_task(name);
    e.episodes = episodes;
    e.overrides = std::move(overrides);
    return e;
  };
  auto eval_block = [&] {
    Block b;
    b.kind = BlockKind::Eval;
    for (const char* name : {"color_reward_a", "color_reward_b", "color_reward_c"})
      b.entries.push_back(entry(name, eval_episodes));
    return b;
  };
  auto learn_block = [&](std::string tag, std::vector<SyllabusEntry> entries) {
    Block b;
    b.kind = BlockKind::Learn;
    b.tags = {std::move(tag)};
    b.entries = std::move(entries);
    return b;
  };
  const std::vector<Override> dim = {{"environment.lighting", 0.5}};
  s.blocks.push_back(eval_block());
  s.blocks.push_back(learn_block("phase_a", {entry("color_reward_a", learn_episodes)}));
  s.blocks.push_back(eval_block());
  s.blocks.push_back(learn_block("phase_b", {entry("color_reward_b", learn_episodes)}));
  s.blocks.push_back(eval_block());
  s.blocks.push_back(learn_block("phase_c", {entry("color_reward_c", learn_episodes)}));
  s.blocks.push_back(eval_block());
  s.blocks.push_back(learn_block("phase_d", {entry("color_reward_b", learn_episodes / 2, dim),
                                             entry("color_reward_c", learn_episodes - learn_episodes / 2, dim)}));
  s.blocks.push_back(eval_block());
  for (std::size_t i = 0; i < s.blocks.size(); ++i) s.blocks[i].index = static_cast<int>(i);
  return s;
}

Syllabus make_ste_syllabus(const std::string& task_ref, std::shared_ptr<const TaskDefinition> task,
                           std::int64_t episodes, std::uint64_t seed) {
  if (episodes < 1) throw ArgumentError("episodes must be >= 1");
  Syllabus s;
  s.lifetime_id = "ste_" + task->label;
  s.global_seed = seed;
  s.metadata = {{"mode", "ste"}};
  Block b;
  b.kind = BlockKind::Learn;
  b.tags = {"ste"};
  SyllabusEntry e;
  e.task_ref = task_ref;
  e.task = std::move(task);
  e.episodes = episodes;
  b.entries.push_back(std::move(e));
  s.blocks.push_back(std::move(b));
  return s;
}

}  // namespace l2x
