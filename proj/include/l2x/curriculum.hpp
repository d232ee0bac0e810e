#ifndef L2X_CURRICULUM_HPP
#define L2X_CURRICULUM_HPP

#include "l2x/simcore.hpp"
#include "l2x/tasks.hpp"

#include <functional>
#include <iosfwd>
#include <memory>
#include <string>
#include <vector>

namespace l2x {

enum class BlockKind { Learn, Eval };

std::string_view to_string(BlockKind kind);

struct SyllabusEntry {
  std::string task_ref;  // file path as written, or "builtin:<name>"
  std::shared_ptr<const TaskDefinition> task;
  std::vector<Override> overrides;
  std::int64_t episodes = 1;
  std::uint64_t seed = 0;
};

struct Block {
  int index = 0;
  BlockKind kind = BlockKind::Learn;
  std::vector<std::string> tags;
  std::vector<SyllabusEntry> entries;
};

struct Syllabus {
  std::string lifetime_id;
  std::uint64_t global_seed = 0;
  Json metadata = Json::object();
  std::vector<Block> blocks;
};

/// One line of a `.l2log.jsonl` lifetime log.
struct EpisodeRecord {
  std::string lifetime_id;
  int block_index = 0;
  BlockKind block_kind = BlockKind::Learn;
  std::string task_name;
  std::string variant_digest;
  std::int64_t episode_index = 0;  // running index within the block
  double total_reward = 0.0;
  std::int64_t steps = 0;
  double wall_time = 0.0;  // simulated seconds, steps * dt

  bool operator==(const EpisodeRecord&) const = default;
};

Json to_json(const EpisodeRecord& record);
/// Throws LogFormatError on missing, extra or mistyped fields.
EpisodeRecord record_from_json(const Json& value);
std::string to_log_line(const EpisodeRecord& record);
/// Throws LogFormatError naming the offending line.
std::vector<EpisodeRecord> read_log(std::istream& in);
std::vector<EpisodeRecord> read_log_file(const std::string& path);

struct EpisodeContext {
  const TaskDefinition* task = nullptr;
  const WorldSpec* spec = nullptr;  // realized world of this episode
  std::vector<std::string> object_ids;
  bool learning = true;
};

/// What the runner requires of an attached agent.
class Agent {
 public:
  virtual ~Agent() = default;
  virtual void begin_episode(const EpisodeContext&) {}
  virtual Action act(const Observation& observation) = 0;
  /// Called only inside Learn blocks with the observation after the action.
  virtual void observe(const Observation& next, const Action& action, double reward, bool done) = 0;
  virtual void set_frozen(bool frozen) = 0;
};

/// Resolves "builtin:<name>"; throws DanglingReference for unknown names.
std::shared_ptr<const TaskDefinition> builtin_task(const std::string& name);
std::vector<std::string> builtin_task_names();

/// Relative task paths resolve against `base_dir`. Throws SchemaError,
/// DanglingReference or TaskLoadError.
Syllabus syllabus_from_json(const Json& document, const std::string& base_dir = ".");
Syllabus load_syllabus_file(const std::string& path);
Json to_json(const Syllabus& syllabus);

/// Learn-block episodes are keyed by position in the lifetime. Eval-block
/// episodes are keyed by the entry content so every evaluation of a task
/// replays the same worlds.
std::uint64_t episode_seed(const Syllabus& syllabus, int block_index, int entry_index, std::int64_t episode_index);

struct RunSummary {
  std::int64_t episodes = 0;
  std::int64_t steps = 0;
};

struct RunOptions {
  std::function<void(const EpisodeRecord&)> sink;
  /// Test hook, called after every simulation step.
  std::function<void(const Block&, const SimState&, const StepResult&)> on_step;
};

/// Executes the blocks in order. Agent exceptions abort with AgentFault;
/// records already handed to the sink stay valid.
RunSummary run_syllabus(const Syllabus& syllabus, Agent& agent, const RunOptions& options);

/// Sink writing one flushed line per record.
std::function<void(const EpisodeRecord&)> log_writer(std::ostream& out);

/// Blue capture rewarded, then a penalized red object, then a rewarded green
/// one, then the last two phases mixed under dimmer light, each learning
/// phase bracketed by evaluation blocks.
Syllabus build_color_reward_curriculum(std::uint64_t global_seed = 7, std::int64_t learn_episodes = 200,
                                       std::int64_t eval_episodes = 20);

/// Single learn block on one task, the single-task-expert reference run.
Syllabus make_ste_syllabus(const std::string& task_ref, std::shared_ptr<const TaskDefinition> task,
                           std::int64_t episodes, std::uint64_t seed);

}  // namespace l2x

#endif  // L2X_CURRICULUM_HPP
