#ifndef L2X_TASKS_HPP
#define L2X_TASKS_HPP

#include "l2x/observation.hpp"
#include "l2x/rules.hpp"
#include "l2x/worldspec.hpp"

#include <memory>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

namespace l2x {

enum class TaskFamily { FindObjects, GetToGoal, SelectObject, MovingObject, ScavengerHunt };

std::string_view to_string(TaskFamily family);
TaskFamily family_from_string(std::string_view name);

/// A key-path that may be overridden to produce a static variant. Numeric
/// values must respect [min, max] when given; `choices` restricts values.
struct VariantParam {
  std::string path;
  std::optional<double> min;
  std::optional<double> max;
  std::vector<Json> choices;
};

struct UniformDist {
  double min = 0.0;
  double max = 1.0;
};
struct CategoricalDist {
  std::vector<Json> values;
  std::vector<double> weights;  // empty means equal weights
};
struct FixedDist {
  Json value;
};
using Distribution = std::variant<UniformDist, CategoricalDist, FixedDist>;

struct RandomizedParam {
  std::string path;
  Distribution distribution;
};

struct TaskDefinition {
  TaskFamily family = TaskFamily::FindObjects;
  std::string label;  // identity used in logs and metrics
  WorldSpec base_spec;
  std::vector<std::string> fixed_params;
  std::vector<VariantParam> variant_params;
  std::vector<RandomizedParam> randomized_params;
  EpisodeRules rules;
  SensorConfig sensor;
};

/// Key-path sets disjoint (no path equal to or prefixing one in another
/// set), every path resolving in the base spec, rules consistent with it.
void validate(const TaskDefinition& task);

struct VariantInstance {
  std::shared_ptr<const TaskDefinition> task;
  std::vector<Override> overrides;
  std::vector<Override> sampled;
  WorldSpec realized_spec;

  /// Stable hash of overrides and samples, 16 hex digits.
  std::string digest() const;
};

/// Applies `overrides` (restricted to variant params; RangeError or
/// UnknownPath otherwise) then samples every randomized param from
/// streams keyed by `rng_seed`.
VariantInstance realize(std::shared_ptr<const TaskDefinition> task, std::span<const Override> overrides,
                        std::uint64_t rng_seed);

struct ArenaOptions {
  double half_extent = 5.0;  // square arena [-h, h]^2
  std::int64_t step_limit = 500;
  double dt = 0.1;
};

TaskDefinition make_find_objects(int targets, int distractors, std::uint64_t rng_seed,
                                 const ArenaOptions& arena = {});
TaskDefinition make_get_to_goal(const Vector2& goal, double shaping_alpha, const ArenaOptions& arena = {});
TaskDefinition make_select_object(int arms, const std::vector<double>& probabilities,
                                  const std::vector<double>& values);
TaskDefinition make_moving_object(double speed, std::uint64_t rng_seed = 0, const ArenaOptions& arena = {});
TaskDefinition make_scavenger_hunt(const std::vector<std::string>& sequence, double wrong_order_penalty,
                                   const ArenaOptions& arena = {});

Json to_json(const TaskDefinition& task);
/// Throws SchemaError / ValidationError.
TaskDefinition task_from_json(const Json& value);
/// Throws TaskLoadError when the file is missing or invalid.
TaskDefinition load_task_file(const std::string& path);

}  // namespace l2x

#endif  // L2X_TASKS_HPP
