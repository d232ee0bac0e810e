#ifndef L2X_SIMCORE_HPP
#define L2X_SIMCORE_HPP

#include "l2x/observation.hpp"
#include "l2x/rng.hpp"
#include "l2x/rules.hpp"
#include "l2x/worldspec.hpp"

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace l2x {

struct ObjectState {
  ObjectSpec spec;
  Vector2 position = Vector2::Zero();
  Vector2 velocity = Vector2::Zero();
  int class_id = 0;
  std::uint64_t generation = 0;  // bumps on every (re)spawn
  bool was_inside = false;       // agent was inside the trigger region last step
  bool latched = false;          // fire-once objects that already fired
};

/// Ground-truth world state of one episode.
struct SimState {
  WorldSpec spec;
  EpisodeRules rules;
  Pose pose;
  std::map<std::string, ObjectState> live_objects;
  std::vector<std::string> tracked;  // every id ever live, first-appearance order
  std::map<std::string, int> classes;
  std::int64_t step_count = 0;
  double episode_reward = 0.0;
  bool done = false;
  std::size_t progress = 0;  // scavenger sequence position
  std::uint64_t spawn_count = 0;
  CounterRng rng;
};

struct Action {
  double linear_velocity = 0.0;
  double angular_velocity = 0.0;
  bool interact = false;
};

struct InteractionEvent {
  enum class Kind { Reward, SequenceAdvance, WrongOrder };
  std::string object_id;
  Kind kind = Kind::Reward;
  double reward = 0.0;
  bool destroys = false;
  bool latches = false;
};

struct StepResult {
  Observation observation;
  double reward = 0.0;
  bool done = false;
  nlohmann::json info = nlohmann::json::object();
  std::vector<InteractionEvent> events;
};

/// Builds the initial state; the rng is keyed by spec.seed.
SimState reset(const WorldSpec& spec, const EpisodeRules& rules = {});

/// Advances one timestep in place. Out-of-range velocities are clamped and
/// reported as info["clamped"]. Throws EpisodeFinished once done.
StepResult step(SimState& state, const Action& action, const SensorConfig& sensors = {});

/// Events triggered at the current pose; pure in the state.
std::vector<InteractionEvent> resolve_interactions(const SimState& state, const Action& action);

void advance_motion(SimState& state);

/// Adds an object mid-episode. Throws DuplicateId or ValidationError.
void spawn_object(SimState& state, const ObjectSpec& object);
/// Removes a live object; returns false when the id is not live.
bool destroy_object(SimState& state, const std::string& id);

/// The live world as a spec: current agent pose and object positions.
WorldSpec current_spec(const SimState& state);

/// Full state dump for equality and digest checks.
nlohmann::json state_to_json(const SimState& state);

/// Action as the simulation will apply it.
Action clamp_action(const AgentParams& agent, const Action& action, bool* clamped = nullptr);

}  // namespace l2x

#endif  // L2X_SIMCORE_HPP
