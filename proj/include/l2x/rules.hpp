#ifndef L2X_RULES_HPP
#define L2X_RULES_HPP

#include "l2x/geometry.hpp"

#include <json.hpp>

#include <string>
#include <variant>
#include <vector>

namespace l2x {

struct StepLimitOnly {
  bool operator==(const StepLimitOnly&) const = default;
};
/// Ends the episode (with `arrival_reward`) once the agent center is within
/// `radius` of `goal`.
struct GoalReached {
  Vector2 goal = Vector2::Zero();
  double radius = 0.5;
  double arrival_reward = 1.0;
  bool operator==(const GoalReached& o) const {
    return goal == o.goal && radius == o.radius && arrival_reward == o.arrival_reward;
  }
};
/// Ends once no live object with positive reward_value remains.
struct AllTargetsConsumed {
  bool operator==(const AllTargetsConsumed&) const = default;
};
/// Ends on the first interaction event.
struct SelectionMade {
  bool operator==(const SelectionMade&) const = default;
};
/// Ends once every id of the scavenger sequence has been visited in order.
struct SequenceComplete {
  bool operator==(const SequenceComplete&) const = default;
};
using TerminalRule =
    std::variant<StepLimitOnly, GoalReached, AllTargetsConsumed, SelectionMade, SequenceComplete>;

struct NoShaping {
  bool operator==(const NoShaping&) const = default;
};
/// Per-step shaping term -alpha * (distance from agent to the goal).
struct PotentialDistance {
  double alpha = 0.0;
  bool operator==(const PotentialDistance&) const = default;
};
using ShapingRule = std::variant<NoShaping, PotentialDistance>;

/// Task-level episode semantics layered over the world simulation.
struct EpisodeRules {
  TerminalRule terminal = StepLimitOnly{};
  ShapingRule shaping = NoShaping{};
  std::vector<std::string> sequence;  // scavenger order, empty otherwise
  double wrong_order_penalty = -1.0;
  bool operator==(const EpisodeRules&) const = default;
};

nlohmann::json to_json(const EpisodeRules& rules);
/// Throws SchemaError / ValidationError.
EpisodeRules rules_from_json(const nlohmann::json& value);

}  // namespace l2x

#endif  // L2X_RULES_HPP
