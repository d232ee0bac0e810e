#ifndef L2X_AGENTS_HPP
#define L2X_AGENTS_HPP

#include "l2x/curriculum.hpp"
#include "l2x/rng.hpp"

#include <Eigen/Dense>

#include <memory>
#include <string>
#include <vector>

namespace l2x {

enum class AgentKind { Random, TabularQ, Bandit };

std::string_view to_string(AgentKind kind);
/// "random", "tabular-q" or "bandit"; throws ArgumentError otherwise.
AgentKind agent_kind_from_string(std::string_view name);

struct AgentConfig {
  AgentKind kind = AgentKind::Random;
  double learning_rate = 0.1;
  double epsilon = 0.1;
  double discount = 0.95;
  int depth_bins = 8;
  int linear_bins = 3;
  int angular_bins = 3;
  double initial_value = 0.0;  // optimistic start for value estimates
  std::uint64_t seed = 0;
};

/// Throws ConfigError.
void validate(const AgentConfig& config);

std::unique_ptr<Agent> make_agent(const AgentConfig& config);

class RandomAgent final : public Agent {
 public:
  explicit RandomAgent(const AgentConfig& config);
  void begin_episode(const EpisodeContext& ctx) override;
  Action act(const Observation& observation) override;
  void observe(const Observation&, const Action&, double, bool) override {}
  void set_frozen(bool) override {}

 private:
  RngStream rng_;
  AgentParams limits_;
};

/// One-step Q-learning over a coarse depth discretization: the minimum depth
/// of each third of the rays, binned, indexes the state.
class TabularQAgent final : public Agent {
 public:
  explicit TabularQAgent(const AgentConfig& config);
  void begin_episode(const EpisodeContext& ctx) override;
  Action act(const Observation& observation) override;
  void observe(const Observation& next, const Action& action, double reward, bool done) override;
  void set_frozen(bool frozen) override { frozen_ = frozen; }

  /// Throws ConfigError when the observation carries no depth channel.
  Eigen::Index state_index(const Observation& observation) const;
  Eigen::Index action_count() const { return q_.cols(); }
  Action decode(Eigen::Index action) const;
  const Eigen::MatrixXd& q_table() const { return q_; }
  bool frozen() const { return frozen_; }

 private:
  AgentConfig config_;
  RngStream rng_;
  AgentParams limits_;
  Eigen::MatrixXd q_;
  Eigen::Index last_state_ = -1;
  Eigen::Index last_action_ = -1;
  bool frozen_ = false;
};

/// Epsilon-greedy over per-arm value estimates on SelectObject tasks. The
/// chosen arm is reached by steering on the state vector.
class BanditAgent final : public Agent {
 public:
  explicit BanditAgent(const AgentConfig& config);
  /// Throws TaskMismatch unless the task is SelectObject with a state vector.
  void begin_episode(const EpisodeContext& ctx) override;
  Action act(const Observation& observation) override;
  void observe(const Observation& next, const Action& action, double reward, bool done) override;
  void set_frozen(bool frozen) override { frozen_ = frozen; }

  const std::vector<std::string>& arms() const { return arms_; }
  const Eigen::VectorXd& estimates() const { return values_; }
  const Eigen::VectorXd& pulls() const { return counts_; }
  int chosen_arm() const { return chosen_; }
  /// Greedy arm, lowest index on ties.
  int preferred_arm() const;

 private:
  AgentConfig config_;
  RngStream rng_;
  AgentParams limits_;
  double dt_ = 0.1;
  std::vector<std::string> arms_;
  Eigen::VectorXd values_;
  Eigen::VectorXd counts_;
  int chosen_ = -1;
  double episode_reward_ = 0.0;
  bool frozen_ = false;
};

}  // namespace l2x

#endif  // L2X_AGENTS_HPP
