#include "l2x/agents.hpp"

#include "l2x/errors.hpp"
#include "l2x/geometry.hpp"

#include <algorithm>
#include <cmath>

namespace l2x {

namespace {

double bin_value(int bins, int i, double max) {
  if (bins == 1) return 0.0;
  return -max + 2.0 * max * static_cast<double>(i) / static_cast<double>(bins - 1);
}

Eigen::Index argmax_lowest(const Eigen::Ref<const Eigen::VectorXd>& v) {
  Eigen::Index best = 0;
  for (Eigen::Index i = 1; i < v.size(); ++i)
    if (v[i] > v[best]) best = i;
  return best;
}

}  // namespace

std::string_view to_string(AgentKind kind) {
  switch (kind) {
    case AgentKind::Random: return "random";
    case AgentKind::TabularQ: return "tabular-q";
    case AgentKind::Bandit: return "bandit";
  }
  return "random";
}

AgentKind agent_kind_from_string(std::string_view name) {
  for (AgentKind k : {AgentKind::Random, AgentKind::TabularQ, AgentKind::Bandit})
    if (to_string(k) == name) return k;
  throw ArgumentError("unknown agent '" + std::string(name) + "' (random, tabular-q, bandit)");
}

void validate(const AgentConfig& c) {
  if (!(c.epsilon >= 0 && c.epsilon <= 1)) throw ConfigError("epsilon must lie in [0, 1]");
  if (!(c.learning_rate >= 0 && c.learning_rate <= 1)) throw ConfigError("learning_rate must lie in [0, 1]");
  if (!(c.discount >= 0 && c.discount <= 1)) throw ConfigError("discount must lie in [0, 1]");
  if (c.depth_bins < 1 || c.linear_bins < 1 || c.angular_bins < 1) throw ConfigError("bin counts must be >= 1");
  if (!std::isfinite(c.initial_value)) throw ConfigError("initial_value must be finite");
}

std::unique_ptr<Agent> make_agent(const AgentConfig& config) {
  switch (config.kind) {
    case AgentKind::Random: return std::make_unique<RandomAgent>(config);
    case AgentKind::TabularQ: return std::make_unique<TabularQAgent>(config);
    case AgentKind::Bandit: return std::make_unique<BanditAgent>(config);
  }
  return nullptr;
}

// -- random -------------------------------------------------------------------

RandomAgent::RandomAgent(const AgentConfig& config) : rng_(CounterRng(config.seed).split("random-agent")) {
  validate(config);
}

void RandomAgent::begin_episode(const EpisodeContext& ctx) {
  if (ctx.spec) limits_ = ctx.spec->agent;
}

Action RandomAgent::act(const Observation&) {
  Action a;
  a.linear_velocity = rng_.uniform(-limits_.max_linear_speed, limits_.max_linear_speed);
  a.angular_velocity = rng_.uniform(-limits_.max_angular_speed, limits_.max_angular_speed);
  if (limits_.interact_enabled) a.interact = rng_.coin();
  return a;
}

// -- tabular Q ------------------------------------------------------------------

TabularQAgent::TabularQAgent(const AgentConfig& config)
    : config_(config), rng_(CounterRng(config.seed).split("tabular-q")) {
  validate(config);
  const Eigen::Index states = Eigen::Index(config.depth_bins) * config.depth_bins * config.depth_bins;
  q_ = Eigen::MatrixXd::Constant(states, Eigen::Index(config.linear_bins) * config.angular_bins,
                                 config.initial_value);
}

void TabularQAgent::begin_episode(const EpisodeContext& ctx) {
  if (ctx.spec) limits_ = ctx.spec->agent;
  const Eigen::Index want = Eigen::Index(config_.linear_bins) * config_.angular_bins * (limits_.interact_enabled ? 2 : 1);
  if (want > q_.cols()) {
    const Eigen::Index old = q_.cols();
    q_.conservativeResize(Eigen::NoChange, want);
    q_.rightCols(want - old).setConstant(config_.initial_value);
  }
  last_state_ = last_action_ = -1;
}

Eigen::Index TabularQAgent::state_index(const Observation& obs) const {
  const int col = obs.column(kDepth);
  if (col < 0) throw ConfigError("tabular-q needs the depth modality");
  const Eigen::Index n = obs.tensor.rows();
  const Eigen::Index cuts[4] = {0, n / 3, 2 * n / 3, n};
  Eigen::Index index = 0;
  for (int third = 0; third < 3; ++third) {
    double d = 1.0;
    for (Eigen::Index r = cuts[third]; r < cuts[third + 1]; ++r) d = std::min(d, obs.tensor(r, col));
    const int bin = std::clamp(static_cast<int>(std::floor(d * config_.depth_bins)), 0, config_.depth_bins - 1);
    index = index * config_.depth_bins + bin;
  }
  return index;
}

Action TabularQAgent::decode(Eigen::Index action) const {
  const Eigen::Index per_interact = Eigen::Index(config_.linear_bins) * config_.angular_bins;
  Action a;
  a.interact = action >= per_interact;
  const Eigen::Index rest = action % per_interact;
  a.linear_velocity = bin_value(config_.linear_bins, int(rest / config_.angular_bins), limits_.max_linear_speed);
  a.angular_velocity = bin_value(config_.angular_bins, int(rest % config_.angular_bins), limits_.max_angular_speed);
  return a;
}

Action TabularQAgent::act(const Observation& obs) {
  const Eigen::Index s = state_index(obs);
  const Eigen::Index usable =
      Eigen::Index(config_.linear_bins) * config_.angular_bins * (limits_.interact_enabled ? 2 : 1);
  Eigen::Index a;
  if (!frozen_ && config_.epsilon > 0 && rng_.uniform() < config_.epsilon)
    a = static_cast<Eigen::Index>(rng_.below(static_cast<std::uint64_t>(usable)));
  else
    a = argmax_lowest(q_.row(s).head(usable).transpose());
  last_state_ = s;
  last_action_ = a;
  return decode(a);
}

void TabularQAgent::observe(const Observation& next, const Action&, double reward, bool done) {
  if (frozen_ || last_state_ < 0) return;
  const Eigen::Index usable =
      Eigen::Index(config_.linear_bins) * config_.angular_bins * (limits_.interact_enabled ? 2 : 1);
  double target = reward;
  if (!done) target += config_.discount * q_.row(state_index(next)).head(usable).maxCoeff();
  double& q = q_(last_state_, last_action_);
  q += config_.learning_rate * (target - q);
}

// -- bandit ---------------------------------------------------------------------

BanditAgent::BanditAgent(const AgentConfig& config) : config_(config), rng_(CounterRng(config.seed).split("bandit")) {
  validate(config);
}

void BanditAgent::begin_episode(const EpisodeContext& ctx) {
  if (!ctx.task || ctx.task->family != TaskFamily::SelectObject)
    throw TaskMismatch("bandit agent only runs SelectObject tasks");
  if (!ctx.task->sensor.state_vector_enabled)
    throw TaskMismatch("bandit agent needs the state vector to locate arms");
  if (ctx.spec) {
    limits_ = ctx.spec->agent;
    dt_ = ctx.spec->environment.dt;
  }
  if (ctx.object_ids != arms_) {
    arms_ = ctx.object_ids;
    values_ = Eigen::VectorXd::Constant(Eigen::Index(arms_.size()), config_.initial_value);
    counts_ = Eigen::VectorXd::Zero(Eigen::Index(arms_.size()));
  }
  if (arms_.empty()) throw TaskMismatch("SelectObject task has no arms");
  if (!frozen_ && config_.epsilon > 0 && rng_.uniform() < config_.epsilon)
    chosen_ = static_cast<int>(rng_.below(arms_.size()));
  else
    chosen_ = preferred_arm();
  episode_reward_ = 0.0;
}

int BanditAgent::preferred_arm() const { return values_.size() ? static_cast<int>(argmax_lowest(values_)) : -1; }

Action BanditAgent::act(const Observation& obs) {
  if (!obs.state_vector) throw TaskMismatch("bandit agent needs the state vector to locate arms");
  if (chosen_ < 0) throw TaskMismatch("bandit agent acted before begin_episode");
  const Eigen::VectorXd& sv = *obs.state_vector;
  auto slot = [&](int k) -> Eigen::Index { return 5 + 3 * Eigen::Index(k); };
  if (slot(chosen_) + 2 >= sv.size()) throw TaskMismatch("state vector too short for the arm count");
  const double heading = std::atan2(sv[3], sv[2]);
  const Vector2 to_arm(sv[slot(chosen_)], sv[slot(chosen_) + 1]);
  const double err = wrap_angle(std::atan2(to_arm.y(), to_arm.x()) - heading);

  Action a;
  a.angular_velocity = std::clamp(err / dt_, -limits_.max_angular_speed, limits_.max_angular_speed);
  a.linear_velocity = std::abs(err) < 0.2 ? limits_.max_linear_speed : 0.0;
  bool nearest = sv[slot(chosen_) + 2] > 0;
  for (int k = 0; k < int(arms_.size()) && nearest; ++k) {
    if (k == chosen_ || slot(k) + 2 >= sv.size() || sv[slot(k) + 2] <= 0) continue;
    nearest = to_arm.norm() < Vector2(sv[slot(k)], sv[slot(k) + 1]).norm();
  }
  a.interact = nearest;
  return a;
}

void BanditAgent::observe(const Observation&, const Action&, double reward, bool done) {
  if (frozen_) return;
  episode_reward_ += reward;
  if (!done) return;
  counts_[chosen_] += 1.0;
  const double step = std::max(1.0 / counts_[chosen_], config_.learning_rate);
  values_[chosen_] += step * (episode_reward_ - values_[chosen_]);
}

}  // namespace l2x
