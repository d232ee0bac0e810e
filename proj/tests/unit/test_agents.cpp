#include "l2x/agents.hpp"
#include "l2x/errors.hpp"
#include "l2x/sensors.hpp"

#include <doctest.h>

using namespace l2x;

namespace {

AgentConfig config(AgentKind kind, std::uint64_t seed = 1) {
  AgentConfig c;
  c.kind = kind;
  c.seed = seed;
  return c;
}

struct Episode {
  std::shared_ptr<const TaskDefinition> task;
  WorldSpec spec;
  EpisodeContext ctx;
};

Episode episode_of(std::shared_ptr<const TaskDefinition> task) {
  Episode e{task, task->base_spec, {}};
  e.ctx.task = e.task.get();
  e.ctx.spec = &e.spec;
  for (const auto& o : e.spec.objects) e.ctx.object_ids.push_back(o.id);
  return e;
}

Observation depth_obs(std::vector<double> depth) {
  Observation o;
  o.modalities = kDepth;
  o.tensor.resize(static_cast<Eigen::Index>(depth.size()), 1);
  for (std::size_t i = 0; i < depth.size(); ++i) o.tensor(static_cast<Eigen::Index>(i), 0) = depth[i];
  return o;
}

double run_lifetime(Agent& agent, std::shared_ptr<const TaskDefinition> task, int episodes,
                    std::vector<double>* rewards = nullptr) {
  const Syllabus s = make_ste_syllabus("builtin:select_object", task, episodes, 5);
  double total = 0;
  RunOptions o;
  o.sink = [&](const EpisodeRecord& r) {
    total += r.total_reward;
    if (rewards) rewards->push_back(r.total_reward);
  };
  run_syllabus(s, agent, o);
  return total / episodes;
}

}  // namespace

TEST_CASE("agent kinds and configuration checks") {
  CHECK(agent_kind_from_string("tabular-q") == AgentKind::TabularQ);
  CHECK(to_string(AgentKind::Bandit) == "bandit");
  CHECK_THROWS_AS(agent_kind_from_string("ppo"), ArgumentError);
  AgentConfig c = config(AgentKind::TabularQ);
  c.epsilon = 1.5;
  CHECK_THROWS_AS(validate(c), ConfigError);
  c = config(AgentKind::TabularQ);
  c.discount = -0.1;
  CHECK_THROWS_AS(validate(c), ConfigError);
  c = config(AgentKind::TabularQ);
  c.depth_bins = 0;
  CHECK_THROWS_AS(validate(c), ConfigError);
  CHECK(make_agent(config(AgentKind::Random)) != nullptr);
}

TEST_CASE("random agent stays within the action limits") {
  RandomAgent agent(config(AgentKind::Random));
  Episode e = episode_of(std::make_shared<const TaskDefinition>(make_select_object(2, {0.5, 0.5}, {1, 1})));
  agent.begin_episode(e.ctx);
  bool pressed = false;
  for (int i = 0; i < 500; ++i) {
    const Action a = agent.act(Observation{});
    REQUIRE(std::abs(a.linear_velocity) <= e.spec.agent.max_linear_speed);
    REQUIRE(std::abs(a.angular_velocity) <= e.spec.agent.max_angular_speed);
    pressed = pressed || a.interact;
  }
  CHECK(pressed);
}

TEST_CASE("tabular Q state index and update by hand") {
  AgentConfig c = config(AgentKind::TabularQ);
  c.epsilon = 0.0;
  TabularQAgent agent(c);
  Episode e = episode_of(std::make_shared<const TaskDefinition>(make_find_objects(1, 0, 0)));
  agent.begin_episode(e.ctx);
  CHECK(agent.action_count() == 9);
  // thirds of six rays: {0.05, 0.9}, {1, 1}, {0.3, 0.5}
  const Observation obs = depth_obs({0.05, 0.9, 1.0, 1.0, 0.3, 0.5});
  CHECK(agent.state_index(obs) == 0 * 64 + 7 * 8 + 2);
  Observation colour_only;
  colour_only.modalities = kColor;
  CHECK_THROWS_AS(agent.state_index(colour_only), ConfigError);

  const Action a = agent.act(obs);
  CHECK(a.linear_velocity == agent.decode(0).linear_velocity);
  agent.observe(obs, a, 1.0, true);
  CHECK(agent.q_table()(agent.state_index(obs), 0) == doctest::Approx(0.1));

  agent.set_frozen(true);
  agent.act(obs);
  agent.observe(obs, a, 100.0, true);
  CHECK(agent.q_table()(agent.state_index(obs), 0) == doctest::Approx(0.1));
}

TEST_CASE("tabular Q decodes a three-by-three grid") {
  TabularQAgent agent(config(AgentKind::TabularQ));
  Episode e = episode_of(std::make_shared<const TaskDefinition>(make_find_objects(1, 0, 0)));
  agent.begin_episode(e.ctx);
  CHECK(agent.decode(0).linear_velocity == -e.spec.agent.max_linear_speed);
  CHECK(agent.decode(8).linear_velocity == e.spec.agent.max_linear_speed);
  CHECK(agent.decode(4).linear_velocity == 0.0);
  CHECK(agent.decode(4).angular_velocity == 0.0);
  CHECK_FALSE(agent.decode(8).interact);
}

TEST_CASE("bandit refuses tasks it cannot play") {
  BanditAgent agent(config(AgentKind::Bandit));
  Episode e = episode_of(std::make_shared<const TaskDefinition>(make_find_objects(1, 0, 0)));
  CHECK_THROWS_AS(agent.begin_episode(e.ctx), TaskMismatch);
}

TEST_CASE("bandit learns the better arm") {
  auto task = std::make_shared<const TaskDefinition>(make_select_object(2, {0.8, 0.2}, {1, 1}));
  BanditAgent agent(config(AgentKind::Bandit, 3));
  std::vector<double> rewards;
  run_lifetime(agent, task, 600, &rewards);
  CHECK(agent.arms() == std::vector<std::string>{"arm1", "arm2"});
  CHECK(agent.preferred_arm() == 0);
  CHECK(agent.pulls().sum() == doctest::Approx(600).epsilon(0.02));
  CHECK(agent.estimates()(0) == doctest::Approx(0.8).epsilon(0.15));
  double late = 0;
  for (std::size_t i = 300; i < rewards.size(); ++i) late += rewards[i];
  CHECK(late / 300 > 0.65);
}

TEST_CASE("bandit drives to the chosen arm and selects it") {
  auto task = std::make_shared<const TaskDefinition>(make_select_object(3, {1, 1, 1}, {1, 2, 3}));
  AgentConfig c = config(AgentKind::Bandit, 9);
  c.epsilon = 1.0;
  BanditAgent agent(c);
  const Syllabus s = make_ste_syllabus("x", task, 60, 1);
  RunOptions o;
  std::vector<int> chosen;
  std::vector<std::string> hit;
  o.on_step = [&](const Block&, const SimState&, const StepResult& r) {
    if (r.done) {
      chosen.push_back(agent.chosen_arm());
      hit.push_back(r.events.empty() ? "" : r.events[0].object_id);
    }
  };
  run_syllabus(s, agent, o);
  REQUIRE(chosen.size() == 60);
  for (std::size_t i = 0; i < chosen.size(); ++i) CHECK(hit[i] == "arm" + std::to_string(chosen[i] + 1));
}

TEST_CASE("random agent on a fair two-arm task scores about a half") {
  auto task = std::make_shared<const TaskDefinition>(make_select_object(2, {0.8, 0.2}, {1, 1}));
  RandomAgent agent(config(AgentKind::Random, 4));
  CHECK(std::abs(run_lifetime(agent, task, 1000) - 0.5) < 0.06);
}
