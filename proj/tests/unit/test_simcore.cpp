#include "l2x/errors.hpp"
#include "l2x/simcore.hpp"
#include "support/generators.hpp"

#include <doctest.h>

#include <cmath>

using namespace l2x;

namespace {

ObjectSpec make_object(const std::string& id, Vector2 at, double reward = 1.0) {
  ObjectSpec o;
  o.id = id;
  o.position = at;
  o.reward_value = reward;
  return o;
}

WorldSpec arena(double half = 10.0) {
  WorldSpec s;
  s.environment.bounds = Bounds{Vector2(-half, -half), Vector2(half, half)};
  s.environment.episode_step_limit = 100000;
  return s;
}

}  // namespace

TEST_CASE("reset builds the state from the spec") {
  WorldSpec s = arena();
  for (int k = 0; k < 3; ++k) s.objects.push_back(make_object("o" + std::to_string(k), Vector2(k + 1.0, 3)));
  const SimState a = reset(s);
  const SimState b = reset(s);
  CHECK(a.pose == Pose{});
  CHECK(a.live_objects.size() == 3);
  CHECK(a.step_count == 0);
  CHECK(state_to_json(a) == state_to_json(b));
}

TEST_CASE("one Euler step by hand") {
  SimState st = reset(arena());
  step(st, {1.0, 0.0, false});
  CHECK(st.pose.position.x() == doctest::Approx(0.1).epsilon(1e-15));
  CHECK(st.pose.position.y() == 0.0);
  CHECK(st.pose.heading == 0.0);
}

TEST_CASE("zero action is a fixed point") {
  testing::Gen gen(3);
  WorldSpec s = gen.spec(0);
  s.environment.episode_step_limit = 1000;
  SimState st = reset(s);
  const Pose start = st.pose;
  for (int i = 0; i < 200; ++i) {
    const StepResult r = step(st, {});
    CHECK(r.reward == 0.0);
  }
  CHECK(st.pose == start);
}

TEST_CASE("full rotation returns the heading") {
  WorldSpec s = arena();
  s.agent.start_pose.heading = 0.3;
  s.agent.max_angular_speed = 10;
  SimState st = reset(s);
  const int n = 100;
  const double omega = 2 * std::numbers::pi / (n * s.environment.dt);
  for (int i = 0; i < n; ++i) step(st, {0.0, omega, false});
  CHECK(std::abs(wrap_angle(st.pose.heading - 0.3)) < 1e-9);
}

TEST_CASE("random actions follow the semi-implicit Euler formula") {
  testing::Gen gen(17);
  WorldSpec s = arena(1000);
  s.agent.max_linear_speed = 2;
  s.agent.max_angular_speed = 2;
  SimState st = reset(s);
  double x = 0, y = 0, h = 0;
  for (int i = 0; i < 100; ++i) {
    const double v = gen.real(-2, 2), w = gen.real(-2, 2);
    step(st, {v, w, false});
    h = std::remainder(h + w * 0.1, 2 * std::numbers::pi);
    if (h >= std::numbers::pi) h -= 2 * std::numbers::pi;
    x += v * 0.1 * std::cos(h);
    y += v * 0.1 * std::sin(h);
    CHECK(std::abs(st.pose.position.x() - x) < 1e-12);
    CHECK(std::abs(st.pose.position.y() - y) < 1e-12);
    CHECK(std::abs(wrap_angle(st.pose.heading - h)) < 1e-12);
  }
}

TEST_CASE("out-of-range actions are clamped and flagged") {
  SimState st = reset(arena());
  StepResult r = step(st, {5.0, 0.0, false});
  CHECK(r.info["clamped"] == true);
  CHECK(st.pose.position.x() == doctest::Approx(0.1));
  r = step(st, {0.5, 0.0, false});
  CHECK(r.info["clamped"] == false);
  r = step(st, {std::nan(""), 0.0, false});
  CHECK(r.info["clamped"] == true);
}

TEST_CASE("discretized actions snap to the three bins") {
  WorldSpec s = arena();
  s.agent.action_mode = ActionMode::Discretized;
  const Action a = clamp_action(s.agent, {0.7, -0.2, false});
  CHECK(a.linear_velocity == 1.0);
  CHECK(a.angular_velocity == 0.0);
}

TEST_CASE("pose never leaves the bounds") {
  testing::Gen gen(2);
  WorldSpec s = arena(1);
  s.agent.max_linear_speed = 5;
  SimState st = reset(s);
  for (int i = 0; i < 2000; ++i) {
    step(st, {gen.real(-5, 5), gen.real(-1, 1), false});
    REQUIRE(s.environment.bounds.contains(st.pose.position));
  }
}

TEST_CASE("contact with a 100-value object rewards and destroys") {
  WorldSpec s = arena();
  s.objects.push_back(make_object("gem", Vector2(0.8, 0), 100));
  SimState st = reset(s);
  StepResult r = step(st, {1.0, 0.0, false});  // 0.7 away: radii sum 0.75
  CHECK(r.reward == 100);
  CHECK(st.live_objects.empty());
  CHECK(st.episode_reward == 100);
}

TEST_CASE("proximity fires inside the zone, explicit needs interact") {
  WorldSpec s = arena();
  ObjectSpec zone = make_object("zone", Vector2(0.5, 0));
  zone.interaction = ProximityZone{1.0};
  s.objects.push_back(zone);
  SimState st = reset(s);
  CHECK(resolve_interactions(st, {}).size() == 1);

  WorldSpec e = arena();
  e.agent.interact_enabled = true;
  ObjectSpec button = make_object("button", Vector2(0.5, 0));
  button.interaction = ExplicitInteract{1.0};
  e.objects.push_back(button);
  SimState se = reset(e);
  CHECK(resolve_interactions(se, {0, 0, false}).empty());
  CHECK(resolve_interactions(se, {0, 0, true}).size() == 1);
}

TEST_CASE("non-destroying triggers fire once per spawn") {
  WorldSpec s = arena();
  ObjectSpec o = make_object("bell", Vector2(0.5, 0));
  o.interaction = ProximityZone{1.0};
  o.destroy_on_interact = false;
  s.objects.push_back(o);
  SimState st = reset(s);
  CHECK(step(st, {}).reward == 1.0);
  double later = 0;
  for (int i = 0; i < 50; ++i) later += step(st, {(i % 20 < 10) ? 1.0 : -1.0, 0, false}).reward;
  CHECK(later == 0.0);
  destroy_object(st, "bell");
  spawn_object(st, o);
  CHECK(step(st, {}).reward == 1.0);
}

TEST_CASE("Bernoulli rewards match their probability") {
  WorldSpec s = arena();
  ObjectSpec o = make_object("coin", Vector2(0.5, 0));
  o.interaction = ProximityZone{1.0};
  o.reward_probability = 0.8;
  s.objects.push_back(o);
  double total = 0;
  for (std::uint64_t seed = 0; seed < 10000; ++seed) {
    s.seed = seed;
    SimState st = reset(s);
    total += step(st, {}).reward;
  }
  CHECK(std::abs(total / 10000 - 0.8) < 0.02);
}

TEST_CASE("spawn and destroy") {
  SimState st = reset(arena());
  spawn_object(st, make_object("a", Vector2(3, 3)));
  CHECK(st.live_objects.size() == 1);
  CHECK_THROWS_AS(spawn_object(st, make_object("a", Vector2(3, 3))), DuplicateId);
  CHECK_THROWS_AS(spawn_object(st, make_object("far", Vector2(30, 3))), ValidationError);
  CHECK(destroy_object(st, "a"));
  CHECK_FALSE(destroy_object(st, "a"));
  spawn_object(st, make_object("a", Vector2(2, 2)));
  CHECK(st.live_objects.at("a").position == Vector2(2, 2));
}

TEST_CASE("linear motion translates and reflects") {
  WorldSpec s = arena();
  ObjectSpec still = make_object("still", Vector2(1, 1));
  ObjectSpec mover = make_object("mover", Vector2(0, 5));
  mover.motion = LinearMotion{Vector2(1, 1)};
  ObjectSpec wall = make_object("wall", Vector2(9.9, 0));
  wall.motion = LinearMotion{Vector2(1, 0)};
  s.objects = {still, mover, wall};
  SimState st = reset(s);
  advance_motion(st);
  CHECK(st.live_objects.at("still").position == Vector2(1, 1));
  CHECK(st.live_objects.at("mover").position.x() == doctest::Approx(0.1));
  CHECK(st.live_objects.at("mover").position.y() == doctest::Approx(5.1));
  CHECK(st.live_objects.at("wall").velocity.x() < 0);
  advance_motion(st);
  CHECK(st.live_objects.at("wall").position.x() < 10.0);
}

TEST_CASE("step after done throws") {
  WorldSpec s = arena();
  s.environment.episode_step_limit = 2;
  SimState st = reset(s);
  CHECK_FALSE(step(st, {}).done);
  const StepResult r = step(st, {});
  CHECK(r.done);
  CHECK(r.info["terminal"] == "step_limit");
  CHECK_THROWS_AS(step(st, {}), EpisodeFinished);
}

TEST_CASE("reward accounting is exact and trajectories are deterministic") {
  testing::Gen gen(23);
  for (int trial = 0; trial < 20; ++trial) {
    WorldSpec s = gen.spec(5);
    s.environment.episode_step_limit = 300;
    std::vector<Action> actions;
    for (int i = 0; i < 300; ++i) actions.push_back({gen.real(-5, 5), gen.real(-5, 5), gen.coin()});
    SimState a = reset(s), b = reset(s);
    double sum = 0;
    for (const Action& act : actions) {
      if (a.done) break;
      const StepResult ra = step(a, act);
      const StepResult rb = step(b, act);
      sum += ra.reward;
      REQUIRE(ra.reward == rb.reward);
      REQUIRE(ra.observation == rb.observation);
    }
    CHECK(state_to_json(a) == state_to_json(b));
    CHECK(a.episode_reward == sum);
  }
}
