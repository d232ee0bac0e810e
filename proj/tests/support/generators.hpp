#ifndef L2X_TESTS_GENERATORS_HPP
#define L2X_TESTS_GENERATORS_HPP

#include "l2x/worldspec.hpp"

#include <cstdint>
#include <numbers>
#include <random>
#include <string>

namespace l2x::testing {

class Gen {
 public:
  explicit Gen(std::uint64_t seed) : eng_(seed) {}

  double real(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(eng_); }
  int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(eng_); }
  std::uint64_t u64() { return eng_(); }
  bool coin() { return integer(0, 1) == 1; }
  Rgb rgb() { return {integer(0, 255), integer(0, 255), integer(0, 255)}; }
  std::mt19937_64& engine() { return eng_; }

  Vector2 inside(const Bounds& b, double margin = 0.0) {
    return Vector2(real(b.min.x() + margin, b.max.x() - margin), real(b.min.y() + margin, b.max.y() - margin));
  }

  std::string id(int k) {
    static const char* stems[] = {"tree", "rock", "target", "obj-\xc3\xbc", "r\xc3\xa9gion_", "lamp"};
    return stems[integer(0, 5)] + std::to_string(k);
  }

  ObjectSpec object(const Bounds& b, int k) {
    ObjectSpec o;
    o.id = id(k);
    static const char* classes[] = {"target", "distractor", "tree", "rock"};
    o.class_name = classes[integer(0, 3)];
    o.color = rgb();
    o.position = inside(b);
    o.radius = real(0.05, 2.0);
    switch (integer(0, 2)) {
      case 0: o.interaction = ProximityZone{real(0.0, 3.0)}; break;
      case 1: o.interaction = Contact{}; break;
      default: o.interaction = ExplicitInteract{real(0.0, 3.0)}; break;
    }
    o.reward_value = real(-100, 100);
    o.reward_probability = real(0, 1);
    o.destroy_on_interact = coin();
    if (coin()) o.motion = LinearMotion{Vector2(real(-2, 2), real(-2, 2))};
    return o;
  }

  /// Any valid spec, exercising every field.
  WorldSpec spec(int max_objects = 6) {
    WorldSpec s;
    const double x0 = real(-20, 0), y0 = real(-20, 0);
    s.environment.bounds = Bounds{Vector2(x0, y0), Vector2(x0 + real(1, 40), y0 + real(1, 40))};
    s.environment.lighting = real(0, 1);
    s.environment.background_class = integer(0, 5);
    s.environment.background_color = rgb();
    s.environment.episode_step_limit = integer(1, 2000);
    s.environment.dt = real(0.01, 1.0);
    s.agent.start_pose.position = inside(s.environment.bounds);
    s.agent.start_pose.heading = real(-std::numbers::pi, std::numbers::pi);
    s.agent.radius = real(0.05, 1.0);
    s.agent.max_linear_speed = real(0.1, 5.0);
    s.agent.max_angular_speed = real(0.1, 5.0);
    s.agent.action_mode = coin() ? ActionMode::Continuous : ActionMode::Discretized;
    s.agent.interact_enabled = coin();
    const int n = integer(0, max_objects);
    for (int k = 0; k < n; ++k) s.objects.push_back(object(s.environment.bounds, k));
    s.seed = u64();
    return s;
  }

  /// Specs sharing one arena, for measures that need equal bounds.
  WorldSpec spec_in(const Bounds& bounds, int max_objects = 6) {
    WorldSpec s = spec(max_objects);
    s.environment.bounds = bounds;
    s.agent.start_pose.position = inside(bounds);
    for (ObjectSpec& o : s.objects) o.position = inside(bounds);
    return s;
  }

 private:
  std::mt19937_64 eng_;
};

}  // namespace l2x::testing

#endif  // L2X_TESTS_GENERATORS_HPP
