#include "l2x/sensors.hpp"

#include "l2x/errors.hpp"

#include <cmath>
#include <limits>

namespace l2x {

int channel_count(unsigned modalities) {
  return ((modalities & kColor) ? 3 : 0) + ((modalities & kDepth) ? 1 : 0) +
         ((modalities & kSemantic) ? 1 : 0);
}

int Observation::column(Modality m) const {
  if (!(modalities & m)) return -1;
  int col = 0;
  if (m == kColor) return col;
  if (modalities & kColor) col += 3;
  if (m == kDepth) return col;
  if (modalities & kDepth) col += 1;
  return col;
}

bool Observation::operator==(const Observation& o) const {
  if (modalities != o.modalities) return false;
  if (tensor.rows() != o.tensor.rows() || tensor.cols() != o.tensor.cols()) return false;
  if (tensor != o.tensor) return false;
  if (state_vector.has_value() != o.state_vector.has_value()) return false;
  if (state_vector) {
    if (state_vector->size() != o.state_vector->size()) return false;
    if (*state_vector != *o.state_vector) return false;
  }
  return true;
}

void validate(const SensorConfig& c) {
  if (c.num_rays < 1) throw ConfigError("sensor.num_rays must be >= 1");
  if (!(c.fov > 0 && c.fov <= 2 * std::numbers::pi)) throw ConfigError("sensor.fov must lie in (0, 2pi]");
  if (!(std::isfinite(c.max_range) && c.max_range > 0)) throw ConfigError("sensor.max_range must be > 0");
  if ((c.modalities & kAllModalities) == 0 || (c.modalities & ~unsigned(kAllModalities)))
    throw ConfigError("sensor.modalities must be a non-empty subset of color, depth, semantic");
  if (c.state_vector_enabled && c.state_vector_size < 5)
    throw ConfigError("sensor.state_vector_size must be >= 5");
}

double ray_offset(const SensorConfig& config, int i) {
  if (config.num_rays == 1) return 0.0;
  return config.fov / 2 - config.fov * static_cast<double>(i) / static_cast<double>(config.num_rays - 1);
}

Observation emit(const SimState& state, const SensorConfig& config) {
  validate(config);
  Observation obs;
  obs.modalities = config.modalities;
  obs.tensor.resize(config.num_rays, channel_count(config.modalities));

  const EnvironmentParams& env = state.spec.environment;
  const int color_col = obs.column(kColor);
  const int depth_col = obs.column(kDepth);
  const int sem_col = obs.column(kSemantic);

  for (int i = 0; i < config.num_rays; ++i) {
    const Vector2 dir = heading_vector(state.pose.heading + ray_offset(config, i));
    double best = std::numeric_limits<double>::infinity();
    const ObjectState* hit = nullptr;
    // std::map order breaks exact-distance ties by id
    for (const auto& [id, o] : state.live_objects) {
      auto t = ray_disk_distance(state.pose.position, dir, o.position, o.spec.radius);
      if (t && *t <= config.max_range && *t < best) {
        best = *t;
        hit = &o;
      }
    }
    const Rgb& rgb = hit ? hit->spec.color : env.background_color;
    if (color_col >= 0) {
      obs.tensor(i, color_col + 0) = rgb.r / 255.0 * env.lighting;
      obs.tensor(i, color_col + 1) = rgb.g / 255.0 * env.lighting;
      obs.tensor(i, color_col + 2) = rgb.b / 255.0 * env.lighting;
    }
    if (depth_col >= 0) obs.tensor(i, depth_col) = hit ? best / config.max_range : 1.0;
    if (sem_col >= 0) obs.tensor(i, sem_col) = hit ? hit->class_id : env.background_class;
  }
  if (config.state_vector_enabled) obs.state_vector = emit_state_vector(state, config);
  return obs;
}

Eigen::VectorXd emit_state_vector(const SimState& state, const SensorConfig& config) {
  if (config.state_vector_size < 5)
    throw ConfigError("state vector size " + std::to_string(config.state_vector_size) +
                      " is smaller than the 5-entry prefix");
  Eigen::VectorXd full(5 + 3 * static_cast<Eigen::Index>(state.tracked.size()));
  full.head<5>() << state.pose.position.x(), state.pose.position.y(), std::cos(state.pose.heading),
      std::sin(state.pose.heading),
      static_cast<double>(state.step_count) / static_cast<double>(state.spec.environment.episode_step_limit);
  Eigen::Index k = 5;
  for (const std::string& id : state.tracked) {
    auto it = state.live_objects.find(id);
    if (it != state.live_objects.end()) {
      const Vector2 d = it->second.position - state.pose.position;
      full.segment<3>(k) << d.x(), d.y(), 1.0;
    } else {
      full.segment<3>(k).setZero();
    }
    k += 3;
  }
  Eigen::VectorXd out = Eigen::VectorXd::Zero(config.state_vector_size);
  const Eigen::Index n = std::min<Eigen::Index>(out.size(), full.size());
  out.head(n) = full.head(n);
  return out;
}

nlohmann::json to_json(const Observation& obs) {
  nlohmann::json j;
  j["shape"] = {obs.tensor.rows(), obs.tensor.cols()};
  nlohmann::json data = nlohmann::json::array();
  // RowMajor storage is already the wire order
  for (Eigen::Index i = 0; i < obs.tensor.size(); ++i) data.push_back(obs.tensor.data()[i]);
  j["data"] = std::move(data);
  if (obs.state_vector) {
    nlohmann::json sv = nlohmann::json::array();
    for (double v : *obs.state_vector) sv.push_back(v);
    j["state_vector"] = std::move(sv);
  }
  return j;
}

nlohmann::json to_json(const SensorConfig& c) {
  nlohmann::json mods = nlohmann::json::array();
  if (c.modalities & kColor) mods.push_back("color");
  if (c.modalities & kDepth) mods.push_back("depth");
  if (c.modalities & kSemantic) mods.push_back("semantic");
  return {{"num_rays", c.num_rays},
          {"fov", c.fov},
          {"max_range", c.max_range},
          {"modalities", mods},
          {"state_vector_enabled", c.state_vector_enabled},
          {"state_vector_size", c.state_vector_size}};
}

SensorConfig sensor_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw ConfigError("sensor config must be an object");
  SensorConfig c;
  for (const auto& [key, v] : j.items()) {
    try {
      if (key == "num_rays") {
        if (!v.is_number_integer()) throw ConfigError("sensor.num_rays must be an integer");
        c.num_rays = v.get<int>();
      } else if (key == "fov") {
        if (!v.is_number()) throw ConfigError("sensor.fov must be a number");
        c.fov = v.get<double>();
      } else if (key == "max_range") {
        if (!v.is_number()) throw ConfigError("sensor.max_range must be a number");
        c.max_range = v.get<double>();
      } else if (key == "state_vector_enabled") {
        if (!v.is_boolean()) throw ConfigError("sensor.state_vector_enabled must be a boolean");
        c.state_vector_enabled = v.get<bool>();
      } else if (key == "state_vector_size") {
        if (!v.is_number_integer()) throw ConfigError("sensor.state_vector_size must be an integer");
        c.state_vector_size = v.get<int>();
      } else if (key == "modalities") {
        if (!v.is_array()) throw ConfigError("sensor.modalities must be an array");
        c.modalities = 0;
        for (const auto& m : v) {
          const std::string name = m.get<std::string>();
          if (name == "color")
            c.modalities |= kColor;
          else if (name == "depth")
            c.modalities |= kDepth;
          else if (name == "semantic")
            c.modalities |= kSemantic;
          else
            throw ConfigError("unknown modality '" + name + "'");
        }
      } else {
        throw ConfigError("unknown sensor key '" + key + "'");
      }
    } catch (const nlohmann::json::exception&) {
      throw ConfigError("sensor." + key + " has the wrong type");
    }
  }
  validate(c);
  return c;
}

}  // namespace l2x
