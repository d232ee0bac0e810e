#ifndef L2X_OBSERVATION_HPP
#define L2X_OBSERVATION_HPP

#include <Eigen/Dense>
#include <json.hpp>

#include <numbers>
#include <optional>

namespace l2x {

enum Modality : unsigned {
  kColor = 1u << 0,
  kDepth = 1u << 1,
  kSemantic = 1u << 2,
  kAllModalities = kColor | kDepth | kSemantic,
};

struct SensorConfig {
  int num_rays = 32;
  double fov = std::numbers::pi / 2;
  double max_range = 10.0;
  unsigned modalities = kAllModalities;
  bool state_vector_enabled = false;
  int state_vector_size = 16;
  bool operator==(const SensorConfig&) const = default;
};

/// Throws ConfigError on an invalid configuration.
void validate(const SensorConfig& config);

using ObservationTensor = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// One row per ray (left to right); columns are, in order, r g b (color),
/// depth, semantic class id, each present only when its modality is on.
struct Observation {
  ObservationTensor tensor;
  std::optional<Eigen::VectorXd> state_vector;
  unsigned modalities = kAllModalities;

  int channels() const { return static_cast<int>(tensor.cols()); }
  /// Column of the first channel of `m`, or -1 when the modality is off.
  int column(Modality m) const;

  bool operator==(const Observation& o) const;
};

int channel_count(unsigned modalities);

nlohmann::json to_json(const Observation& obs);
nlohmann::json to_json(const SensorConfig& config);
SensorConfig sensor_from_json(const nlohmann::json& value);

}  // namespace l2x

#endif  // L2X_OBSERVATION_HPP
