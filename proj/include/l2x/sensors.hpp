#ifndef L2X_SENSORS_HPP
#define L2X_SENSORS_HPP

#include "l2x/observation.hpp"
#include "l2x/simcore.hpp"

namespace l2x {

/// Ray-cast first-person view. Rays span the field of view left to right,
/// endpoints inclusive at +/- fov/2 around the heading. Per ray: nearest
/// circle hit within max_range gives depth = distance / max_range (1 on a
/// miss), color = rgb / 255 * lighting (background color on a miss) and the
/// hit's semantic class id (background class on a miss).
Observation emit(const SimState& state, const SensorConfig& config);

/// [x, y, cos heading, sin heading, step / limit] followed by (dx, dy, alive)
/// for every tracked object, truncated or zero-padded to the configured size.
/// Throws ConfigError when the size cannot hold the 5-entry prefix.
Eigen::VectorXd emit_state_vector(const SimState& state, const SensorConfig& config);

/// Angle of ray `i` relative to the heading.
double ray_offset(const SensorConfig& config, int i);

}  // namespace l2x

#endif  // L2X_SENSORS_HPP
