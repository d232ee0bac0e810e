#ifndef L2X_SIMILARITY_HPP
#define L2X_SIMILARITY_HPP

#include "l2x/worldspec.hpp"

#include <map>
#include <string>
#include <vector>

namespace l2x {

struct PathDelta {
  std::string path;
  double delta = 0.0;  // unweighted per-coordinate distance
};

/// Heuristic layout and parameter distances between two worlds. These order
/// curricula; they say nothing about whether an agent will transfer.
struct SimilarityReport {
  double parameter_distance = 0.0;
  double color_distance = 0.0;
  double occupancy_distance = 0.0;
  double cell_size = 0.5;
  std::vector<PathDelta> per_path_deltas;
};

/// Key-path patterns to weights. A pattern segment "*" matches any segment;
/// the longest matching pattern wins and unmatched paths weigh 1.
using WeightMap = std::map<std::string, double>;

/// Leaves of the canonical document (seed excluded), objects keyed by id.
std::map<std::string, Json> flatten_leaves(const WorldSpec& spec);

/// Weighted L2 over leaf deltas. Numbers differ by |x - y| with an absent
/// leaf standing for 0; any other differing value counts 1, or |x| + 1
/// against a number.
double parameter_distance(const WorldSpec& a, const WorldSpec& b, const WeightMap& weights = {},
                          std::vector<PathDelta>* deltas = nullptr);

double color_distance(const Rgb& a, const Rgb& b);
/// L2 over background color and per-object colors matched by id; an object
/// present on one side only is measured against black.
double color_distance(const WorldSpec& a, const WorldSpec& b);

/// Row-major nx * ny occupancy, true where some object disk overlaps the cell.
struct OccupancyGrid {
  int nx = 0;
  int ny = 0;
  std::vector<bool> cells;
  int count() const;
};
OccupancyGrid rasterize(const WorldSpec& spec, double cell_size);

/// Jaccard distance of the two occupancy grids, 0 when both are empty.
/// Throws BoundsMismatch or ArgumentError (cell_size <= 0).
double occupancy_distance(const WorldSpec& a, const WorldSpec& b, double cell_size);

SimilarityReport compare(const WorldSpec& a, const WorldSpec& b, double cell_size = 0.5,
                         const WeightMap& weights = {});

Json to_json(const SimilarityReport& report);
/// Throws ConfigError for non-numeric or negative weights.
WeightMap weights_from_json(const Json& value);

}  // namespace l2x

#endif  // L2X_SIMILARITY_HPP
