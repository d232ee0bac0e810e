#include "l2x/similarity.hpp"

#include "l2x/errors.hpp"
#include "l2x/keypath.hpp"

#include <cmath>
#include <set>

namespace l2x {

namespace {

void flatten_into(const Json& v, const std::string& path, std::map<std::string, Json>& out) {
  auto child = [&](const std::string& seg) { return path.empty() ? seg : path + "." + seg; };
  if (v.is_object()) {
    for (const auto& [k, x] : v.items()) flatten_into(x, child(k), out);
  } else if (v.is_array()) {
    for (std::size_t i = 0; i < v.size(); ++i) flatten_into(v[i], child(std::to_string(i)), out);
  } else {
    out[path] = v;
  }
}

// Per-coordinate metric: the real line with every non-numeric value hung off
// the origin by a unit edge, absent leaves sitting at the origin.
double leaf_distance(const Json* a, const Json* b) {
  auto magnitude = [](const Json* v) -> double {
    if (!v) return 0.0;
    if (v->is_number()) return std::abs(v->get<double>());
    return 1.0;
  };
  if (a && b && *a == *b) return 0.0;
  if (!a || !b) return magnitude(a ? a : b);
  if (a->is_number() && b->is_number()) return std::abs(a->get<double>() - b->get<double>());
  if (a->is_number() || b->is_number()) return magnitude(a) + magnitude(b);
  return 1.0;
}

double weight_for(const WeightMap& weights, const std::string& path) {
  const auto segs = keypath::split(path);
  double w = 1.0;
  std::size_t best = 0;
  bool found = false;
  for (const auto& [pattern, value] : weights) {
    const auto pat = keypath::split(pattern);
    if (pat.size() > segs.size()) continue;
    bool match = true;
    for (std::size_t i = 0; i < pat.size() && match; ++i) match = pat[i] == "*" || pat[i] == segs[i];
    if (match && (!found || pat.size() > best)) {
      found = true;
      best = pat.size();
      w = value;
    }
  }
  return w;
}

}  // namespace

std::map<std::string, Json> flatten_leaves(const WorldSpec& spec) {
  Json doc = to_json(spec);
  doc.erase("seed");
  Json objects = std::move(doc["objects"]);
  doc.erase("objects");
  std::map<std::string, Json> out;
  flatten_into(doc, "", out);
  for (Json& o : objects) {
    const std::string id = o["id"].get<std::string>();
    o.erase("id");
    flatten_into(o, "objects." + id, out);
  }
  return out;
}

double parameter_distance(const WorldSpec& a, const WorldSpec& b, const WeightMap& weights,
                          std::vector<PathDelta>* deltas) {
  const auto la = flatten_leaves(a);
  const auto lb = flatten_leaves(b);
  std::set<std::string> paths;
  for (const auto& [p, _] : la) paths.insert(p);
  for (const auto& [p, _] : lb) paths.insert(p);
  double sum = 0.0;
  for (const std::string& p : paths) {
    auto ia = la.find(p);
    auto ib = lb.find(p);
    const double d = leaf_distance(ia == la.end() ? nullptr : &ia->second, ib == lb.end() ? nullptr : &ib->second);
    if (d == 0.0) continue;
    const double wd = weight_for(weights, p) * d;
    sum += wd * wd;
    if (deltas) deltas->push_back({p, d});
  }
  return std::sqrt(sum);
}

double color_distance(const Rgb& a, const Rgb& b) {
  const double dr = double(a.r) - double(b.r);
  const double dg = double(a.g) - double(b.g);
  const double db = double(a.b) - double(b.b);
  return std::sqrt(dr * dr + dg * dg + db * db);
}

double color_distance(const WorldSpec& a, const WorldSpec& b) {
  // integer squared terms keep the sum exact, hence symmetric
  auto sq = [](const Rgb& x, const Rgb& y) {
    const long dr = x.r - y.r, dg = x.g - y.g, db = x.b - y.b;
    return dr * dr + dg * dg + db * db;
  };
  long sum = sq(a.environment.background_color, b.environment.background_color);
  const Rgb black{0, 0, 0};
  for (const ObjectSpec& o : a.objects) {
    const ObjectSpec* other = b.find_object(o.id);
    sum += sq(o.color, other ? other->color : black);
  }
  for (const ObjectSpec& o : b.objects)
    if (!a.find_object(o.id)) sum += sq(o.color, black);
  return std::sqrt(static_cast<double>(sum));
}

int OccupancyGrid::count() const {
  int n = 0;
  for (bool c : cells) n += c ? 1 : 0;
  return n;
}

OccupancyGrid rasterize(const WorldSpec& spec, double cell_size) {
  if (!(cell_size > 0) || !std::isfinite(cell_size)) throw ArgumentError("cell_size must be > 0");
  const Bounds& bounds = spec.environment.bounds;
  OccupancyGrid g;
  g.nx = std::max(1, int(std::ceil(bounds.width() / cell_size)));
  g.ny = std::max(1, int(std::ceil(bounds.height() / cell_size)));
  g.cells.assign(std::size_t(g.nx) * std::size_t(g.ny), false);
  for (const ObjectSpec& o : spec.objects) {
    // only cells within the disk's bounding box can overlap it
    const int i0 = std::max(0, int(std::floor((o.position.x() - o.radius - bounds.min.x()) / cell_size)));
    const int i1 = std::min(g.nx - 1, int(std::floor((o.position.x() + o.radius - bounds.min.x()) / cell_size)));
    const int j0 = std::max(0, int(std::floor((o.position.y() - o.radius - bounds.min.y()) / cell_size)));
    const int j1 = std::min(g.ny - 1, int(std::floor((o.position.y() + o.radius - bounds.min.y()) / cell_size)));
    for (int j = j0; j <= j1; ++j) {
      for (int i = i0; i <= i1; ++i) {
        Bounds cell;
        cell.min = bounds.min + Vector2(i * cell_size, j * cell_size);
        cell.max = (cell.min + Vector2(cell_size, cell_size)).cwiseMin(bounds.max);
        if (disk_overlaps_rect(o.position, o.radius, cell)) g.cells[std::size_t(j) * g.nx + i] = true;
      }
    }
  }
  return g;
}

double occupancy_distance(const WorldSpec& a, const WorldSpec& b, double cell_size) {
  if (!(a.environment.bounds == b.environment.bounds))
    throw BoundsMismatch("occupancy maps need identical environment bounds");
  const OccupancyGrid ga = rasterize(a, cell_size);
  const OccupancyGrid gb = rasterize(b, cell_size);
  int inter = 0, uni = 0;
  for (std::size_t k = 0; k < ga.cells.size(); ++k) {
    inter += (ga.cells[k] && gb.cells[k]) ? 1 : 0;
    uni += (ga.cells[k] || gb.cells[k]) ? 1 : 0;
  }
  if (uni == 0) return 0.0;
  return 1.0 - double(inter) / double(uni);
}

SimilarityReport compare(const WorldSpec& a, const WorldSpec& b, double cell_size, const WeightMap& weights) {
  SimilarityReport r;
  r.cell_size = cell_size;
  r.parameter_distance = parameter_distance(a, b, weights, &r.per_path_deltas);
  r.color_distance = color_distance(a, b);
  r.occupancy_distance = occupancy_distance(a, b, cell_size);
  return r;
}

Json to_json(const SimilarityReport& r) {
  Json deltas = Json::array();
  for (const auto& d : r.per_path_deltas) deltas.push_back({{"path", d.path}, {"delta", d.delta}});
  return {{"parameter_distance", r.parameter_distance},
          {"color_distance", r.color_distance},
          {"occupancy_distance", r.occupancy_distance},
          {"cell_size", r.cell_size},
          {"per_path_deltas", deltas},
          {"note", "heuristic similarity; not a prediction of agent transfer"}};
}

WeightMap weights_from_json(const Json& j) {
  if (!j.is_object()) throw ConfigError("weights must be an object of key-path to number");
  WeightMap w;
  for (const auto& [k, v] : j.items()) {
    if (!v.is_number() || !(v.get<double>() >= 0) || !std::isfinite(v.get<double>()))
      throw ConfigError("weight for '" + k + "' must be a non-negative number");
    w[k] = v.get<double>();
  }
  return w;
}

}  // namespace l2x
