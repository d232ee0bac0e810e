#include "l2x/metrics.hpp"

#include "l2x/errors.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <limits>
#include <set>

namespace l2x {

namespace {

struct BlockSummary {
  int index = 0;
  BlockKind kind = BlockKind::Learn;
  std::map<std::string, std::pair<double, std::int64_t>> tasks;  // reward sum, episodes

  bool has(const std::string& t) const { return tasks.count(t) > 0; }
  double mean(const std::string& t) const {
    const auto& [sum, n] = tasks.at(t);
    return sum / static_cast<double>(n);
  }
};

// Blocks in order of first appearance in the log.
std::vector<BlockSummary> summarize(const std::vector<EpisodeRecord>& log) {
  std::vector<BlockSummary> blocks;
  std::map<int, std::size_t> where;
  for (const EpisodeRecord& r : log) {
    auto it = where.find(r.block_index);
    if (it == where.end()) {
      it = where.emplace(r.block_index, blocks.size()).first;
      blocks.push_back({r.block_index, r.block_kind, {}});
    }
    BlockSummary& b = blocks[it->second];
    if (b.kind != r.block_kind)
      throw LogFormatError("block " + std::to_string(r.block_index) + " mixes learn and eval records");
    auto& [sum, n] = b.tasks[r.task_name];
    sum += r.total_reward;
    ++n;
  }
  return blocks;
}

constexpr std::size_t npos = std::numeric_limits<std::size_t>::max();

std::size_t first_learn(const std::vector<BlockSummary>& blocks, const std::string& task) {
  for (std::size_t i = 0; i < blocks.size(); ++i)
    if (blocks[i].kind == BlockKind::Learn && blocks[i].has(task)) return i;
  return npos;
}

std::size_t last_learn(const std::vector<BlockSummary>& blocks, const std::string& task) {
  std::size_t found = npos;
  for (std::size_t i = 0; i < blocks.size(); ++i)
    if (blocks[i].kind == BlockKind::Learn && blocks[i].has(task)) found = i;
  return found;
}

bool is_eval_of(const BlockSummary& b, const std::string& task) { return b.kind == BlockKind::Eval && b.has(task); }

double interpolate(const std::vector<CurvePoint>& pts, double x) {
  auto it = std::lower_bound(pts.begin(), pts.end(), x,
                             [](const CurvePoint& p, double v) { return p.experience < v; });
  if (it == pts.begin()) return it->performance;
  if (it == pts.end()) return pts.back().performance;
  if (it->experience == x) return it->performance;
  const CurvePoint& hi = *it;
  const CurvePoint& lo = *(it - 1);
  const double t = (x - lo.experience) / (hi.experience - lo.experience);
  return lo.performance + t * (hi.performance - lo.performance);
}

void check_curve(const PerformanceCurve& c) {
  if (c.points.empty()) throw NoData("curve for '" + c.task_name + "' is empty");
  for (std::size_t i = 1; i < c.points.size(); ++i)
    if (!(c.points[i].experience > c.points[i - 1].experience))
      throw ArgumentError("curve for '" + c.task_name + "' must have strictly increasing experience");
}

template <typename F>
MetricEntry attempt(F&& fn) {
  MetricEntry e;
  try {
    e.value = fn();
  } catch (const Error& err) {
    e.absent_reason = std::string(err.code()) + ": " + err.what();
  }
  return e;
}

Json entry_json(const MetricEntry& e) {
  if (e.value) return {{"value", *e.value}};
  return {{"absent", e.absent_reason}};
}

}  // namespace

double block_performance(const std::vector<EpisodeRecord>& log, int block_index, const std::string& task) {
  double sum = 0.0;
  std::int64_t n = 0;
  for (const EpisodeRecord& r : log) {
    if (r.block_index == block_index && r.task_name == task) {
      sum += r.total_reward;
      ++n;
    }
  }
  if (n == 0) throw NoData("no episodes of '" + task + "' in block " + std::to_string(block_index));
  return sum / static_cast<double>(n);
}

double performance_maintenance(const std::vector<EpisodeRecord>& log, const std::string& task) {
  const auto blocks = summarize(log);
  const std::size_t last = last_learn(blocks, task);
  if (last == npos) throw InsufficientData("'" + task + "' has no learning block");
  std::vector<double> evals;
  for (std::size_t i = last + 1; i < blocks.size(); ++i)
    if (is_eval_of(blocks[i], task)) evals.push_back(blocks[i].mean(task));
  if (evals.size() < 2)
    throw InsufficientData("'" + task + "' needs an end-of-learning evaluation and a later one");
  double sum = 0.0;
  for (std::size_t i = 1; i < evals.size(); ++i) sum += evals[i] - evals[0];
  return sum / static_cast<double>(evals.size() - 1);
}

double forward_transfer(const std::vector<EpisodeRecord>& log, const std::string& a, const std::string& b) {
  const auto blocks = summarize(log);
  const std::size_t la = first_learn(blocks, a);
  const std::size_t lb = first_learn(blocks, b);
  if (la == npos || lb == npos || la >= lb)
    throw InsufficientData("'" + a + "' must be learned before '" + b + "'");
  std::size_t first_any = npos;
  for (std::size_t i = 0; i < blocks.size() && first_any == npos; ++i)
    if (blocks[i].kind == BlockKind::Learn) first_any = i;
  std::optional<double> before, after;
  for (std::size_t i = 0; i < first_any; ++i)
    if (is_eval_of(blocks[i], b)) before = blocks[i].mean(b);
  for (std::size_t i = la + 1; i < lb; ++i)
    if (is_eval_of(blocks[i], b)) after = blocks[i].mean(b);
  if (!before) throw InsufficientData("no evaluation of '" + b + "' before any learning");
  if (!after) throw InsufficientData("no evaluation of '" + b + "' between learning '" + a + "' and '" + b + "'");
  return *after - *before;
}

double backward_transfer(const std::vector<EpisodeRecord>& log, const std::string& a, const std::string& b) {
  const auto blocks = summarize(log);
  const std::size_t la = first_learn(blocks, a);
  const std::size_t lb = first_learn(blocks, b);
  if (la == npos || lb == npos || la >= lb)
    throw InsufficientData("'" + a + "' must be learned before '" + b + "'");
  std::optional<double> ref, after;
  for (std::size_t i = la + 1; i < lb; ++i) {
    if (blocks[i].kind == BlockKind::Learn && blocks[i].has(a)) ref.reset();
    if (is_eval_of(blocks[i], a)) ref = blocks[i].mean(a);
  }
  for (std::size_t i = lb + 1; i < blocks.size() && !after; ++i) {
    if (blocks[i].kind == BlockKind::Learn && blocks[i].has(a)) break;
    if (is_eval_of(blocks[i], a)) after = blocks[i].mean(a);
  }
  if (!ref) throw InsufficientData("no evaluation of '" + a + "' after learning it and before '" + b + "'");
  if (!after) throw InsufficientData("no evaluation of '" + a + "' after learning '" + b + "'");
  return *after - *ref;
}

PerformanceCurve learning_curve(const std::vector<EpisodeRecord>& log, const std::string& task) {
  PerformanceCurve c;
  c.task_name = task;
  for (const EpisodeRecord& r : log)
    if (r.block_kind == BlockKind::Learn && r.task_name == task)
      c.points.push_back({static_cast<double>(c.points.size() + 1), r.total_reward});
  return c;
}

double relative_performance(const PerformanceCurve& ll, const PerformanceCurve& ste) {
  if (ll.points.empty() || ste.points.empty()) throw EmptyOverlap("both curves need points");
  check_curve(ll);
  check_curve(ste);
  const double lo = std::max(ll.points.front().experience, ste.points.front().experience);
  const double hi = std::min(ll.points.back().experience, ste.points.back().experience);
  if (!(hi > lo)) throw EmptyOverlap("curves share no experience range");
  std::vector<double> xs = {lo, hi};
  for (const auto* c : {&ll, &ste})
    for (const CurvePoint& p : c->points)
      if (p.experience > lo && p.experience < hi) xs.push_back(p.experience);
  std::sort(xs.begin(), xs.end());
  xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
  double area_ll = 0.0, area_ste = 0.0;
  for (std::size_t i = 1; i < xs.size(); ++i) {
    const double w = xs[i] - xs[i - 1];
    area_ll += 0.5 * w * (interpolate(ll.points, xs[i - 1]) + interpolate(ll.points, xs[i]));
    area_ste += 0.5 * w * (interpolate(ste.points, xs[i - 1]) + interpolate(ste.points, xs[i]));
  }
  if (!(area_ste > 0)) throw DivisionDegenerate("single-task expert area is not positive");
  return area_ll / area_ste;
}

std::vector<double> smooth(const PerformanceCurve& curve, int window) {
  if (window < 1) throw ArgumentError("smoothing window must be >= 1");
  std::vector<double> out;
  out.reserve(curve.points.size());
  for (std::size_t i = 0; i < curve.points.size(); ++i) {
    const std::size_t start = i + 1 >= std::size_t(window) ? i + 1 - window : 0;
    double sum = 0.0;
    for (std::size_t k = start; k <= i; ++k) sum += curve.points[k].performance;
    out.push_back(sum / static_cast<double>(i + 1 - start));
  }
  return out;
}

SampleEfficiencyResult sample_efficiency(const PerformanceCurve& ll, const PerformanceCurve& ste, int window,
                                         double fraction) {
  check_curve(ll);
  check_curve(ste);
  const auto s_ste = smooth(ste, window);
  const auto s_ll = smooth(ll, window);
  const double peak = *std::max_element(s_ste.begin(), s_ste.end());
  SampleEfficiencyResult r;
  r.threshold = peak - (1.0 - fraction) * std::abs(peak);
  auto reach = [&](const std::vector<double>& s, const PerformanceCurve& c) -> std::optional<double> {
    for (std::size_t i = 0; i < s.size(); ++i)
      if (s[i] >= r.threshold) return c.points[i].experience;
    return std::nullopt;
  };
  r.ste_experience = *reach(s_ste, ste);
  r.ll_experience = reach(s_ll, ll);
  if (!r.ll_experience) {
    r.flagged = true;
    r.value = 0.0;
  } else {
    r.value = r.ste_experience / *r.ll_experience;
  }
  return r;
}

SteRegistry ste_registry(const std::vector<std::vector<EpisodeRecord>>& logs) {
  SteRegistry reg;
  for (const auto& log : logs) {
    std::set<std::string> tasks;
    for (const EpisodeRecord& r : log)
      if (r.block_kind == BlockKind::Learn) tasks.insert(r.task_name);
    for (const std::string& t : tasks) {
      if (reg.count(t)) throw LogFormatError("more than one single-task-expert log covers '" + t + "'");
      reg[t] = learning_curve(log, t);
    }
  }
  return reg;
}

SteRegistry load_ste_dir(const std::string& dir) {
  namespace fs = std::filesystem;
  if (!fs::is_directory(dir)) throw LogFormatError("STE directory '" + dir + "' does not exist");
  std::vector<std::string> files;
  for (const auto& e : fs::directory_iterator(dir))
    if (e.is_regular_file() && e.path().filename().string().ends_with(".l2log.jsonl")) files.push_back(e.path().string());
  std::sort(files.begin(), files.end());
  std::vector<std::vector<EpisodeRecord>> logs;
  for (const auto& f : files) logs.push_back(read_log_file(f));
  return ste_registry(logs);
}

MetricsReport compute_report(const std::vector<EpisodeRecord>& log, const SteRegistry& ste) {
  if (log.empty()) throw LogFormatError("log holds no episode records");
  const auto blocks = summarize(log);
  MetricsReport rep;
  std::set<std::string> seen;
  for (const EpisodeRecord& r : log)
    if (seen.insert(r.task_name).second) rep.tasks.push_back(r.task_name);

  std::vector<std::string> learned;
  for (const std::string& t : rep.tasks)
    if (first_learn(blocks, t) != npos) learned.push_back(t);
  std::sort(learned.begin(), learned.end(), [&](const std::string& x, const std::string& y) {
    return first_learn(blocks, x) < first_learn(blocks, y);
  });

  for (const std::string& t : learned) rep.maintenance[t] = attempt([&] { return performance_maintenance(log, t); });
  for (std::size_t i = 0; i < learned.size(); ++i) {
    for (std::size_t j = 0; j < learned.size(); ++j) {
      const std::string& a = learned[i];
      const std::string& b = learned[j];
      if (first_learn(blocks, a) >= first_learn(blocks, b)) continue;
      rep.forward_transfer.push_back({a, b, attempt([&] { return forward_transfer(log, a, b); })});
      rep.backward_transfer.push_back({a, b, attempt([&] { return backward_transfer(log, a, b); })});
    }
  }
  for (const std::string& t : learned) {
    auto it = ste.find(t);
    if (it == ste.end()) {
      rep.relative_performance[t] = {std::nullopt, "no single-task-expert curve for '" + t + "'"};
      rep.sample_efficiency[t] = rep.relative_performance[t];
      continue;
    }
    const PerformanceCurve ll = learning_curve(log, t);
    rep.relative_performance[t] = attempt([&] { return relative_performance(ll, it->second); });
    rep.sample_efficiency[t] = attempt([&] {
      const SampleEfficiencyResult r = sample_efficiency(ll, it->second);
      rep.sample_efficiency_detail[t] = r;
      return r.value;
    });
  }
  return rep;
}

Json to_json(const MetricsReport& rep) {
  Json j;
  j["constants"] = {{"sample_efficiency_fraction", kSampleEfficiencyFraction},
                    {"smoothing_window", kSmoothingWindow},
                    {"experience_unit", "learning episodes"},
                    {"maintenance_reference", "first evaluation after the final learning block"}};
  j["tasks"] = rep.tasks;
  j["maintenance"] = Json::object();
  for (const auto& [t, e] : rep.maintenance) j["maintenance"][t] = entry_json(e);
  for (const char* key : {"forward_transfer", "backward_transfer"}) {
    const auto& pairs = std::string(key) == "forward_transfer" ? rep.forward_transfer : rep.backward_transfer;
    j[key] = Json::array();
    for (const PairEntry& p : pairs) {
      Json e = entry_json(p.metric);
      e["from"] = p.from;
      e["to"] = p.to;
      j[key].push_back(e);
    }
  }
  j["relative_performance"] = Json::object();
  for (const auto& [t, e] : rep.relative_performance) j["relative_performance"][t] = entry_json(e);
  j["sample_efficiency"] = Json::object();
  for (const auto& [t, e] : rep.sample_efficiency) {
    Json x = entry_json(e);
    if (auto it = rep.sample_efficiency_detail.find(t); it != rep.sample_efficiency_detail.end()) {
      x["flagged"] = it->second.flagged;
      x["threshold"] = it->second.threshold;
      x["ste_experience"] = it->second.ste_experience;
      x["ll_experience"] = it->second.ll_experience ? Json(*it->second.ll_experience) : Json();
    }
    j["sample_efficiency"][t] = x;
  }
  return j;
}

}  // namespace l2x
