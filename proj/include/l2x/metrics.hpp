#ifndef L2X_METRICS_HPP
#define L2X_METRICS_HPP

#include "l2x/curriculum.hpp"

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace l2x {

struct CurvePoint {
  double experience = 0.0;  // cumulative learning episodes on the task
  double performance = 0.0;
};

struct PerformanceCurve {
  std::string task_name;
  std::vector<CurvePoint> points;
};

/// Mean total_reward of `task` in `block_index`. Throws NoData.
double block_performance(const std::vector<EpisodeRecord>& log, int block_index, const std::string& task);

/// Mean over evaluations after the first post-learning evaluation of their
/// difference from it. Throws InsufficientData.
double performance_maintenance(const std::vector<EpisodeRecord>& log, const std::string& task);

/// Evaluation of B after A's first learning block and before B's, minus the
/// evaluation of B before any learning. Throws InsufficientData.
double forward_transfer(const std::vector<EpisodeRecord>& log, const std::string& a, const std::string& b);

/// First evaluation of A after B's first learning block, minus the last
/// evaluation of A before it. Throws InsufficientData.
double backward_transfer(const std::vector<EpisodeRecord>& log, const std::string& a, const std::string& b);

/// Learning-block episodes of `task` in log order.
PerformanceCurve learning_curve(const std::vector<EpisodeRecord>& log, const std::string& task);

/// Area ratio LL / STE over the shared experience range with linear
/// interpolation between points. Throws EmptyOverlap, DivisionDegenerate.
double relative_performance(const PerformanceCurve& ll, const PerformanceCurve& ste);

struct SampleEfficiencyResult {
  double value = 0.0;
  bool flagged = false;  // LL never reached the threshold
  double threshold = 0.0;
  double ste_experience = 0.0;
  std::optional<double> ll_experience;
};

inline constexpr double kSampleEfficiencyFraction = 0.95;
inline constexpr int kSmoothingWindow = 10;

/// Trailing moving average over the last `window` points.
std::vector<double> smooth(const PerformanceCurve& curve, int window = kSmoothingWindow);

/// Threshold is the STE smoothed maximum less (1 - fraction) of its
/// magnitude; returns STE experience / LL experience to first reach it.
/// Throws NoData for an empty curve.
SampleEfficiencyResult sample_efficiency(const PerformanceCurve& ll, const PerformanceCurve& ste,
                                         int window = kSmoothingWindow,
                                         double fraction = kSampleEfficiencyFraction);

using SteRegistry = std::map<std::string, PerformanceCurve>;

/// Learning curves of every task in the given logs. Throws LogFormatError
/// when two logs cover the same task.
SteRegistry ste_registry(const std::vector<std::vector<EpisodeRecord>>& logs);
/// Every `*.l2log.jsonl` file directly inside `dir`.
SteRegistry load_ste_dir(const std::string& dir);

/// A metric value or the reason it could not be computed.
struct MetricEntry {
  std::optional<double> value;
  std::string absent_reason;
};

struct PairEntry {
  std::string from;
  std::string to;
  MetricEntry metric;
};

struct MetricsReport {
  std::vector<std::string> tasks;
  std::map<std::string, MetricEntry> maintenance;
  std::vector<PairEntry> forward_transfer;
  std::vector<PairEntry> backward_transfer;
  std::map<std::string, MetricEntry> relative_performance;
  std::map<std::string, MetricEntry> sample_efficiency;
  std::map<std::string, SampleEfficiencyResult> sample_efficiency_detail;
};

/// Throws LogFormatError for an empty log.
MetricsReport compute_report(const std::vector<EpisodeRecord>& log, const SteRegistry& ste);
Json to_json(const MetricsReport& report);

}  // namespace l2x

#endif  // L2X_METRICS_HPP
