#include "l2x/errors.hpp"
#include "l2x/metrics.hpp"
#include "support/synthetic_log.hpp"

#include <doctest.h>

#include <filesystem>
#include <fstream>

using namespace l2x;

namespace {

PerformanceCurve curve(std::vector<std::pair<double, double>> pts) {
  PerformanceCurve c;
  for (auto [x, y] : pts) c.points.push_back({x, y});
  return c;
}

}  // namespace

TEST_CASE("hand-built lifetime gives the closed-form metrics") {
  const auto log = testing::synthetic_lifetime();
  CHECK(block_performance(log, 2, "A") == 10);
  CHECK(performance_maintenance(log, "A") == doctest::Approx(-3));
  CHECK(forward_transfer(log, "A", "B") == doctest::Approx(3));
  CHECK(backward_transfer(log, "A", "B") == doctest::Approx(-2));
  const SteRegistry ste = ste_registry({testing::synthetic_ste("A"), testing::synthetic_ste("B")});
  CHECK(relative_performance(learning_curve(log, "B"), ste.at("B")) == doctest::Approx(2));
  const SampleEfficiencyResult se = sample_efficiency(learning_curve(log, "A"), ste.at("A"));
  CHECK(se.value == doctest::Approx(2));
  CHECK(se.threshold == doctest::Approx(0.95));
  CHECK(se.ste_experience == 100);
  CHECK(*se.ll_experience == 50);
  CHECK_FALSE(se.flagged);
}

TEST_CASE("missing data is reported, not invented") {
  const auto log = testing::synthetic_lifetime();
  CHECK_THROWS_AS(block_performance(log, 1, "B"), NoData);
  CHECK_THROWS_AS(performance_maintenance(log, "B"), InsufficientData);
  CHECK_THROWS_AS(forward_transfer(log, "B", "A"), InsufficientData);
  CHECK_THROWS_AS(backward_transfer(log, "B", "A"), InsufficientData);
}

TEST_CASE("relative performance uses the shared range") {
  const PerformanceCurve ll = curve({{1, 2}, {2, 2}, {3, 2}, {4, 2}});
  const PerformanceCurve ste = curve({{1, 1}, {3, 3}});
  // shared range [1, 3]: LL area 4, STE area 4
  CHECK(relative_performance(ll, ste) == doctest::Approx(1.0));
  CHECK_THROWS_AS(relative_performance(curve({{1, 1}, {2, 1}}), curve({{5, 1}, {6, 1}})), EmptyOverlap);
  CHECK_THROWS_AS(relative_performance(ll, curve({{1, 0}, {4, 0}})), DivisionDegenerate);
}

TEST_CASE("smoothing is a trailing mean") {
  const auto s = smooth(curve({{1, 0}, {2, 3}, {3, 6}, {4, 9}}), 2);
  CHECK(s == std::vector<double>{0, 1.5, 4.5, 7.5});
}

TEST_CASE("sample efficiency flags a learner that never gets there") {
  const SampleEfficiencyResult r = sample_efficiency(curve({{1, 0}, {2, 0}}), curve({{1, 1}, {2, 1}}), 1);
  CHECK(r.flagged);
  CHECK(r.value == 0);
  CHECK_FALSE(r.ll_experience.has_value());
  CHECK_THROWS_AS(sample_efficiency(curve({}), curve({{1, 1}})), NoData);
}

TEST_CASE("metrics are invariant under shift and scale") {
  const auto shift = [](double x) { return x + 17.25; };
  const auto scale = [](double x) { return x * 3.5; };
  const auto shifted = testing::synthetic_lifetime(shift);
  CHECK(performance_maintenance(shifted, "A") == doctest::Approx(-3).epsilon(1e-12));
  CHECK(forward_transfer(shifted, "A", "B") == doctest::Approx(3).epsilon(1e-12));
  CHECK(backward_transfer(shifted, "A", "B") == doctest::Approx(-2).epsilon(1e-12));
  const auto scaled = testing::synthetic_lifetime(scale);
  const SteRegistry ste = ste_registry({testing::synthetic_ste("A", scale), testing::synthetic_ste("B", scale)});
  CHECK(relative_performance(learning_curve(scaled, "B"), ste.at("B")) == doctest::Approx(2).epsilon(1e-12));
  CHECK(sample_efficiency(learning_curve(scaled, "A"), ste.at("A")).value == doctest::Approx(2).epsilon(1e-12));
}

TEST_CASE("report lists pairs in learning order with reasons for gaps") {
  const auto log = testing::synthetic_lifetime();
  const SteRegistry ste = ste_registry({testing::synthetic_ste("B")});
  const MetricsReport r = compute_report(log, ste);
  CHECK(r.tasks == std::vector<std::string>{"A", "B"});
  REQUIRE(r.forward_transfer.size() == 1);
  CHECK(r.forward_transfer[0].from == "A");
  CHECK(*r.forward_transfer[0].metric.value == doctest::Approx(3));
  CHECK_FALSE(r.maintenance.at("B").value.has_value());
  CHECK_FALSE(r.maintenance.at("B").absent_reason.empty());
  CHECK_FALSE(r.relative_performance.at("A").value.has_value());
  CHECK(*r.relative_performance.at("B").value == doctest::Approx(2));
  const Json j = to_json(r);
  CHECK(j["maintenance"]["A"]["value"].get<double>() == doctest::Approx(-3));
  CHECK(j["maintenance"]["B"].contains("absent"));
  CHECK(j["constants"]["smoothing_window"] == kSmoothingWindow);
  CHECK_THROWS_AS(compute_report({}, ste), LogFormatError);
}

TEST_CASE("expert logs load from a directory and must not overlap") {
  const auto dir = std::filesystem::temp_directory_path() / "l2x_test_metrics";
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  for (const char* t : {"A", "B"}) {
    std::ofstream out(dir / (std::string(t) + ".l2log.jsonl"));
    for (const auto& r : testing::synthetic_ste(t)) out << to_log_line(r) << "\n";
  }
  std::ofstream(dir / "notes.txt") << "ignored";
  const SteRegistry ste = load_ste_dir(dir.string());
  CHECK(ste.size() == 2);
  CHECK(ste.at("A").points.size() == 200);
  CHECK_THROWS_AS(ste_registry({testing::synthetic_ste("A"), testing::synthetic_ste("A")}), LogFormatError);
}
