#ifndef L2X_TESTS_SYNTHETIC_LOG_HPP
#define L2X_TESTS_SYNTHETIC_LOG_HPP

// Hand-built two-task lifetime whose metrics are known in closed form:
//   block 0 eval  A=0  B=2
//   block 1 learn A    (40 episodes at 0, then 1)
//   block 2 eval  A=10 B=5
//   block 3 learn B    (constant 2)
//   block 4 eval  A=8
//   block 5 eval  A=6
// giving maintenance(A) = -3, forward(A->B) = +3, backward(A->B) = -2.
// Against experts (A: 90 episodes at 0, then 1; B: constant 1) the relative
// performance of B is 2 and the sample efficiency of A is 100 / 50 = 2.

#include "l2x/curriculum.hpp"

#include <functional>
#include <vector>

namespace l2x::testing {

using Transform = std::function<double(double)>;

inline EpisodeRecord record(const std::string& life, int block, BlockKind kind, const std::string& task,
                            std::int64_t ep, double reward) {
  return EpisodeRecord{life, block, kind, task, "0000000000000000", ep, reward, 10, 1.0};
}

inline void eval_block(std::vector<EpisodeRecord>& log, int block, const std::string& task, double mean,
                       std::int64_t& ep, const Transform& f) {
  // three episodes around the mean
  for (double d : {-1.0, 0.0, 1.0}) log.push_back(record("synthetic", block, BlockKind::Eval, task, ep++, f(mean + d)));
}

inline std::vector<EpisodeRecord> synthetic_lifetime(const Transform& f = [](double x) { return x; }) {
  std::vector<EpisodeRecord> log;
  std::int64_t ep = 0;
  eval_block(log, 0, "A", 0, ep, f);
  eval_block(log, 0, "B", 2, ep, f);
  for (int i = 0; i < 200; ++i) log.push_back(record("synthetic", 1, BlockKind::Learn, "A", i, f(i < 40 ? 0 : 1)));
  ep = 0;
  eval_block(log, 2, "A", 10, ep, f);
  eval_block(log, 2, "B", 5, ep, f);
  for (int i = 0; i < 200; ++i) log.push_back(record("synthetic", 3, BlockKind::Learn, "B", i, f(2)));
  ep = 0;
  eval_block(log, 4, "A", 8, ep, f);
  ep = 0;
  eval_block(log, 5, "A", 6, ep, f);
  return log;
}

inline std::vector<EpisodeRecord> synthetic_ste(const std::string& task,
                                                const Transform& f = [](double x) { return x; }) {
  std::vector<EpisodeRecord> log;
  for (int i = 0; i < 200; ++i) {
    const double v = task == "A" ? (i < 90 ? 0 : 1) : 1;
    log.push_back(record("ste_" + task, 0, BlockKind::Learn, task, i, f(v)));
  }
  return log;
}

}  // namespace l2x::testing

#endif  // L2X_TESTS_SYNTHETIC_LOG_HPP
