#pragma once

// Operator commands. Exit codes: 0 success, 1 runtime failure, 2 usage error.

#include <cstddef>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "sadf/bench_report.hpp"
#include "sadf/classifiers.hpp"
#include "sadf/config.hpp"
#include "sadf/preprocess.hpp"

namespace sadf {

struct TrainOutcome {
  Encoder encoder;
  TrainedModel model;
  EvalMetrics metrics;  // zeroed when the test side is empty
  std::size_t train_rows = 0;
  std::size_t test_rows = 0;
};

/// Fits the encoder on `train`, trains cfg.model and evaluates on `test`.
TrainOutcome fit_and_evaluate(std::span<const FlowRecord> train, std::span<const FlowRecord> test,
                              const DatasetSchema& schema, const RunConfig& cfg);

/// Bench settings read from `bench.*` keys.
struct BenchPlan {
  std::vector<std::string> models = {"dt", "rf", "nb", "svm"};
  std::vector<std::size_t> counts = {100000, 450000};
  std::vector<std::size_t> chunks = {300};
  std::vector<std::size_t> workers = {1};
  std::size_t repetitions = 3;
  std::size_t train_rows = 20000;
  std::filesystem::path source;  // synthesized when empty
  std::filesystem::path train;   // synthesized when empty
  TableFormat format = TableFormat::both;
};

/// Moves `bench.*` keys out of `kv` into a plan.
BenchPlan take_bench_plan(KeyValues& kv);

/// Trains every plan model, builds the ladder under out_dir and runs the matrix.
std::vector<BenchRow> run_bench_plan(const BenchPlan& plan, const RunConfig& cfg, const std::filesystem::path& out_dir,
                                     std::ostream& log);

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace sadf
