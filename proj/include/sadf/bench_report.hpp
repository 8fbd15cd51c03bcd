#pragma once

// Benchmark matrix over (model, record count, chunk size, workers). Inputs
// are head-prefix files cut from one source CSV; every case is run a fixed
// number of times and the phase timings are averaged.

#include <cstddef>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "sadf/classifiers.hpp"
#include "sadf/detect_engine.hpp"
#include "sadf/preprocess.hpp"

namespace sadf {

struct LadderFile {
  std::size_t count = 0;
  std::filesystem::path path;
  std::uintmax_t bytes = 0;
};

/// Writes `ladder_<count>.csv` under out_dir holding the first `count` data
/// rows of the source (header kept when present). Counts are sorted and
/// de-duplicated. Throws Error(usage) for a zero count and
/// Error(insufficient_rows) when the source is too short.
std::vector<LadderFile> make_ladder(const std::filesystem::path& source, const DatasetSchema& schema,
                                    std::vector<std::size_t> counts, const std::filesystem::path& out_dir);

struct BenchCase {
  std::string model_id;
  std::size_t records = 0;
  std::filesystem::path input;
  std::size_t chunk_size = 300;
  std::size_t workers = 1;
  std::size_t repetitions = 3;
  double file_mb = 0.0;
};

struct BenchRow {
  BenchCase bench_case;
  PhaseTimings mean;
  std::vector<PhaseTimings> runs;
  std::size_t records_seen = 0;
  double throughput_pps = 0.0;  // records_seen / mean total
  bool failed = false;
  std::string error;
};

/// Records per second of total run time; 0 when total_s is not positive.
double throughput_pps(std::size_t records, double total_s) noexcept;

/// Arithmetic mean of each phase.
PhaseTimings mean_timings(std::span<const PhaseTimings> runs);

/// Runs cases one at a time. A case whose engine run throws is marked failed
/// and the suite moves on.
std::vector<BenchRow> run_bench(std::span<const BenchCase> cases, const std::map<std::string, TrainedModel>& models,
                                const Encoder& encoder, const DatasetSchema& schema,
                                const std::function<void(const BenchRow&)>& progress = {});

enum class BenchMetric { detect, load, preprocess, total, throughput };

/// Record counts down, one column per model configuration across.
struct BenchTable {
  std::string name;
  std::vector<std::string> columns;
  std::vector<std::size_t> counts;
  std::vector<double> file_mb;
  std::vector<std::vector<std::optional<double>>> cells;  // [count][column]
  bool with_size = false;
};

BenchTable build_table(std::span<const BenchRow> rows, BenchMetric metric);

enum class TableFormat { csv, json, both };

/// Writes detect_time, load_time, preprocess_time, total_time and throughput
/// tables plus runs.csv. Output is a pure function of `rows`. Throws
/// Error(usage) on empty input and Error(sink_write_failure) on I/O errors.
std::vector<std::filesystem::path> emit_tables(std::span<const BenchRow> rows, const std::filesystem::path& out_dir,
                                               TableFormat format = TableFormat::both);

/// meta.json: CPU, core count, repetitions, failed cases and the config text.
std::filesystem::path write_bench_meta(std::span<const BenchRow> rows, const std::filesystem::path& out_dir,
                                       const std::string& config_snapshot);

std::string cpu_model_name();

}  // namespace sadf
