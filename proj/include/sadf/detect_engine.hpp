#pragma once

// Near-real-time detection loop. Records stream from a source in fixed-size
// chunks; a dispatcher hands chunks to a worker pool for encoding and
// classification and a sequencer collects results back in chunk order,
// raising one alert per chunk whose attack count reaches the threshold.
//
// A run proceeds in windows of several chunks. Each window goes through three
// timed phases (load and distribute, preprocess, detect), so the phase times
// add up to the run's wall time.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "sadf/classifiers.hpp"
#include "sadf/flow_schema.hpp"
#include "sadf/preprocess.hpp"

namespace sadf {

// ---------------------------------------------------------------------------
// Sources and chunks

class RecordSource {
 public:
  virtual ~RecordSource() = default;
  virtual std::optional<FlowRecord> next() = 0;
};

class CsvSource final : public RecordSource {
 public:
  /// Throws Error(source_unreadable) when the file cannot be opened.
  CsvSource(const std::filesystem::path& path, const DatasetSchema& schema, ParseOptions options = {})
      : reader_(path, schema, options) {}
  std::optional<FlowRecord> next() override { return reader_.next(); }
  const ParseSummary& summary() const noexcept { return reader_.summary(); }

 private:
  CsvReader reader_;
};

class MemorySource final : public RecordSource {
 public:
  explicit MemorySource(std::span<const FlowRecord> records) : records_(records) {}
  std::optional<FlowRecord> next() override {
    if (pos_ == records_.size()) return std::nullopt;
    return records_[pos_++];
  }

 private:
  std::span<const FlowRecord> records_;
  std::size_t pos_ = 0;
};

/// Inclusive 0-based record ordinals within the source.
struct SourceSpan {
  std::size_t first_row = 0;
  std::size_t last_row = 0;

  std::size_t size() const noexcept { return last_row - first_row + 1; }
  bool operator==(const SourceSpan&) const = default;
};

struct RecordChunk {
  std::size_t index = 0;
  SourceSpan span;
  std::vector<FlowRecord> records;
};

struct Chunk {
  std::size_t index = 0;
  SourceSpan span;
  std::vector<FeatureVector> vectors;
};

/// Pulls consecutive chunks of `chunk_size` records; the last may be shorter.
class ChunkStream {
 public:
  ChunkStream(RecordSource& source, std::size_t chunk_size);
  std::optional<RecordChunk> next();

 private:
  RecordSource* source_;
  std::size_t chunk_size_;
  std::size_t next_index_ = 0;
  std::size_t next_row_ = 0;
};

/// Chunking of already-encoded vectors. chunk_size must be >= 1.
std::vector<Chunk> chunk_stream(std::span<const FeatureVector> vectors, std::size_t chunk_size);

// ---------------------------------------------------------------------------
// Reports

struct ChunkReport {
  std::size_t chunk_index = 0;
  SourceSpan span;
  std::vector<std::uint8_t> predictions;
  std::size_t attack_count = 0;
  bool alert = false;
  double detect_time_s = 0.0;
  Confusion confusion;  // labeled records of the chunk only
  std::optional<double> latest_stime;
};

struct PhaseTimings {
  double load_distribute_s = 0.0;
  double preprocess_s = 0.0;
  double detect_s = 0.0;
  double total_s = 0.0;

  double phase_sum() const noexcept { return load_distribute_s + preprocess_s + detect_s; }
  /// |total - sum of phases| <= 5% of total + 0.05 s, and total >= each phase.
  bool additive() const noexcept;
};

struct RunSnapshot {
  std::string run_id;
  std::string model_id;
  std::string encoder_id;
  std::size_t chunk_size = 0;
  std::size_t workers = 0;
  std::size_t alert_threshold = 0;
};

struct DetectionRun {
  std::vector<ChunkReport> reports;
  Confusion aggregate;
  std::size_t records = 0;
  std::size_t labeled_records = 0;
  PhaseTimings timings;
  RunSnapshot config;

  bool fully_labeled() const noexcept { return records > 0 && labeled_records == records; }
  std::size_t alert_count() const noexcept;
  std::vector<std::uint8_t> predictions() const;
};

// ---------------------------------------------------------------------------
// Alerts

struct AlertRecord {
  std::string run_id;
  std::size_t chunk_index = 0;
  std::size_t first_row = 0;
  std::size_t last_row = 0;
  std::size_t attack_count = 0;
  std::int64_t unix_ts = 0;

  /// run_id,chunk_index,first_row,last_row,attack_count,unix_ts
  std::string line() const;
  bool operator==(const AlertRecord&) const = default;
};

class AlertSink {
 public:
  virtual ~AlertSink() = default;
  /// Throws Error(sink_write_failure).
  virtual void write(const AlertRecord& alert) = 0;
};

class FileAlertSink final : public AlertSink {
 public:
  /// Appends to `path`, creating it if needed.
  explicit FileAlertSink(const std::filesystem::path& path);
  void write(const AlertRecord& alert) override;

 private:
  std::filesystem::path path_;
  std::ofstream out_;
};

class MemoryAlertSink final : public AlertSink {
 public:
  void write(const AlertRecord& alert) override { alerts.push_back(alert); }
  std::vector<AlertRecord> alerts;
};

/// Writes one alert line when the report alerts. Timestamp is the latest
/// flow start time in the chunk when known, wall clock otherwise.
std::optional<AlertRecord> raise_alert(const ChunkReport& report, const std::string& run_id, AlertSink& sink);

// ---------------------------------------------------------------------------
// Engine

struct DetectOptions {
  std::size_t chunk_size = 300;
  std::size_t workers = 1;
  std::size_t alert_threshold = 1;
  bool force_pooled_knn = false;  // KNN otherwise runs on a single worker
  std::size_t window_chunks = 0;  // chunks per phase window; 0 picks a default
  std::string run_id = "run";
  std::string model_id;
  AlertSink* sink = nullptr;
  std::function<void(const RecordChunk&, const ChunkReport&)> on_chunk;
};

/// Classifies every source record exactly once. Throws EncoderModelMismatch
/// when the encoder and model dimensions differ.
DetectionRun run_detection(const TrainedModel& model, const Encoder& encoder, RecordSource& source,
                           const DetectOptions& options);

/// Classifies one encoded chunk on the calling thread.
ChunkReport classify_chunk(const TrainedModel& model, const Chunk& chunk, std::size_t alert_threshold);

// ---------------------------------------------------------------------------
// Log server

struct ArchiveResult {
  std::filesystem::path run_dir;
  std::filesystem::path archived;
  std::string sha256;
};

/// Hex SHA-256 of a file's bytes. Throws Error(io_failure).
std::string file_sha256(const std::filesystem::path& path);

/// Copies `path` byte for byte into a fresh directory under `log_dir` named
/// after `run_id` (a numeric suffix keeps repeated ids distinct) and writes
/// `<name>.sha256` next to it. Throws Error(io_failure).
ArchiveResult archive_input(const std::filesystem::path& path, const std::filesystem::path& log_dir,
                            const std::string& run_id = {});

}  // namespace sadf
