#pragma once

// Synthetic UNSW-NB15-shaped flow records for tests and benchmarks when the
// real captures are not at hand. Normal and attack traffic come from two
// different profiles (addresses, ports, TTLs, byte and packet counts); a
// fraction of rows draws its features from the opposite profile while keeping
// its label, which bounds the attainable accuracy below 100%.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <vector>

#include "sadf/detect_engine.hpp"
#include "sadf/flow_schema.hpp"
#include "sadf/random.hpp"

namespace sadf {

struct SynthOptions {
  double attack_fraction = 0.3;
  double overlap = 0.06;  // share of rows drawn from the other class's profile
  std::uint64_t seed = 0;
  double start_time = 1421927414.0;
  double flows_per_second = 50.0;
};

/// Row i of the stream depends only on (options, i); stime never decreases.
class SynthGenerator {
 public:
  explicit SynthGenerator(SynthOptions options = {});

  FlowRecord next();
  const DatasetSchema& schema() const noexcept { return schema_; }

 private:
  SynthOptions options_;
  DatasetSchema schema_;
  Rng rng_;
  std::size_t row_ = 0;
  std::vector<std::size_t> cols_;
};

std::vector<FlowRecord> synth_records(std::size_t count, const SynthOptions& options = {});

/// Streams `count` generated records without holding them in memory.
class SynthSource final : public RecordSource {
 public:
  SynthSource(std::size_t count, const SynthOptions& options = {}) : gen_(options), remaining_(count) {}
  std::optional<FlowRecord> next() override {
    if (remaining_ == 0) return std::nullopt;
    --remaining_;
    return gen_.next();
  }

 private:
  SynthGenerator gen_;
  std::size_t remaining_;
};

/// Writes `count` records as CSV, with the schema header line first when asked.
void write_synth_csv(const std::filesystem::path& path, std::size_t count, const SynthOptions& options = {},
                     bool header = true);

}  // namespace sadf
