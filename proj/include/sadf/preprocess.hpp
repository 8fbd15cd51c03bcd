#pragma once

// Turns flow records into numeric feature vectors. Each schema column gets one
// policy: one-hot over the fitted vocabulary, hashed bucket indicator,
// z-score standardization, passthrough, or drop. Label and attack-category
// columns never enter the layout.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "sadf/feature_matrix.hpp"
#include "sadf/flow_schema.hpp"

namespace sadf {

class WorkerPool;

enum class PolicyKind : std::uint8_t { onehot, hash, standardize, passthrough, drop };
enum class UnknownCategory : std::uint8_t { all_zero, hash_fallback };

struct FeaturePolicy {
  PolicyKind kind = PolicyKind::drop;
  std::uint32_t buckets = 0;  // hash only

  bool operator==(const FeaturePolicy&) const = default;
};

/// "onehot", "hash:<n>", "standardize", "passthrough", "drop".
FeaturePolicy parse_feature_policy(std::string_view text);
std::string policy_text(FeaturePolicy policy);

inline constexpr double kSigmaFloor = 1e-9;

struct EncoderConfig {
  std::vector<FeaturePolicy> policies;  // one per schema column
  UnknownCategory unknown = UnknownCategory::all_zero;
  std::uint64_t seed = 0;
  bool strict_missing = false;

  bool operator==(const EncoderConfig&) const = default;
};

/// hash(1024) for address/port identifiers, one-hot for the remaining
/// categoricals, standardize numerics, passthrough binaries.
EncoderConfig default_encoder_config(const DatasetSchema& schema);

/// Applies one `encode.*` key: encode.<feature>, encode.unknown, encode.seed.
void apply_encoder_setting(EncoderConfig& config, const DatasetSchema& schema, std::string_view key,
                           std::string_view value);

/// Sets every listed feature to drop. Throws UnknownFeature for names not in
/// the schema and for the label column.
EncoderConfig select_features(EncoderConfig config, const DatasetSchema& schema,
                              std::span<const std::string> drop_list);

struct LayoutEntry {
  std::size_t column = 0;
  FeaturePolicy policy;
  std::size_t offset = 0;
  std::size_t width = 0;

  bool operator==(const LayoutEntry&) const = default;
};

struct FeatureVector {
  std::vector<double> x;
  std::uint8_t y = 0;
  bool labeled = false;
  std::optional<std::string> category;

  bool operator==(const FeatureVector&) const = default;
};

class Encoder {
 public:
  /// Throws EmptyTraining, PolicyKindMismatch, or usage errors for malformed configs.
  static Encoder fit(std::span<const FlowRecord> train, const DatasetSchema& schema, const EncoderConfig& config);

  std::size_t dimension() const noexcept { return dimension_; }
  const DatasetSchema& schema() const noexcept { return schema_; }
  const EncoderConfig& config() const noexcept { return config_; }
  const std::vector<LayoutEntry>& layout() const noexcept { return layout_; }
  const std::vector<std::string>& vocabulary(std::size_t column) const { return vocab_.at(column); }
  double mean(std::size_t column) const { return mean_.at(column); }
  double stddev(std::size_t column) const { return stddev_.at(column); }

  FeatureVector encode(const FlowRecord& record) const;

  /// Appends the non-zero cells of the encoded record to `out` (ascending
  /// index) and returns the label, if present.
  std::optional<std::uint8_t> encode_sparse(const FlowRecord& record, std::vector<std::uint32_t>& index,
                                            std::vector<double>& value) const;

  /// Encodes records straight into a labeled matrix. Unlabeled records get y=0.
  Dataset encode_dataset(std::span<const FlowRecord> records) const;

  /// Stable identifier of the fitted state (hash of the serialized form).
  std::string fingerprint() const;

  /// `snapshot` is free-form key=value text stored alongside the encoder.
  void save(const std::filesystem::path& path, std::string_view snapshot = {}) const;
  static Encoder load(const std::filesystem::path& path, std::string* snapshot = nullptr);
  std::vector<char> serialize(std::string_view snapshot = {}) const;
  static Encoder deserialize(std::string_view bytes, std::string* snapshot = nullptr);

  bool operator==(const Encoder& other) const {
    return schema_ == other.schema_ && config_ == other.config_ && layout_ == other.layout_ &&
           vocab_ == other.vocab_ && mean_ == other.mean_ && stddev_ == other.stddev_ &&
           dimension_ == other.dimension_;
  }

 private:
  explicit Encoder(DatasetSchema schema) : schema_(std::move(schema)) {}
  void build_lookup();
  template <class Emit>
  void encode_cells(const FlowRecord& record, Emit&& emit) const;

  DatasetSchema schema_;
  EncoderConfig config_;
  std::vector<LayoutEntry> layout_;
  std::vector<std::vector<std::string>> vocab_;  // per column, first-seen order
  std::vector<std::unordered_map<std::string, std::uint32_t>> lookup_;
  std::vector<double> mean_;
  std::vector<double> stddev_;
  std::size_t dimension_ = 0;
};

/// Per-record failures collected by encode_batch.
class BatchEncodeError : public Error {
 public:
  BatchEncodeError(std::vector<std::pair<std::size_t, std::string>> failures);
  const std::vector<std::pair<std::size_t, std::string>>& failures() const noexcept { return failures_; }

 private:
  std::vector<std::pair<std::size_t, std::string>> failures_;
};

/// Element-wise encode, output order equals input order for any worker count.
std::vector<FeatureVector> encode_batch(const Encoder& encoder, std::span<const FlowRecord> records,
                                        std::size_t workers = 1);
std::vector<FeatureVector> encode_batch(const Encoder& encoder, std::span<const FlowRecord> records,
                                        WorkerPool& pool);

/// Dense vectors to a labeled matrix.
Dataset to_dataset(std::span<const FeatureVector> vectors);

}  // namespace sadf
