#pragma once

// Dataset schemas for flow-record CSVs, a streaming RFC-4180 reader that
// validates rows against a schema, time-slot partitioning and train/test row
// selection.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "sadf/error.hpp"

namespace sadf {

enum class DatasetId {
  unsw_nb15,        // 49-column raw UNSW-NB15 CSVs (UNSW-NB15_1..4.csv)
  unsw_nb15_split,  // 45-column official training/testing partition files
  kdd99,            // 41 features + label
};

enum class FeatureGroup { flow, basic, content, time, additional, labelled };
enum class FeatureKind { numeric, categorical, binary };

std::string_view dataset_name(DatasetId id) noexcept;
std::optional<DatasetId> parse_dataset_id(std::string_view name) noexcept;
std::string_view group_name(FeatureGroup g) noexcept;
std::string_view kind_name(FeatureKind k) noexcept;

/// Lowercase with '_', '-' and spaces removed. Used for header and name lookups.
std::string normalize_feature_name(std::string_view name);

struct FeatureSpec {
  std::string name;
  int ordinal = 0;  // 1-based column index
  FeatureGroup group = FeatureGroup::basic;
  FeatureKind kind = FeatureKind::numeric;

  bool operator==(const FeatureSpec&) const = default;
};

class DatasetSchema {
 public:
  DatasetSchema(DatasetId id, std::vector<FeatureSpec> features);

  DatasetId id() const noexcept { return id_; }
  const std::vector<FeatureSpec>& features() const noexcept { return features_; }
  std::size_t size() const noexcept { return features_.size(); }
  const FeatureSpec& operator[](std::size_t i) const { return features_[i]; }

  /// Column index (0-based) of a feature by normalized name.
  std::optional<std::size_t> find(std::string_view name) const;
  std::size_t label_index() const noexcept { return label_; }
  std::optional<std::size_t> attack_category_index() const noexcept { return attack_category_; }
  /// Start-time column, if the dataset has one.
  std::optional<std::size_t> time_index() const noexcept { return time_; }

  bool operator==(const DatasetSchema& other) const {
    return id_ == other.id_ && features_ == other.features_;
  }

 private:
  DatasetId id_;
  std::vector<FeatureSpec> features_;
  std::size_t label_ = 0;
  std::optional<std::size_t> attack_category_;
  std::optional<std::size_t> time_;
};

/// Checks ordinal contiguity and the single-label rule; throws Error(bad_format).
void validate_schema(const DatasetSchema& schema);

DatasetSchema load_schema(DatasetId id);

/// "ordinal,name,group,kind" header plus one line per feature.
std::string schema_table_csv(const DatasetSchema& schema);

// ---------------------------------------------------------------------------
// Records

using Cell = std::variant<std::monostate, double, std::string>;

inline bool is_missing(const Cell& c) noexcept { return std::holds_alternative<std::monostate>(c); }

struct FlowRecord {
  std::vector<Cell> values;
  std::optional<double> stime;

  bool operator==(const FlowRecord&) const = default;
};

/// Binary label of a record: numeric cells are attack when non-zero, string
/// cells are attack unless they read "normal" (trailing '.' ignored).
std::optional<std::uint8_t> record_label(const FlowRecord& record, const DatasetSchema& schema);

/// Attack-category passthrough text, if the schema has one and it is present.
std::optional<std::string> record_category(const FlowRecord& record, const DatasetSchema& schema);

/// Shortest round-trip text of a cell; strings are quoted when needed.
std::string format_cell(const Cell& cell);
std::string format_record(const FlowRecord& record);

/// Splits one CSV record into raw cells, honouring RFC-4180 quoting.
/// Quoted cells keep their content verbatim, unquoted cells are trimmed.
std::vector<std::string> split_csv_fields(std::string_view line);

/// True when at least half the schema names appear at their own positions.
bool is_header_row(std::span<const std::string> fields, const DatasetSchema& schema);

/// Builds a record from already split cells; throws Error on a bad row.
FlowRecord parse_fields(std::span<const std::string> fields, const DatasetSchema& schema);

// ---------------------------------------------------------------------------
// Streaming reader

struct ParseOptions {
  bool strict = false;  // first bad row throws instead of being skipped
};

struct ParseIssue {
  Errc code;
  std::size_t line_no;  // 1-based physical line
  std::optional<std::size_t> column;  // 1-based ordinal
  std::string detail;
};

struct ParseSummary {
  std::size_t rows_ok = 0;
  std::size_t rows_rejected = 0;
  bool header_detected = false;
  std::vector<ParseIssue> issues;  // first kMaxIssues only

  static constexpr std::size_t kMaxIssues = 1000;
  std::size_t data_rows() const noexcept { return rows_ok + rows_rejected; }
};

class CsvReader {
 public:
  /// Throws Error(source_unreadable) when the file cannot be opened.
  CsvReader(const std::filesystem::path& path, const DatasetSchema& schema, ParseOptions options = {});
  CsvReader(std::unique_ptr<std::istream> stream, const DatasetSchema& schema, ParseOptions options = {});
  ~CsvReader();
  CsvReader(CsvReader&&) noexcept;
  CsvReader& operator=(CsvReader&&) noexcept;

  /// Next valid record in file order, or nullopt at end of stream.
  std::optional<FlowRecord> next();

  const ParseSummary& summary() const noexcept { return summary_; }
  const DatasetSchema& schema() const noexcept { return *schema_; }

 private:
  bool read_physical_record(std::string& out, std::size_t& first_line);
  bool looks_like_header(std::span<const std::string> fields) const;
  void reject(Errc code, std::size_t line_no, std::optional<std::size_t> column, std::string detail);

  std::unique_ptr<std::istream> in_;
  const DatasetSchema* schema_;
  ParseOptions options_;
  ParseSummary summary_;
  std::size_t line_no_ = 0;
  bool first_row_ = true;
  std::string buffer_;
};

/// Reads a whole file. Summary is copied out when requested.
std::vector<FlowRecord> read_csv(const std::filesystem::path& path, const DatasetSchema& schema,
                                 ParseOptions options = {}, ParseSummary* summary = nullptr);

// ---------------------------------------------------------------------------
// Time slots and row selection

struct RecordPartition {
  double slot_start = 0.0;
  double slot_length = 0.0;
  std::vector<FlowRecord> records;
};

/// Groups records by floor(stime / slot) * slot, ascending, file order inside
/// a slot. Empty slots are omitted.
std::vector<RecordPartition> split_by_time(std::span<const FlowRecord> records, double slot_seconds,
                                           const DatasetSchema& schema);

struct OfficialFiles {};
struct HeadCounts {
  std::size_t n_train = 0;
  std::size_t n_test = 0;
};
struct RandomSplit {
  double fraction = 0.7;
  std::uint64_t seed = 0;
};
using RowPolicy = std::variant<OfficialFiles, HeadCounts, RandomSplit>;

/// "official", "head:<train>,<test>", "random:<fraction>[,<seed>]".
RowPolicy parse_row_policy(std::string_view text);
std::string describe_row_policy(const RowPolicy& policy);

struct RowSelection {
  std::vector<FlowRecord> train;
  std::vector<FlowRecord> test;
};

/// OfficialFiles returns `records` as train and `official_test` as test.
RowSelection select_rows(std::vector<FlowRecord> records, const RowPolicy& policy,
                         std::vector<FlowRecord> official_test = {});

}  // namespace sadf
