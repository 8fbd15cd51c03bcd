#pragma once

// Key=value run configuration. A config file holds `key = value` lines with
// `#` comments and optional `[section]` headers that prefix the following keys
// ("[model]" then "trees = 50" is "model.trees"). Command-line flags are
// merged on top, so they win.

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>

#include "sadf/classifiers.hpp"
#include "sadf/flow_schema.hpp"
#include "sadf/preprocess.hpp"

namespace sadf {

class KeyValues {
 public:
  /// Throws Error(usage) on a malformed line.
  static KeyValues parse(std::string_view text);
  /// Throws Error(io_failure) when unreadable.
  static KeyValues load(const std::filesystem::path& path);

  void set(std::string key, std::string value) { entries_[std::move(key)] = std::move(value); }
  bool contains(std::string_view key) const { return entries_.find(std::string(key)) != entries_.end(); }
  std::optional<std::string> get(std::string_view key) const;
  std::string get_or(std::string_view key, std::string_view fallback) const;
  /// Entries of `over` replace ours.
  void merge(const KeyValues& over);

  const std::map<std::string, std::string>& entries() const noexcept { return entries_; }
  /// Sorted "key=value" lines; parse(text()) round-trips.
  std::string text() const;

 private:
  std::map<std::string, std::string> entries_;
};

struct RunConfig {
  DatasetId dataset = DatasetId::unsw_nb15;
  RowPolicy rows = RandomSplit{0.7, 0};  // seed follows `seed` unless given
  EncoderConfig encoder;
  ModelKind model = ModelKind::dt;
  ModelParams params;
  std::size_t chunk_size = 300;
  std::size_t workers = 1;
  std::size_t alert_threshold = 1;
  std::uint64_t seed = 0;
  bool strict = false;
  std::filesystem::path input, test, model_path, encoder_path, out, log_dir, metrics;

  /// Full key=value text of every setting above, embedded in artifacts.
  std::string snapshot() const;
};

/// Builds a config from defaults plus `kv`. Unknown keys are a usage error so
/// typos do not pass silently.
RunConfig resolve_config(const KeyValues& kv);

std::uint64_t parse_u64(std::string_view key, std::string_view text);
double parse_double(std::string_view key, std::string_view text);
bool parse_bool(std::string_view key, std::string_view text);

}  // namespace sadf
