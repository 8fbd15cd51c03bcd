#include "sadf/preprocess.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <mutex>

#include "sadf/binary_io.hpp"
#include "sadf/hashing.hpp"
#include "sadf/worker_pool.hpp"

namespace sadf {

FeaturePolicy parse_feature_policy(std::string_view text) {
  if (text == "onehot") return {PolicyKind::onehot, 0};
  if (text == "standardize") return {PolicyKind::standardize, 0};
  if (text == "passthrough") return {PolicyKind::passthrough, 0};
  if (text == "drop") return {PolicyKind::drop, 0};
  if (text.starts_with("hash:")) {
    const std::string n(text.substr(5));
    try {
      std::size_t used = 0;
      const auto buckets = std::stoul(n, &used);
      if (used == n.size() && buckets >= 2 && buckets <= 0xffffffffUL)
        return {PolicyKind::hash, static_cast<std::uint32_t>(buckets)};
    } catch (const std::logic_error&) {
    }
    throw Error(Errc::usage, "hash policy needs a bucket count >= 2, got '" + n + "'");
  }
  throw Error(Errc::usage, "unknown encoding policy '" + std::string(text) + "'");
}

std::string policy_text(FeaturePolicy policy) {
  switch (policy.kind) {
    case PolicyKind::onehot: return "onehot";
    case PolicyKind::hash: return "hash:" + std::to_string(policy.buckets);
    case PolicyKind::standardize: return "standardize";
    case PolicyKind::passthrough: return "passthrough";
    case PolicyKind::drop: return "drop";
  }
  return "?";
}

namespace {

bool is_target_column(const DatasetSchema& schema, std::size_t column) {
  return column == schema.label_index() || schema.attack_category_index() == column;
}

}  // namespace

EncoderConfig default_encoder_config(const DatasetSchema& schema) {
  static const std::vector<std::string> identifiers = {"srcip", "dstip", "sport", "dsport"};
  EncoderConfig config;
  config.policies.resize(schema.size());
  for (std::size_t i = 0; i < schema.size(); ++i) {
    const auto& f = schema[i];
    auto& p = config.policies[i];
    const auto norm = normalize_feature_name(f.name);
    if (is_target_column(schema, i) || norm == "id") {
      p = {PolicyKind::drop, 0};
    } else if (std::find(identifiers.begin(), identifiers.end(), norm) != identifiers.end()) {
      p = {PolicyKind::hash, 1024};
    } else if (f.kind == FeatureKind::categorical) {
      p = {PolicyKind::onehot, 0};
    } else if (f.kind == FeatureKind::binary) {
      p = {PolicyKind::passthrough, 0};
    } else {
      p = {PolicyKind::standardize, 0};
    }
  }
  return config;
}

void apply_encoder_setting(EncoderConfig& config, const DatasetSchema& schema, std::string_view key,
                           std::string_view value) {
  if (!key.starts_with("encode.")) throw Error(Errc::usage, "not an encoder key: " + std::string(key));
  const auto name = key.substr(7);
  if (name == "unknown") {
    if (value == "zero")
      config.unknown = UnknownCategory::all_zero;
    else if (value == "hash")
      config.unknown = UnknownCategory::hash_fallback;
    else
      throw Error(Errc::usage, "encode.unknown must be zero|hash");
    return;
  }
  if (name == "seed") {
    try {
      config.seed = std::stoull(std::string(value));
    } catch (const std::logic_error&) {
      throw Error(Errc::usage, "encode.seed must be an unsigned integer");
    }
    return;
  }
  if (name == "strict") {
    config.strict_missing = (value == "1" || value == "true");
    return;
  }
  const auto column = schema.find(name);
  if (!column) throw Error(Errc::unknown_feature, std::string(name));
  if (config.policies.size() != schema.size()) config.policies.resize(schema.size());
  config.policies[*column] = parse_feature_policy(value);
}

EncoderConfig select_features(EncoderConfig config, const DatasetSchema& schema,
                              std::span<const std::string> drop_list) {
  for (const auto& name : drop_list) {
    const auto column = schema.find(name);
    if (!column) throw Error(Errc::unknown_feature, name);
    if (*column == schema.label_index()) throw Error(Errc::unknown_feature, "label cannot be dropped: " + name);
    config.policies.at(*column) = {PolicyKind::drop, 0};
  }
  return config;
}

// ---------------------------------------------------------------------------

namespace {

std::string cell_text(const Cell& cell) {
  if (const auto* s = std::get_if<std::string>(&cell)) return *s;
  if (is_missing(cell)) return {};
  return format_cell(cell);
}

}  // namespace

Encoder Encoder::fit(std::span<const FlowRecord> train, const DatasetSchema& schema, const EncoderConfig& config) {
  if (train.empty()) throw Error(Errc::empty_training, "no training records");
  if (config.policies.size() != schema.size())
    throw Error(Errc::usage, "encoder config has " + std::to_string(config.policies.size()) + " policies for " +
                                 std::to_string(schema.size()) + " columns");

  Encoder enc(schema);
  enc.config_ = config;
  const auto n_cols = schema.size();
  enc.vocab_.assign(n_cols, {});
  enc.mean_.assign(n_cols, 0.0);
  enc.stddev_.assign(n_cols, 0.0);

  for (std::size_t c = 0; c < n_cols; ++c) {
    auto& policy = enc.config_.policies[c];
    if (is_target_column(schema, c)) policy = {PolicyKind::drop, 0};
    const auto kind = schema[c].kind;
    if ((policy.kind == PolicyKind::standardize || policy.kind == PolicyKind::passthrough) &&
        kind == FeatureKind::categorical)
      throw Error(Errc::policy_kind_mismatch, policy_text(policy) + " on categorical feature " + schema[c].name);
    if (policy.kind == PolicyKind::hash && policy.buckets < 2)
      throw Error(Errc::usage, "hash buckets must be >= 2 for " + schema[c].name);
  }

  for (const auto& r : train)
    if (r.values.size() != n_cols)
      throw Error(Errc::wrong_column_count, "training record does not match schema width");

  for (std::size_t c = 0; c < n_cols; ++c) {
    const auto policy = enc.config_.policies[c];
    if (policy.kind == PolicyKind::onehot) {
      std::unordered_map<std::string, std::uint32_t> seen;
      auto& vocab = enc.vocab_[c];
      for (const auto& r : train) {
        if (is_missing(r.values[c])) continue;
        auto text = cell_text(r.values[c]);
        if (seen.emplace(text, static_cast<std::uint32_t>(vocab.size())).second) vocab.push_back(std::move(text));
      }
    } else if (policy.kind == PolicyKind::standardize) {
      double sum = 0.0;
      std::size_t n = 0;
      for (const auto& r : train)
        if (const auto* d = std::get_if<double>(&r.values[c])) {
          sum += *d;
          ++n;
        }
      const double mean = n ? sum / static_cast<double>(n) : 0.0;
      double ss = 0.0;
      for (const auto& r : train)
        if (const auto* d = std::get_if<double>(&r.values[c])) ss += (*d - mean) * (*d - mean);
      const double sigma = n ? std::sqrt(ss / static_cast<double>(n)) : 0.0;
      enc.mean_[c] = mean;
      enc.stddev_[c] = std::max(sigma, kSigmaFloor);
    }
  }

  std::size_t offset = 0;
  for (std::size_t c = 0; c < n_cols; ++c) {
    const auto policy = enc.config_.policies[c];
    std::size_t width = 0;
    switch (policy.kind) {
      case PolicyKind::drop: continue;
      case PolicyKind::onehot: width = enc.vocab_[c].size(); break;
      case PolicyKind::hash: width = policy.buckets; break;
      case PolicyKind::standardize:
      case PolicyKind::passthrough: width = 1; break;
    }
    enc.layout_.push_back(LayoutEntry{c, policy, offset, width});
    offset += width;
  }
  enc.dimension_ = offset;
  enc.build_lookup();
  return enc;
}

void Encoder::build_lookup() {
  lookup_.assign(vocab_.size(), {});
  for (std::size_t c = 0; c < vocab_.size(); ++c)
    for (std::size_t i = 0; i < vocab_[c].size(); ++i) lookup_[c].emplace(vocab_[c][i], static_cast<std::uint32_t>(i));
}

template <class Emit>
void Encoder::encode_cells(const FlowRecord& record, Emit&& emit) const {
  if (record.values.size() != schema_.size())
    throw Error(Errc::wrong_column_count, "record has " + std::to_string(record.values.size()) + " cells, schema " +
                                              std::to_string(schema_.size()));
  for (const auto& e : layout_) {
    const auto& cell = record.values[e.column];
    const bool missing = is_missing(cell);
    if (missing && config_.strict_missing)
      throw Error(Errc::missing_value_under_strict, "missing " + schema_[e.column].name);
    switch (e.policy.kind) {
      case PolicyKind::onehot: {
        if (e.width == 0) break;
        const auto text = cell_text(cell);
        if (!missing) {
          const auto& table = lookup_[e.column];
          if (const auto it = table.find(text); it != table.end()) {
            emit(e.offset + it->second, 1.0);
            break;
          }
        }
        if (config_.unknown == UnknownCategory::hash_fallback)
          emit(e.offset + hash64(text, config_.seed) % e.width, 1.0);
        break;
      }
      case PolicyKind::hash:
        if (!missing) emit(e.offset + hash_feature(cell_text(cell), e.policy.buckets, config_.seed), 1.0);
        break;
      case PolicyKind::standardize:
        if (const auto* d = std::get_if<double>(&cell)) emit(e.offset, (*d - mean_[e.column]) / stddev_[e.column]);
        break;
      case PolicyKind::passthrough:
        if (const auto* d = std::get_if<double>(&cell)) emit(e.offset, *d);
        break;
      case PolicyKind::drop: break;
    }
  }
}

FeatureVector Encoder::encode(const FlowRecord& record) const {
  FeatureVector fv;
  fv.x.assign(dimension_, 0.0);
  encode_cells(record, [&](std::size_t i, double v) { fv.x[i] = v; });
  if (const auto y = record_label(record, schema_)) {
    fv.y = *y;
    fv.labeled = true;
  }
  fv.category = record_category(record, schema_);
  return fv;
}

std::optional<std::uint8_t> Encoder::encode_sparse(const FlowRecord& record, std::vector<std::uint32_t>& index,
                                                   std::vector<double>& value) const {
  encode_cells(record, [&](std::size_t i, double v) {
    if (v == 0.0) return;
    index.push_back(static_cast<std::uint32_t>(i));
    value.push_back(v);
  });
  return record_label(record, schema_);
}

Dataset Encoder::encode_dataset(std::span<const FlowRecord> records) const {
  Dataset data{FeatureMatrix(dimension_), {}};
  data.y.reserve(records.size());
  std::vector<std::uint32_t> index;
  std::vector<double> value;
  for (const auto& r : records) {
    index.clear();
    value.clear();
    const auto y = encode_sparse(r, index, value);
    data.x.add_row(index, value);
    data.y.push_back(y.value_or(0));
  }
  return data;
}

// ---------------------------------------------------------------------------

namespace {
constexpr std::string_view kEncoderMagic = "SADE";
constexpr std::uint8_t kEncoderVersion = 1;
}  // namespace

std::vector<char> Encoder::serialize(std::string_view snapshot) const {
  std::vector<std::pair<std::string, ByteWriter>> sections;

  ByteWriter schm;
  schm.u8(static_cast<std::uint8_t>(schema_.id()));
  schm.u32(static_cast<std::uint32_t>(schema_.size()));
  sections.emplace_back("SCHM", std::move(schm));

  ByteWriter conf;
  conf.u8(static_cast<std::uint8_t>(config_.unknown));
  conf.u64(config_.seed);
  conf.u8(config_.strict_missing ? 1 : 0);
  conf.str(kFeatureHashName);
  conf.u32(static_cast<std::uint32_t>(config_.policies.size()));
  for (const auto& p : config_.policies) {
    conf.u8(static_cast<std::uint8_t>(p.kind));
    conf.u32(p.buckets);
  }
  sections.emplace_back("CONF", std::move(conf));

  ByteWriter layo;
  layo.u32(static_cast<std::uint32_t>(layout_.size()));
  for (const auto& e : layout_) {
    layo.u32(static_cast<std::uint32_t>(e.column));
    layo.u8(static_cast<std::uint8_t>(e.policy.kind));
    layo.u32(e.policy.buckets);
    layo.u64(e.offset);
    layo.u64(e.width);
  }
  layo.u64(dimension_);
  sections.emplace_back("LAYO", std::move(layo));

  ByteWriter vocb;
  std::uint32_t with_vocab = 0;
  for (const auto& v : vocab_) with_vocab += v.empty() ? 0 : 1;
  vocb.u32(with_vocab);
  for (std::size_t c = 0; c < vocab_.size(); ++c) {
    if (vocab_[c].empty()) continue;
    vocb.u32(static_cast<std::uint32_t>(c));
    vocb.u32(static_cast<std::uint32_t>(vocab_[c].size()));
    for (const auto& s : vocab_[c]) vocb.str(s);
  }
  sections.emplace_back("VOCB", std::move(vocb));

  ByteWriter stat;
  std::uint32_t n_stats = 0;
  for (const auto& e : layout_) n_stats += e.policy.kind == PolicyKind::standardize ? 1 : 0;
  stat.u32(n_stats);
  for (const auto& e : layout_) {
    if (e.policy.kind != PolicyKind::standardize) continue;
    stat.u32(static_cast<std::uint32_t>(e.column));
    stat.f64(mean_[e.column]);
    stat.f64(stddev_[e.column]);
  }
  sections.emplace_back("STAT", std::move(stat));

  if (!snapshot.empty()) {
    ByteWriter snap;
    snap.str(snapshot);
    sections.emplace_back("SNAP", std::move(snap));
  }
  return build_section_file(kEncoderMagic, kEncoderVersion, sections);
}

Encoder Encoder::deserialize(std::string_view bytes, std::string* snapshot) {
  const auto file = parse_section_file(bytes, kEncoderMagic);
  if (file.version != kEncoderVersion)
    throw Error(Errc::bad_format, "unsupported encoder version " + std::to_string(file.version));

  ByteReader schm(file.at("SCHM"));
  const auto id = static_cast<DatasetId>(schm.u8());
  if (!parse_dataset_id(dataset_name(id))) throw Error(Errc::bad_format, "unknown dataset id in encoder");
  Encoder enc(load_schema(id));
  if (schm.u32() != enc.schema_.size()) throw Error(Errc::bad_format, "schema width mismatch in encoder");
  const auto n_cols = enc.schema_.size();

  ByteReader conf(file.at("CONF"));
  enc.config_.unknown = static_cast<UnknownCategory>(conf.u8());
  enc.config_.seed = conf.u64();
  enc.config_.strict_missing = conf.u8() != 0;
  if (conf.str() != kFeatureHashName) throw Error(Errc::bad_format, "encoder uses an unknown feature hash");
  const auto n_policies = conf.u32();
  if (n_policies != n_cols) throw Error(Errc::bad_format, "policy count mismatch");
  for (std::uint32_t i = 0; i < n_policies; ++i) {
    FeaturePolicy p;
    p.kind = static_cast<PolicyKind>(conf.u8());
    p.buckets = conf.u32();
    enc.config_.policies.push_back(p);
  }

  ByteReader layo(file.at("LAYO"));
  const auto n_layout = layo.u32();
  for (std::uint32_t i = 0; i < n_layout; ++i) {
    LayoutEntry e;
    e.column = layo.u32();
    e.policy.kind = static_cast<PolicyKind>(layo.u8());
    e.policy.buckets = layo.u32();
    e.offset = layo.u64();
    e.width = layo.u64();
    if (e.column >= n_cols) throw Error(Errc::bad_format, "layout column out of range");
    enc.layout_.push_back(e);
  }
  enc.dimension_ = layo.u64();

  enc.vocab_.assign(n_cols, {});
  enc.mean_.assign(n_cols, 0.0);
  enc.stddev_.assign(n_cols, 0.0);
  ByteReader vocb(file.at("VOCB"));
  const auto n_vocab = vocb.u32();
  for (std::uint32_t i = 0; i < n_vocab; ++i) {
    const auto c = vocb.u32();
    if (c >= n_cols) throw Error(Errc::bad_format, "vocabulary column out of range");
    const auto count = vocb.u32();
    for (std::uint32_t k = 0; k < count; ++k) enc.vocab_[c].push_back(vocb.str());
  }
  ByteReader stat(file.at("STAT"));
  const auto n_stats = stat.u32();
  for (std::uint32_t i = 0; i < n_stats; ++i) {
    const auto c = stat.u32();
    if (c >= n_cols) throw Error(Errc::bad_format, "stats column out of range");
    enc.mean_[c] = stat.f64();
    enc.stddev_[c] = stat.f64();
  }
  if (snapshot) {
    snapshot->clear();
    if (const auto it = file.sections.find("SNAP"); it != file.sections.end()) {
      ByteReader snap(it->second);
      *snapshot = snap.str();
    }
  }
  enc.build_lookup();
  return enc;
}

void Encoder::save(const std::filesystem::path& path, std::string_view snapshot) const {
  write_file_bytes(path, serialize(snapshot));
}

Encoder Encoder::load(const std::filesystem::path& path, std::string* snapshot) {
  return deserialize(read_file_bytes(path), snapshot);
}

std::string Encoder::fingerprint() const {
  const auto bytes = serialize();
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx",
                static_cast<unsigned long long>(hash64(std::string_view(bytes.data(), bytes.size()), 0)));
  return buf;
}

// ---------------------------------------------------------------------------

namespace {

std::string join_failures(const std::vector<std::pair<std::size_t, std::string>>& failures) {
  std::string msg = std::to_string(failures.size()) + " record(s) failed to encode";
  const auto shown = std::min<std::size_t>(failures.size(), 5);
  for (std::size_t i = 0; i < shown; ++i)
    msg += "; #" + std::to_string(failures[i].first) + ": " + failures[i].second;
  return msg;
}

}  // namespace

BatchEncodeError::BatchEncodeError(std::vector<std::pair<std::size_t, std::string>> failures)
    : Error(Errc::bad_format, join_failures(failures)), failures_(std::move(failures)) {}

std::vector<FeatureVector> encode_batch(const Encoder& encoder, std::span<const FlowRecord> records,
                                        WorkerPool& pool) {
  std::vector<FeatureVector> out(records.size());
  std::vector<std::pair<std::size_t, std::string>> failures;
  std::mutex failures_mutex;
  pool.parallel_for(records.size(), [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      try {
        out[i] = encoder.encode(records[i]);
      } catch (const Error& e) {
        std::lock_guard lock(failures_mutex);
        failures.emplace_back(i, e.what());
      }
    }
  });
  if (!failures.empty()) {
    std::sort(failures.begin(), failures.end());
    throw BatchEncodeError(std::move(failures));
  }
  return out;
}

std::vector<FeatureVector> encode_batch(const Encoder& encoder, std::span<const FlowRecord> records,
                                        std::size_t workers) {
  WorkerPool pool(workers);
  return encode_batch(encoder, records, pool);
}

Dataset to_dataset(std::span<const FeatureVector> vectors) {
  const std::size_t dim = vectors.empty() ? 0 : vectors.front().x.size();
  Dataset data{FeatureMatrix(dim), {}};
  data.y.reserve(vectors.size());
  for (const auto& v : vectors) {
    data.x.add_dense_row(v.x);
    data.y.push_back(v.y);
  }
  return data;
}

}  // namespace sadf
