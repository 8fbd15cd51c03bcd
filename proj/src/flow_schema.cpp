#include "sadf/flow_schema.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <map>
#include <numeric>
#include <sstream>

#include "sadf/random.hpp"

namespace sadf {

std::string_view dataset_name(DatasetId id) noexcept {
  switch (id) {
    case DatasetId::unsw_nb15: return "unsw_nb15";
    case DatasetId::unsw_nb15_split: return "unsw_nb15_split";
    case DatasetId::kdd99: return "kdd99";
  }
  return "?";
}

std::optional<DatasetId> parse_dataset_id(std::string_view name) noexcept {
  for (auto id : {DatasetId::unsw_nb15, DatasetId::unsw_nb15_split, DatasetId::kdd99})
    if (dataset_name(id) == name) return id;
  return std::nullopt;
}

std::string_view group_name(FeatureGroup g) noexcept {
  switch (g) {
    case FeatureGroup::flow: return "flow";
    case FeatureGroup::basic: return "basic";
    case FeatureGroup::content: return "content";
    case FeatureGroup::time: return "time";
    case FeatureGroup::additional: return "additional";
    case FeatureGroup::labelled: return "labelled";
  }
  return "?";
}

std::string_view kind_name(FeatureKind k) noexcept {
  switch (k) {
    case FeatureKind::numeric: return "numeric";
    case FeatureKind::categorical: return "categorical";
    case FeatureKind::binary: return "binary";
  }
  return "?";
}

std::string normalize_feature_name(std::string_view name) {
  std::string out;
  out.reserve(name.size());
  for (const char c : name) {
    if (c == '_' || c == '-' || c == ' ' || c == '\t') continue;
    out.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
  }
  return out;
}

DatasetSchema::DatasetSchema(DatasetId id, std::vector<FeatureSpec> features)
    : id_(id), features_(std::move(features)) {
  bool have_label = false;
  for (std::size_t i = 0; i < features_.size(); ++i) {
    const auto& f = features_[i];
    const auto norm = normalize_feature_name(f.name);
    if (f.group == FeatureGroup::labelled) {
      if (norm == "label" && !have_label) {
        label_ = i;
        have_label = true;
      } else if (!attack_category_) {
        attack_category_ = i;
      }
    } else if (norm == "stime" && f.kind == FeatureKind::numeric) {
      time_ = i;
    }
  }
}

std::optional<std::size_t> DatasetSchema::find(std::string_view name) const {
  const auto norm = normalize_feature_name(name);
  for (std::size_t i = 0; i < features_.size(); ++i)
    if (normalize_feature_name(features_[i].name) == norm) return i;
  return std::nullopt;
}

void validate_schema(const DatasetSchema& schema) {
  const auto& fs = schema.features();
  std::size_t labels = 0;
  std::size_t categories = 0;
  for (std::size_t i = 0; i < fs.size(); ++i) {
    if (fs[i].ordinal != static_cast<int>(i) + 1)
      throw Error(Errc::bad_format, "ordinal of '" + fs[i].name + "' is not " + std::to_string(i + 1));
    if (fs[i].group == FeatureGroup::labelled) {
      if (normalize_feature_name(fs[i].name) == "label")
        ++labels;
      else
        ++categories;
    }
  }
  if (labels != 1) throw Error(Errc::bad_format, "schema must have exactly one label feature");
  if (categories > 1) throw Error(Errc::bad_format, "schema has more than one attack-category feature");
}

namespace {

using G = FeatureGroup;
using K = FeatureKind;

struct Row {
  const char* name;
  G group;
  K kind;
};

DatasetSchema build(DatasetId id, std::initializer_list<Row> rows) {
  std::vector<FeatureSpec> specs;
  specs.reserve(rows.size());
  int ordinal = 1;
  for (const auto& r : rows) specs.push_back(FeatureSpec{r.name, ordinal++, r.group, r.kind});
  DatasetSchema schema(id, std::move(specs));
  validate_schema(schema);
  return schema;
}

// Column layout of the four raw CSV files, names as in the published feature tables.
DatasetSchema unsw_raw() {
  return build(DatasetId::unsw_nb15, {
      {"srcip", G::flow, K::categorical},
      {"sport", G::flow, K::categorical},
      {"dstip", G::flow, K::categorical},
      {"dsport", G::flow, K::categorical},
      {"proto", G::flow, K::categorical},
      {"state", G::basic, K::categorical},
      {"dur", G::basic, K::numeric},
      {"sbytes", G::basic, K::numeric},
      {"dbytes", G::basic, K::numeric},
      {"sttl", G::basic, K::numeric},
      {"dttl", G::basic, K::numeric},
      {"sloss", G::basic, K::numeric},
      {"dloss", G::basic, K::numeric},
      {"service", G::basic, K::categorical},
      {"sload", G::basic, K::numeric},
      {"dload", G::basic, K::numeric},
      {"spkts", G::basic, K::numeric},
      {"dpkts", G::basic, K::numeric},
      {"swin", G::content, K::numeric},
      {"dwin", G::content, K::numeric},
      {"Stcpb", G::content, K::numeric},
      {"dtcpb", G::content, K::numeric},
      {"smeansz", G::content, K::numeric},
      {"dmeansz", G::content, K::numeric},
      {"transdepth", G::content, K::numeric},
      {"resbdylen", G::content, K::numeric},
      {"sjit", G::time, K::numeric},
      {"djit", G::time, K::numeric},
      {"stime", G::time, K::numeric},
      {"ltime", G::time, K::numeric},
      {"sintpkt", G::time, K::numeric},
      {"dintpkt", G::time, K::numeric},
      {"tcprtt", G::time, K::numeric},
      {"synack", G::time, K::numeric},
      {"ackdat", G::time, K::numeric},
      {"ismipports", G::time, K::binary},
      {"ctstatettl", G::additional, K::numeric},
      {"ctflwhttpmthd", G::additional, K::numeric},
      {"isftplogin", G::additional, K::binary},
      {"ctftpcmd", G::additional, K::numeric},
      {"ctsrvsrc", G::additional, K::numeric},
      {"ctsrvdst", G::additional, K::numeric},
      {"ctdstltm", G::additional, K::numeric},
      {"ctsrcltm", G::additional, K::numeric},
      {"ctsrcdportltm", G::additional, K::numeric},
      {"ctdstsportltm", G::additional, K::numeric},
      {"ctdstsrcltm", G::additional, K::numeric},
      {"Attackcat", G::labelled, K::categorical},
      {"Label", G::labelled, K::binary},
  });
}

// Header of UNSW_NB15_training-set.csv / UNSW_NB15_testing-set.csv.
DatasetSchema unsw_split() {
  return build(DatasetId::unsw_nb15_split, {
      {"id", G::flow, K::numeric},
      {"dur", G::basic, K::numeric},
      {"proto", G::flow, K::categorical},
      {"service", G::basic, K::categorical},
      {"state", G::basic, K::categorical},
      {"spkts", G::basic, K::numeric},
      {"dpkts", G::basic, K::numeric},
      {"sbytes", G::basic, K::numeric},
      {"dbytes", G::basic, K::numeric},
      {"rate", G::basic, K::numeric},
      {"sttl", G::basic, K::numeric},
      {"dttl", G::basic, K::numeric},
      {"sload", G::basic, K::numeric},
      {"dload", G::basic, K::numeric},
      {"sloss", G::basic, K::numeric},
      {"dloss", G::basic, K::numeric},
      {"sinpkt", G::time, K::numeric},
      {"dinpkt", G::time, K::numeric},
      {"sjit", G::time, K::numeric},
      {"djit", G::time, K::numeric},
      {"swin", G::content, K::numeric},
      {"stcpb", G::content, K::numeric},
      {"dtcpb", G::content, K::numeric},
      {"dwin", G::content, K::numeric},
      {"tcprtt", G::time, K::numeric},
      {"synack", G::time, K::numeric},
      {"ackdat", G::time, K::numeric},
      {"smean", G::content, K::numeric},
      {"dmean", G::content, K::numeric},
      {"trans_depth", G::content, K::numeric},
      {"response_body_len", G::content, K::numeric},
      {"ct_srv_src", G::additional, K::numeric},
      {"ct_state_ttl", G::additional, K::numeric},
      {"ct_dst_ltm", G::additional, K::numeric},
      {"ct_src_dport_ltm", G::additional, K::numeric},
      {"ct_dst_sport_ltm", G::additional, K::numeric},
      {"ct_dst_src_ltm", G::additional, K::numeric},
      {"is_ftp_login", G::additional, K::binary},
      {"ct_ftp_cmd", G::additional, K::numeric},
      {"ct_flw_http_mthd", G::additional, K::numeric},
      {"ct_src_ltm", G::additional, K::numeric},
      {"ct_srv_dst", G::additional, K::numeric},
      {"is_sm_ips_ports", G::time, K::binary},
      {"attack_cat", G::labelled, K::categorical},
      {"label", G::labelled, K::binary},
  });
}

// Canonical kddcup.data column order: 9 basic, 13 content, 9 time-based
// traffic and 10 host-based traffic features, then the connection label.
DatasetSchema kdd() {
  return build(DatasetId::kdd99, {
      {"duration", G::basic, K::numeric},
      {"protocol_type", G::basic, K::categorical},
      {"service", G::basic, K::categorical},
      {"flag", G::basic, K::categorical},
      {"src_bytes", G::basic, K::numeric},
      {"dst_bytes", G::basic, K::numeric},
      {"land", G::basic, K::binary},
      {"wrong_fragment", G::basic, K::numeric},
      {"urgent", G::basic, K::numeric},
      {"hot", G::content, K::numeric},
      {"num_failed_logins", G::content, K::numeric},
      {"logged_in", G::content, K::binary},
      {"num_compromised", G::content, K::numeric},
      {"root_shell", G::content, K::binary},
      {"su_attempted", G::content, K::numeric},
      {"num_root", G::content, K::numeric},
      {"num_file_creations", G::content, K::numeric},
      {"num_shells", G::content, K::numeric},
      {"num_access_files", G::content, K::numeric},
      {"num_outbound_cmds", G::content, K::numeric},
      {"is_host_login", G::content, K::binary},
      {"is_guest_login", G::content, K::binary},
      {"count", G::time, K::numeric},
      {"srv_count", G::time, K::numeric},
      {"serror_rate", G::time, K::numeric},
      {"srv_serror_rate", G::time, K::numeric},
      {"rerror_rate", G::time, K::numeric},
      {"srv_rerror_rate", G::time, K::numeric},
      {"same_srv_rate", G::time, K::numeric},
      {"diff_srv_rate", G::time, K::numeric},
      {"srv_diff_host_rate", G::time, K::numeric},
      {"dst_host_count", G::additional, K::numeric},
      {"dst_host_srv_count", G::additional, K::numeric},
      {"dst_host_same_srv_rate", G::additional, K::numeric},
      {"dst_host_diff_srv_rate", G::additional, K::numeric},
      {"dst_host_same_src_port_rate", G::additional, K::numeric},
      {"dst_host_srv_diff_host_rate", G::additional, K::numeric},
      {"dst_host_serror_rate", G::additional, K::numeric},
      {"dst_host_srv_serror_rate", G::additional, K::numeric},
      {"dst_host_rerror_rate", G::additional, K::numeric},
      {"dst_host_srv_rerror_rate", G::additional, K::numeric},
      {"label", G::labelled, K::categorical},
  });
}

}  // namespace

DatasetSchema load_schema(DatasetId id) {
  switch (id) {
    case DatasetId::unsw_nb15: return unsw_raw();
    case DatasetId::unsw_nb15_split: return unsw_split();
    case DatasetId::kdd99: return kdd();
  }
  throw Error(Errc::usage, "unsupported dataset id");
}

std::string schema_table_csv(const DatasetSchema& schema) {
  std::string out = "ordinal,name,group,kind\n";
  for (const auto& f : schema.features()) {
    out += std::to_string(f.ordinal);
    out += ',';
    out += f.name;
    out += ',';
    out += group_name(f.group);
    out += ',';
    out += kind_name(f.kind);
    out += '\n';
  }
  return out;
}

// ---------------------------------------------------------------------------

std::optional<std::uint8_t> record_label(const FlowRecord& record, const DatasetSchema& schema) {
  const auto& cell = record.values.at(schema.label_index());
  if (const auto* d = std::get_if<double>(&cell)) return *d != 0.0 ? 1 : 0;
  if (const auto* s = std::get_if<std::string>(&cell)) {
    std::string_view v = *s;
    if (!v.empty() && v.back() == '.') v.remove_suffix(1);
    std::string lower(v);
    for (auto& c : lower) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    if (lower == "normal") return 0;
    // UNSW label columns sometimes arrive as text "0"/"1".
    if (lower == "0") return 0;
    return 1;
  }
  return std::nullopt;
}

std::optional<std::string> record_category(const FlowRecord& record, const DatasetSchema& schema) {
  const auto idx = schema.attack_category_index();
  if (!idx) return std::nullopt;
  const auto& cell = record.values.at(*idx);
  if (const auto* s = std::get_if<std::string>(&cell)) return *s;
  if (const auto* d = std::get_if<double>(&cell)) return format_cell(*d);
  return std::nullopt;
}

namespace {

bool needs_quotes(std::string_view s) {
  if (s.empty()) return true;
  if (std::isspace(static_cast<unsigned char>(s.front())) || std::isspace(static_cast<unsigned char>(s.back())))
    return true;
  return s.find_first_of(",\"\r\n") != std::string_view::npos;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

std::optional<double> parse_number(std::string_view s) {
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  double value = 0.0;
  const auto* end = s.data() + s.size();
  const auto [ptr, ec] = std::from_chars(s.data(), end, value);
  if (ec != std::errc{} || ptr != end || !std::isfinite(value)) return std::nullopt;
  return value;
}

struct RowFailure {
  Errc code;
  std::optional<std::size_t> column;
  std::string detail;
};

std::optional<FlowRecord> parse_fields_impl(std::span<const std::string> fields, const DatasetSchema& schema,
                                            RowFailure& failure) {
  if (fields.size() != schema.size()) {
    failure = {Errc::wrong_column_count, std::nullopt,
               "expected " + std::to_string(schema.size()) + " cells, got " + std::to_string(fields.size())};
    return std::nullopt;
  }
  FlowRecord record;
  record.values.reserve(fields.size());
  for (std::size_t i = 0; i < fields.size(); ++i) {
    const auto& text = fields[i];
    if (text.empty()) {
      record.values.emplace_back(std::monostate{});
      continue;
    }
    if (schema[i].kind == FeatureKind::categorical) {
      record.values.emplace_back(text);
      continue;
    }
    const auto number = parse_number(text);
    if (!number) {
      failure = {Errc::unparsable_numeric, i + 1, "'" + text + "' in column " + schema[i].name};
      return std::nullopt;
    }
    record.values.emplace_back(*number);
  }
  if (const auto t = schema.time_index())
    if (const auto* d = std::get_if<double>(&record.values[*t])) record.stime = *d;
  return record;
}

}  // namespace

std::string format_cell(const Cell& cell) {
  if (const auto* d = std::get_if<double>(&cell)) {
    char buf[32];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, *d);
    return std::string(buf, ptr);
  }
  if (const auto* s = std::get_if<std::string>(&cell)) {
    if (!needs_quotes(*s)) return *s;
    std::string out = "\"";
    for (const char c : *s) {
      if (c == '"') out += '"';
      out += c;
    }
    out += '"';
    return out;
  }
  return {};
}

std::string format_record(const FlowRecord& record) {
  std::string out;
  for (std::size_t i = 0; i < record.values.size(); ++i) {
    if (i) out += ',';
    out += format_cell(record.values[i]);
  }
  return out;
}

std::vector<std::string> split_csv_fields(std::string_view line) {
  std::vector<std::string> fields;
  if (line.find('"') == std::string_view::npos) {
    std::size_t start = 0;
    while (true) {
      const auto comma = line.find(',', start);
      const auto piece = line.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start);
      fields.emplace_back(trim(piece));
      if (comma == std::string_view::npos) break;
      start = comma + 1;
    }
    return fields;
  }

  std::string current;
  bool quoted_cell = false;
  bool in_quotes = false;
  std::size_t i = 0;
  auto finish = [&] {
    fields.push_back(quoted_cell ? current : std::string(trim(current)));
    current.clear();
    quoted_cell = false;
  };
  while (i < line.size()) {
    const char c = line[i];
    if (in_quotes) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          current += '"';
          ++i;
        } else {
          in_quotes = false;
        }
      } else {
        current += c;
      }
    } else if (c == '"' && trim(current).empty()) {
      current.clear();
      in_quotes = true;
      quoted_cell = true;
    } else if (c == ',') {
      finish();
    } else if (!quoted_cell) {
      current += c;
    }
    // text trailing a closing quote is dropped
    ++i;
  }
  finish();
  return fields;
}

FlowRecord parse_fields(std::span<const std::string> fields, const DatasetSchema& schema) {
  RowFailure failure{};
  auto record = parse_fields_impl(fields, schema, failure);
  if (!record) {
    std::string where = failure.column ? "column " + std::to_string(*failure.column) + ": " : "";
    throw Error(failure.code, where + failure.detail);
  }
  return std::move(*record);
}

// ---------------------------------------------------------------------------

CsvReader::CsvReader(const std::filesystem::path& path, const DatasetSchema& schema, ParseOptions options)
    : schema_(&schema), options_(options) {
  auto file = std::make_unique<std::ifstream>(path, std::ios::binary);
  if (!*file) throw Error(Errc::source_unreadable, "cannot open " + path.string());
  in_ = std::move(file);
}

CsvReader::CsvReader(std::unique_ptr<std::istream> stream, const DatasetSchema& schema, ParseOptions options)
    : in_(std::move(stream)), schema_(&schema), options_(options) {
  if (!in_ || !*in_) throw Error(Errc::source_unreadable, "input stream is not readable");
}

CsvReader::~CsvReader() = default;
CsvReader::CsvReader(CsvReader&&) noexcept = default;
CsvReader& CsvReader::operator=(CsvReader&&) noexcept = default;

bool CsvReader::read_physical_record(std::string& out, std::size_t& first_line) {
  out.clear();
  std::string line;
  bool open_quote = false;
  bool any = false;
  while (std::getline(*in_, line)) {
    ++line_no_;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!any) first_line = line_no_;
    if (any) out += '\n';
    out += line;
    any = true;
    open_quote ^= (std::count(line.begin(), line.end(), '"') % 2) == 1;
    if (!open_quote) return true;
  }
  if (in_->bad()) throw Error(Errc::source_unreadable, "read failure at line " + std::to_string(line_no_));
  return any;
}

bool is_header_row(std::span<const std::string> fields, const DatasetSchema& schema) {
  std::size_t matches = 0;
  const auto n = std::min(fields.size(), schema.size());
  for (std::size_t i = 0; i < n; ++i)
    if (normalize_feature_name(fields[i]) == normalize_feature_name(schema[i].name)) ++matches;
  return 2 * matches >= schema.size();
}

bool CsvReader::looks_like_header(std::span<const std::string> fields) const {
  return is_header_row(fields, *schema_);
}

void CsvReader::reject(Errc code, std::size_t line_no, std::optional<std::size_t> column, std::string detail) {
  if (options_.strict) {
    std::string where = "line " + std::to_string(line_no);
    if (column) where += " column " + std::to_string(*column);
    throw Error(code, where + ": " + detail);
  }
  ++summary_.rows_rejected;
  if (summary_.issues.size() < ParseSummary::kMaxIssues)
    summary_.issues.push_back(ParseIssue{code, line_no, column, std::move(detail)});
}

std::optional<FlowRecord> CsvReader::next() {
  std::size_t first_line = 0;
  while (read_physical_record(buffer_, first_line)) {
    if (trim(buffer_).empty()) continue;
    const auto fields = split_csv_fields(buffer_);
    if (first_row_) {
      first_row_ = false;
      if (looks_like_header(fields)) {
        summary_.header_detected = true;
        continue;
      }
    }
    RowFailure failure{};
    auto record = parse_fields_impl(fields, *schema_, failure);
    if (!record) {
      reject(failure.code, first_line, failure.column, std::move(failure.detail));
      continue;
    }
    ++summary_.rows_ok;
    return record;
  }
  return std::nullopt;
}

std::vector<FlowRecord> read_csv(const std::filesystem::path& path, const DatasetSchema& schema,
                                 ParseOptions options, ParseSummary* summary) {
  CsvReader reader(path, schema, options);
  std::vector<FlowRecord> records;
  while (auto r = reader.next()) records.push_back(std::move(*r));
  if (summary) *summary = reader.summary();
  return records;
}

// ---------------------------------------------------------------------------

std::vector<RecordPartition> split_by_time(std::span<const FlowRecord> records, double slot_seconds,
                                           const DatasetSchema& schema) {
  if (!(slot_seconds > 0.0)) throw Error(Errc::usage, "slot length must be positive");
  if (!schema.time_index())
    throw Error(Errc::no_time_feature, std::string(dataset_name(schema.id())) + " has no start-time column");

  std::map<std::int64_t, RecordPartition> slots;
  for (std::size_t i = 0; i < records.size(); ++i) {
    const auto& r = records[i];
    if (!r.stime) throw Error(Errc::no_time_feature, "record " + std::to_string(i) + " has no start time");
    const auto slot = static_cast<std::int64_t>(std::floor(*r.stime / slot_seconds));
    auto& part = slots[slot];
    if (part.records.empty()) {
      part.slot_start = static_cast<double>(slot) * slot_seconds;
      part.slot_length = slot_seconds;
    }
    part.records.push_back(r);
  }
  std::vector<RecordPartition> out;
  out.reserve(slots.size());
  for (auto& [_, part] : slots) out.push_back(std::move(part));
  return out;
}

RowPolicy parse_row_policy(std::string_view text) {
  auto numbers = [&](std::string_view rest) {
    std::vector<std::string> parts;
    std::string cur;
    for (const char c : rest) {
      if (c == ',') {
        parts.push_back(cur);
        cur.clear();
      } else {
        cur += c;
      }
    }
    parts.push_back(cur);
    return parts;
  };
  try {
    if (text == "official") return OfficialFiles{};
    if (text.starts_with("head:")) {
      const auto parts = numbers(text.substr(5));
      if (parts.size() != 2) throw Error(Errc::usage, "head policy needs two counts");
      return HeadCounts{std::stoull(parts[0]), std::stoull(parts[1])};
    }
    if (text.starts_with("random:")) {
      const auto parts = numbers(text.substr(7));
      if (parts.empty() || parts.size() > 2) throw Error(Errc::usage, "random policy needs fraction[,seed]");
      RandomSplit split{std::stod(parts[0]), 0};
      if (parts.size() == 2) split.seed = std::stoull(parts[1]);
      return split;
    }
  } catch (const std::logic_error&) {
    throw Error(Errc::usage, "malformed row policy '" + std::string(text) + "'");
  }
  throw Error(Errc::usage, "unknown row policy '" + std::string(text) + "'");
}

std::string describe_row_policy(const RowPolicy& policy) {
  if (std::holds_alternative<OfficialFiles>(policy)) return "official";
  if (const auto* h = std::get_if<HeadCounts>(&policy))
    return "head:" + std::to_string(h->n_train) + "," + std::to_string(h->n_test);
  const auto& r = std::get<RandomSplit>(policy);
  return "random:" + format_cell(r.fraction) + "," + std::to_string(r.seed);
}

RowSelection select_rows(std::vector<FlowRecord> records, const RowPolicy& policy,
                         std::vector<FlowRecord> official_test) {
  RowSelection out;
  if (std::holds_alternative<OfficialFiles>(policy)) {
    out.train = std::move(records);
    out.test = std::move(official_test);
    return out;
  }
  if (const auto* h = std::get_if<HeadCounts>(&policy)) {
    if (h->n_train > records.size() || h->n_test > records.size() - h->n_train)
      throw Error(Errc::insufficient_rows, "need " + std::to_string(h->n_train) + "+" + std::to_string(h->n_test) +
                                               " rows, have " + std::to_string(records.size()));
    const auto train_end = records.begin() + static_cast<std::ptrdiff_t>(h->n_train);
    const auto test_end = train_end + static_cast<std::ptrdiff_t>(h->n_test);
    out.train.assign(std::make_move_iterator(records.begin()), std::make_move_iterator(train_end));
    out.test.assign(std::make_move_iterator(train_end), std::make_move_iterator(test_end));
    return out;
  }
  const auto& r = std::get<RandomSplit>(policy);
  if (!(r.fraction > 0.0 && r.fraction < 1.0)) throw Error(Errc::usage, "split fraction must be in (0, 1)");
  const auto n = records.size();
  const auto n_train = static_cast<std::size_t>(std::llround(r.fraction * static_cast<double>(n)));
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  Rng rng(r.seed);
  shuffle_in_place(std::span<std::size_t>(order), rng);
  std::vector<std::uint8_t> in_train(n, 0);
  for (std::size_t i = 0; i < n_train; ++i) in_train[order[i]] = 1;
  for (std::size_t i = 0; i < n; ++i) (in_train[i] ? out.train : out.test).push_back(std::move(records[i]));
  return out;
}

}  // namespace sadf
