#include "sadf/config.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "sadf/error.hpp"

namespace sadf {

namespace {

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::string unquote(std::string_view v) {
  if (v.size() >= 2 && (v.front() == '"' || v.front() == '\'') && v.back() == v.front())
    return std::string(v.substr(1, v.size() - 2));
  return std::string(v);
}

std::string shortest(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

}  // namespace

std::uint64_t parse_u64(std::string_view key, std::string_view text) {
  std::uint64_t v = 0;
  const auto res = std::from_chars(text.data(), text.data() + text.size(), v);
  if (res.ec != std::errc{} || res.ptr != text.data() + text.size() || text.empty())
    throw Error(Errc::usage, std::string(key) + " expects a non-negative integer, got '" + std::string(text) + "'");
  return v;
}

double parse_double(std::string_view key, std::string_view text) {
  double v = 0;
  const auto res = std::from_chars(text.data(), text.data() + text.size(), v);
  if (res.ec != std::errc{} || res.ptr != text.data() + text.size() || text.empty())
    throw Error(Errc::usage, std::string(key) + " expects a number, got '" + std::string(text) + "'");
  return v;
}

bool parse_bool(std::string_view key, std::string_view text) {
  if (text == "1" || text == "true" || text == "yes" || text == "on") return true;
  if (text == "0" || text == "false" || text == "no" || text == "off") return false;
  throw Error(Errc::usage, std::string(key) + " expects true or false, got '" + std::string(text) + "'");
}

// ---------------------------------------------------------------------------

KeyValues KeyValues::parse(std::string_view text) {
  KeyValues kv;
  std::string section;
  std::size_t line_no = 0;
  while (!text.empty()) {
    const auto nl = text.find('\n');
    auto line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') throw Error(Errc::usage, "config line " + std::to_string(line_no) + ": bad section");
      section = std::string(trim(line.substr(1, line.size() - 2)));
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string_view::npos)
      throw Error(Errc::usage, "config line " + std::to_string(line_no) + ": expected key = value");
    const auto key = trim(line.substr(0, eq));
    if (key.empty()) throw Error(Errc::usage, "config line " + std::to_string(line_no) + ": empty key");
    kv.set(section.empty() ? std::string(key) : section + "." + std::string(key), unquote(trim(line.substr(eq + 1))));
  }
  return kv;
}

KeyValues KeyValues::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::io_failure, "cannot read config " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse(ss.str());
}

std::optional<std::string> KeyValues::get(std::string_view key) const {
  const auto it = entries_.find(std::string(key));
  if (it == entries_.end()) return std::nullopt;
  return it->second;
}

std::string KeyValues::get_or(std::string_view key, std::string_view fallback) const {
  return get(key).value_or(std::string(fallback));
}

void KeyValues::merge(const KeyValues& over) {
  for (const auto& [k, v] : over.entries_) entries_[k] = v;
}

std::string KeyValues::text() const {
  std::string out;
  for (const auto& [k, v] : entries_) out += k + "=" + v + "\n";
  return out;
}

// ---------------------------------------------------------------------------

RunConfig resolve_config(const KeyValues& kv) {
  RunConfig cfg;
  if (const auto d = kv.get("dataset")) {
    const auto id = parse_dataset_id(*d);
    if (!id) throw Error(Errc::usage, "unknown dataset '" + *d + "'");
    cfg.dataset = *id;
  }
  const auto schema = load_schema(cfg.dataset);
  cfg.encoder = default_encoder_config(schema);
  if (const auto s = kv.get("seed")) cfg.seed = parse_u64("seed", *s);
  cfg.encoder.seed = cfg.seed;
  cfg.params.forest.seed = cfg.seed;
  cfg.params.svm.seed = cfg.seed;
  cfg.rows = RandomSplit{0.7, cfg.seed};

  for (const auto& [key, value] : kv.entries()) {
    if (key == "dataset" || key == "seed") continue;
    if (key.starts_with("encode.")) {
      apply_encoder_setting(cfg.encoder, schema, key, value);
    } else if (key.starts_with("model.")) {
      apply_model_setting(cfg.params, key, value);
    } else if (key == "model") {
      const auto m = parse_model_kind(value);
      if (!m) throw Error(Errc::usage, "unknown model '" + value + "'");
      cfg.model = *m;
    } else if (key == "rows") {
      cfg.rows = parse_row_policy(value);
    } else if (key == "chunk") {
      cfg.chunk_size = parse_u64(key, value);
      if (cfg.chunk_size == 0) throw Error(Errc::usage, "chunk must be >= 1");
    } else if (key == "workers") {
      cfg.workers = parse_u64(key, value);
      if (cfg.workers == 0) throw Error(Errc::usage, "workers must be >= 1");
    } else if (key == "threshold") {
      cfg.alert_threshold = parse_u64(key, value);
    } else if (key == "strict") {
      cfg.strict = parse_bool(key, value);
    } else if (key == "input") {
      cfg.input = value;
    } else if (key == "test") {
      cfg.test = value;
    } else if (key == "model_file") {
      cfg.model_path = value;
    } else if (key == "encoder_file") {
      cfg.encoder_path = value;
    } else if (key == "out") {
      cfg.out = value;
    } else if (key == "log_dir") {
      cfg.log_dir = value;
    } else if (key == "metrics") {
      cfg.metrics = value;
    } else {
      throw Error(Errc::usage, "unknown config key '" + key + "'");
    }
  }
  return cfg;
}

std::string RunConfig::snapshot() const {
  const auto schema = load_schema(dataset);
  KeyValues kv;
  kv.set("dataset", std::string(dataset_name(dataset)));
  kv.set("rows", describe_row_policy(rows));
  kv.set("seed", std::to_string(seed));
  kv.set("strict", strict ? "true" : "false");
  kv.set("model", std::string(model_name(model)));
  kv.set("chunk", std::to_string(chunk_size));
  kv.set("workers", std::to_string(workers));
  kv.set("threshold", std::to_string(alert_threshold));
  kv.set("encode.unknown", encoder.unknown == UnknownCategory::all_zero ? "zero" : "hash");
  kv.set("encode.seed", std::to_string(encoder.seed));
  kv.set("encode.strict", encoder.strict_missing ? "true" : "false");
  for (std::size_t c = 0; c < schema.size() && c < encoder.policies.size(); ++c)
    kv.set("encode." + schema[c].name, policy_text(encoder.policies[c]));
  kv.set("model.max_depth", std::to_string(model == ModelKind::rf ? params.forest.max_depth : params.tree.max_depth));
  kv.set("model.min_leaf", std::to_string(model == ModelKind::rf ? params.forest.min_leaf : params.tree.min_leaf));
  kv.set("model.trees", std::to_string(params.forest.n_trees));
  kv.set("model.mtry", std::to_string(params.forest.mtry));
  kv.set("model.bootstrap", params.forest.bootstrap ? "true" : "false");
  kv.set("model.lambda", shortest(params.svm.lambda));
  kv.set("model.epochs", std::to_string(params.svm.epochs));
  kv.set("model.k", std::to_string(params.knn.k));
  return kv.text();
}

}  // namespace sadf
