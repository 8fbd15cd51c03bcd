#include "sadf/bench_report.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <thread>

#include <json.hpp>

#include "sadf/error.hpp"

namespace sadf {

namespace fs = std::filesystem;

namespace {

std::string shortest(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

// One CSV record, possibly spanning lines inside quotes. Newlines kept.
bool read_record(std::istream& in, std::string& out) {
  out.clear();
  std::string line;
  bool open = false;
  bool any = false;
  while (std::getline(in, line)) {
    if (any) out += '\n';
    out += line;
    any = true;
    open ^= (std::count(line.begin(), line.end(), '"') % 2) == 1;
    if (!open) return true;
  }
  return any;
}

bool blank(const std::string& s) { return s.find_first_not_of(" \t\r\n") == std::string::npos; }

std::string column_label(const BenchCase& c, bool qualify) {
  if (!qualify) return c.model_id;
  return c.model_id + "@c" + std::to_string(c.chunk_size) + "w" + std::to_string(c.workers);
}

double metric_value(const BenchRow& row, BenchMetric m) {
  switch (m) {
    case BenchMetric::detect: return row.mean.detect_s;
    case BenchMetric::load: return row.mean.load_distribute_s;
    case BenchMetric::preprocess: return row.mean.preprocess_s;
    case BenchMetric::total: return row.mean.total_s;
    case BenchMetric::throughput: return row.throughput_pps;
  }
  return 0.0;
}

const char* metric_name(BenchMetric m) {
  switch (m) {
    case BenchMetric::detect: return "detect_time";
    case BenchMetric::load: return "load_time";
    case BenchMetric::preprocess: return "preprocess_time";
    case BenchMetric::total: return "total_time";
    case BenchMetric::throughput: return "throughput";
  }
  return "";
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out << text;
  out.flush();
  if (!out) throw Error(Errc::sink_write_failure, "cannot write " + path.string());
}

std::string table_csv(const BenchTable& t) {
  std::string out = "records";
  if (t.with_size) out += ",file_mb";
  for (const auto& c : t.columns) out += "," + c;
  out += '\n';
  for (std::size_t r = 0; r < t.counts.size(); ++r) {
    out += std::to_string(t.counts[r]);
    if (t.with_size) out += "," + shortest(t.file_mb[r]);
    for (const auto& cell : t.cells[r]) out += "," + (cell ? shortest(*cell) : std::string());
    out += '\n';
  }
  return out;
}

std::string table_json(const BenchTable& t) {
  using json = nlohmann::ordered_json;
  json doc;
  doc["table"] = t.name;
  doc["unit"] = t.name == "throughput" ? "records_per_second" : "seconds";
  doc["columns"] = t.columns;
  json rows = json::array();
  for (std::size_t r = 0; r < t.counts.size(); ++r) {
    json row;
    row["records"] = t.counts[r];
    if (t.with_size) row["file_mb"] = t.file_mb[r];
    for (std::size_t c = 0; c < t.columns.size(); ++c) {
      if (t.cells[r][c])
        row[t.columns[c]] = *t.cells[r][c];
      else
        row[t.columns[c]] = nullptr;
    }
    rows.push_back(std::move(row));
  }
  doc["rows"] = std::move(rows);
  return doc.dump(2) + "\n";
}

}  // namespace

// ---------------------------------------------------------------------------

std::vector<LadderFile> make_ladder(const fs::path& source, const DatasetSchema& schema,
                                    std::vector<std::size_t> counts, const fs::path& out_dir) {
  if (counts.empty()) throw Error(Errc::usage, "ladder needs at least one count");
  for (const auto c : counts)
    if (c == 0) throw Error(Errc::usage, "ladder counts must be >= 1");
  std::sort(counts.begin(), counts.end());
  counts.erase(std::unique(counts.begin(), counts.end()), counts.end());

  std::ifstream in(source, std::ios::binary);
  if (!in) throw Error(Errc::source_unreadable, "cannot open " + source.string());
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) throw Error(Errc::io_failure, "cannot create " + out_dir.string() + ": " + ec.message());

  std::vector<LadderFile> files;
  std::vector<std::ofstream> outs;
  for (const auto c : counts) {
    files.push_back({c, out_dir / ("ladder_" + std::to_string(c) + ".csv"), 0});
    outs.emplace_back(files.back().path, std::ios::binary | std::ios::trunc);
    if (!outs.back()) throw Error(Errc::io_failure, "cannot write " + files.back().path.string());
  }

  std::string record;
  std::size_t rows = 0;
  bool first = true;
  std::size_t open_from = 0;  // files[open_from..] still need rows
  while (open_from < files.size() && read_record(in, record)) {
    if (blank(record)) continue;
    if (!record.empty() && record.back() == '\r') record.pop_back();
    if (first) {
      first = false;
      if (is_header_row(split_csv_fields(record), schema)) {
        for (auto& o : outs) o << record << '\n';
        continue;
      }
    }
    for (std::size_t i = open_from; i < files.size(); ++i) outs[i] << record << '\n';
    ++rows;
    while (open_from < files.size() && rows == files[open_from].count) ++open_from;
  }

  for (auto& o : outs) o.close();
  if (open_from < files.size()) {
    for (const auto& f : files) fs::remove(f.path, ec);
    throw Error(Errc::insufficient_rows, "source has " + std::to_string(rows) + " rows, ladder needs " +
                                             std::to_string(files.back().count));
  }
  for (auto& f : files) f.bytes = fs::file_size(f.path);
  return files;
}

double throughput_pps(std::size_t records, double total_s) noexcept {
  return total_s > 0 ? static_cast<double>(records) / total_s : 0.0;
}

PhaseTimings mean_timings(std::span<const PhaseTimings> runs) {
  PhaseTimings m;
  if (runs.empty()) return m;
  for (const auto& r : runs) {
    m.load_distribute_s += r.load_distribute_s;
    m.preprocess_s += r.preprocess_s;
    m.detect_s += r.detect_s;
    m.total_s += r.total_s;
  }
  const auto n = static_cast<double>(runs.size());
  m.load_distribute_s /= n;
  m.preprocess_s /= n;
  m.detect_s /= n;
  m.total_s /= n;
  return m;
}

std::vector<BenchRow> run_bench(std::span<const BenchCase> cases, const std::map<std::string, TrainedModel>& models,
                                const Encoder& encoder, const DatasetSchema& schema,
                                const std::function<void(const BenchRow&)>& progress) {
  if (cases.empty()) throw Error(Errc::usage, "no bench cases");
  std::vector<BenchRow> rows;
  for (const auto& c : cases) {
    BenchRow row;
    row.bench_case = c;
    try {
      if (c.repetitions == 0) throw Error(Errc::usage, "repetitions must be >= 1");
      const auto it = models.find(c.model_id);
      if (it == models.end()) throw Error(Errc::usage, "no trained model '" + c.model_id + "'");
      for (std::size_t rep = 0; rep < c.repetitions; ++rep) {
        CsvSource source(c.input, schema);
        DetectOptions opts;
        opts.chunk_size = c.chunk_size;
        opts.workers = c.workers;
        opts.run_id = "bench";
        opts.model_id = c.model_id;
        const auto run = run_detection(it->second, encoder, source, opts);
        row.records_seen = run.records;
        row.runs.push_back(run.timings);
      }
      row.mean = mean_timings(row.runs);
      row.throughput_pps = throughput_pps(row.records_seen, row.mean.total_s);
    } catch (const std::exception& e) {
      row.failed = true;
      row.error = e.what();
    }
    if (progress) progress(row);
    rows.push_back(std::move(row));
  }
  return rows;
}

// ---------------------------------------------------------------------------

BenchTable build_table(std::span<const BenchRow> rows, BenchMetric metric) {
  BenchTable t;
  t.name = metric_name(metric);
  t.with_size = metric == BenchMetric::load || metric == BenchMetric::total;

  bool qualify = false;
  for (const auto& r : rows)
    if (r.bench_case.chunk_size != rows.front().bench_case.chunk_size ||
        r.bench_case.workers != rows.front().bench_case.workers)
      qualify = true;

  for (const auto& r : rows) {
    const auto label = column_label(r.bench_case, qualify);
    if (std::find(t.columns.begin(), t.columns.end(), label) == t.columns.end()) t.columns.push_back(label);
    if (std::find(t.counts.begin(), t.counts.end(), r.bench_case.records) == t.counts.end())
      t.counts.push_back(r.bench_case.records);
  }
  std::sort(t.counts.begin(), t.counts.end());
  t.file_mb.assign(t.counts.size(), 0.0);
  t.cells.assign(t.counts.size(), std::vector<std::optional<double>>(t.columns.size()));

  for (const auto& r : rows) {
    const auto ri = static_cast<std::size_t>(
        std::find(t.counts.begin(), t.counts.end(), r.bench_case.records) - t.counts.begin());
    const auto ci = static_cast<std::size_t>(
        std::find(t.columns.begin(), t.columns.end(), column_label(r.bench_case, qualify)) - t.columns.begin());
    t.file_mb[ri] = std::max(t.file_mb[ri], r.bench_case.file_mb);
    if (!r.failed) t.cells[ri][ci] = metric_value(r, metric);
  }
  return t;
}

std::vector<fs::path> emit_tables(std::span<const BenchRow> rows, const fs::path& out_dir, TableFormat format) {
  if (rows.empty()) throw Error(Errc::usage, "no bench rows to report");
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) throw Error(Errc::sink_write_failure, "cannot create " + out_dir.string() + ": " + ec.message());

  std::vector<fs::path> written;
  for (const auto metric : {BenchMetric::detect, BenchMetric::load, BenchMetric::preprocess, BenchMetric::total,
                            BenchMetric::throughput}) {
    const auto table = build_table(rows, metric);
    if (format != TableFormat::json) {
      written.push_back(out_dir / (table.name + ".csv"));
      write_text(written.back(), table_csv(table));
    }
    if (format != TableFormat::csv) {
      written.push_back(out_dir / (table.name + ".json"));
      write_text(written.back(), table_json(table));
    }
  }

  std::string runs = "model,records,chunk,workers,rep,load_distribute_s,preprocess_s,detect_s,total_s\n";
  for (const auto& r : rows) {
    const auto& c = r.bench_case;
    for (std::size_t i = 0; i < r.runs.size(); ++i) {
      const auto& t = r.runs[i];
      runs += c.model_id + "," + std::to_string(c.records) + "," + std::to_string(c.chunk_size) + "," +
              std::to_string(c.workers) + "," + std::to_string(i) + "," + shortest(t.load_distribute_s) + "," +
              shortest(t.preprocess_s) + "," + shortest(t.detect_s) + "," + shortest(t.total_s) + "\n";
    }
  }
  written.push_back(out_dir / "runs.csv");
  write_text(written.back(), runs);
  return written;
}

std::string cpu_model_name() {
  std::ifstream in("/proc/cpuinfo");
  std::string line;
  while (std::getline(in, line)) {
    if (line.rfind("model name", 0) == 0) {
      const auto colon = line.find(':');
      if (colon != std::string::npos) {
        auto name = line.substr(colon + 1);
        name.erase(0, name.find_first_not_of(' '));
        return name;
      }
    }
  }
  return "unknown";
}

fs::path write_bench_meta(std::span<const BenchRow> rows, const fs::path& out_dir,
                          const std::string& config_snapshot) {
  using json = nlohmann::ordered_json;
  json meta;
  meta["cpu"] = cpu_model_name();
  meta["cores"] = std::thread::hardware_concurrency();
  meta["cases"] = rows.size();
  json failed = json::array();
  for (const auto& r : rows) {
    if (!r.failed) continue;
    failed.push_back({{"model", r.bench_case.model_id},
                      {"records", r.bench_case.records},
                      {"chunk", r.bench_case.chunk_size},
                      {"workers", r.bench_case.workers},
                      {"error", r.error}});
  }
  meta["failed"] = std::move(failed);
  meta["config"] = config_snapshot;
  const auto path = out_dir / "meta.json";
  write_text(path, meta.dump(2) + "\n");
  return path;
}

}  // namespace sadf
