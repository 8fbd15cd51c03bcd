#include "sadf/cli.hpp"

#include <chrono>
#include <fstream>
#include <iomanip>
#include <map>
#include <memory>
#include <ostream>

#include <CLI11.hpp>

#include "sadf/detect_engine.hpp"
#include "sadf/error.hpp"
#include "sadf/synth.hpp"

namespace sadf {

namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;

std::vector<std::string> split_list(std::string_view text) {
  std::vector<std::string> out;
  std::string cur;
  for (const char c : text) {
    if (c == ',') {
      if (!cur.empty()) out.push_back(cur);
      cur.clear();
    } else if (c != ' ') {
      cur += c;
    }
  }
  if (!cur.empty()) out.push_back(cur);
  return out;
}

std::vector<std::size_t> size_list(std::string_view key, std::string_view text) {
  std::vector<std::size_t> out;
  for (const auto& item : split_list(text)) {
    // Accept 100K / 1M style shorthand.
    std::string digits = item;
    std::size_t mult = 1;
    if (!digits.empty() && (digits.back() == 'K' || digits.back() == 'k')) mult = 1000, digits.pop_back();
    else if (!digits.empty() && (digits.back() == 'M' || digits.back() == 'm')) mult = 1000000, digits.pop_back();
    out.push_back(parse_u64(key, digits) * mult);
  }
  if (out.empty()) throw Error(Errc::usage, std::string(key) + " is empty");
  return out;
}

void append_metrics(const fs::path& path, const std::string& row) {
  const bool fresh = !fs::exists(path) || fs::file_size(path) == 0;
  std::ofstream out(path, std::ios::app);
  if (fresh) out << metrics_csv_header() << '\n';
  out << row << '\n';
  if (!out) throw Error(Errc::io_failure, "cannot append to " + path.string());
}

void write_records(const fs::path& path, const DatasetSchema& schema, std::span<const FlowRecord> records) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  for (std::size_t i = 0; i < schema.size(); ++i) out << (i ? "," : "") << schema[i].name;
  out << '\n';
  for (const auto& r : records) out << format_record(r) << '\n';
  out.flush();
  if (!out) throw Error(Errc::io_failure, "cannot write " + path.string());
}

void require_path(const fs::path& p, const char* what) {
  if (p.empty()) throw Error(Errc::usage, std::string(what) + " is required");
}

void require_readable(const fs::path& p, const char* what) {
  require_path(p, what);
  std::error_code ec;
  if (!fs::is_regular_file(p, ec)) throw Error(Errc::source_unreadable, std::string(what) + " not found: " + p.string());
}

std::vector<FlowRecord> read_input(const fs::path& path, const DatasetSchema& schema, bool strict, std::ostream& err) {
  ParseSummary summary;
  auto records = read_csv(path, schema, ParseOptions{strict}, &summary);
  if (summary.rows_rejected > 0) {
    err << "warning: " << path.string() << ": skipped " << summary.rows_rejected << " malformed row(s)";
    if (!summary.issues.empty())
      err << "; first at line " << summary.issues.front().line_no << ": " << summary.issues.front().detail;
    err << '\n';
  }
  return records;
}

// Collects flags that map onto config keys; only flags actually given override.
class KeyFlags {
 public:
  void add(CLI::App* app, const std::string& flag, const std::string& key, const std::string& help) {
    auto slot = std::make_unique<std::string>();
    auto* opt = app->add_option(flag, *slot, help);
    entries_.push_back({opt, key, std::move(slot)});
  }
  void apply(KeyValues& kv) const {
    for (const auto& e : entries_)
      if (e.option->count() > 0) kv.set(e.key, *e.value);
  }

 private:
  struct Entry {
    CLI::Option* option;
    std::string key;
    std::unique_ptr<std::string> value;
  };
  std::vector<Entry> entries_;
};

struct Common {
  std::string config;
  std::vector<std::string> sets;
  KeyFlags flags;
  bool strict = false;
};

void add_common(CLI::App* app, Common& c) {
  app->add_option("--config", c.config, "key=value config file; flags override it");
  app->add_option("--set", c.sets, "extra KEY=VALUE setting (repeatable)");
  c.flags.add(app, "--seed", "seed", "seed for every random choice (default 0)");
  c.flags.add(app, "--dataset", "dataset", "unsw_nb15 | unsw_nb15_split | kdd99");
  app->add_flag("--strict", c.strict, "reject the input on the first malformed row");
}

KeyValues gather(const Common& c) {
  KeyValues kv;
  if (!c.config.empty()) kv = KeyValues::load(c.config);
  for (const auto& s : c.sets) {
    const auto eq = s.find('=');
    if (eq == std::string::npos || eq == 0) throw Error(Errc::usage, "--set expects KEY=VALUE, got '" + s + "'");
    kv.set(s.substr(0, eq), s.substr(eq + 1));
  }
  c.flags.apply(kv);
  if (c.strict) kv.set("strict", "true");
  return kv;
}

void print_metrics(std::ostream& out, const TrainOutcome& t, ModelKind kind) {
  out << metrics_csv_header() << '\n'
      << metrics_csv_row(model_name(kind), t.train_rows, t.test_rows, t.metrics) << '\n';
}

// ---------------------------------------------------------------------------

int cmd_schema(const std::string& dataset, std::ostream& out) {
  const auto id = parse_dataset_id(dataset);
  if (!id) throw Error(Errc::usage, "unknown dataset '" + dataset + "' (expected unsw_nb15, unsw_nb15_split, kdd99)");
  out << schema_table_csv(load_schema(*id));
  return 0;
}

int cmd_split(const RunConfig& cfg, double slot, std::ostream& out, std::ostream& err) {
  require_readable(cfg.input, "--input");
  require_path(cfg.out, "--out");
  const auto schema = load_schema(cfg.dataset);
  auto records = read_input(cfg.input, schema, cfg.strict, err);
  fs::create_directories(cfg.out);
  if (slot > 0) {
    const auto parts = split_by_time(records, slot, schema);
    for (const auto& p : parts) {
      const auto name = "slot_" + format_cell(p.slot_start) + ".csv";
      write_records(cfg.out / name, schema, p.records);
      out << name << ',' << p.records.size() << '\n';
    }
    return 0;
  }
  std::vector<FlowRecord> official;
  if (!cfg.test.empty()) official = read_input(cfg.test, schema, cfg.strict, err);
  const auto sel = select_rows(std::move(records), cfg.rows, std::move(official));
  write_records(cfg.out / "train.csv", schema, sel.train);
  write_records(cfg.out / "test.csv", schema, sel.test);
  out << "train.csv," << sel.train.size() << "\ntest.csv," << sel.test.size() << '\n';
  return 0;
}

int cmd_train(RunConfig cfg, bool rows_given, std::ostream& out, std::ostream& err) {
  require_readable(cfg.input, "--input");
  require_path(cfg.model_path, "--out");
  if (cfg.encoder_path.empty()) cfg.encoder_path = fs::path(cfg.model_path).replace_extension(".encoder.bin");
  const auto schema = load_schema(cfg.dataset);
  auto records = read_input(cfg.input, schema, cfg.strict, err);
  std::vector<FlowRecord> official;
  if (!cfg.test.empty()) {
    official = read_input(cfg.test, schema, cfg.strict, err);
    if (!rows_given) cfg.rows = OfficialFiles{};
  }
  const auto sel = select_rows(std::move(records), cfg.rows, std::move(official));
  const auto outcome = fit_and_evaluate(sel.train, sel.test, schema, cfg);
  const auto snapshot = cfg.snapshot();
  save_model(outcome.model, cfg.model_path, snapshot);
  outcome.encoder.save(cfg.encoder_path, snapshot);
  print_metrics(out, outcome, cfg.model);
  if (!cfg.metrics.empty())
    append_metrics(cfg.metrics, metrics_csv_row(model_name(cfg.model), outcome.train_rows, outcome.test_rows,
                                                outcome.metrics));
  return 0;
}

int cmd_eval(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  require_readable(cfg.model_path, "--model");
  require_readable(cfg.encoder_path, "--encoder");
  require_readable(cfg.input, "--input");
  const auto model = load_model(cfg.model_path);
  const auto encoder = Encoder::load(cfg.encoder_path);
  if (model_dimension(model) != encoder.dimension())
    throw Error(Errc::encoder_model_mismatch, "model and encoder were not fitted together");
  const auto records = read_input(cfg.input, encoder.schema(), cfg.strict, err);
  const auto test = encoder.encode_dataset(records);
  const auto metrics = evaluate(model, test);
  const auto row = metrics_csv_row(model_name(model_kind(model)), 0, test.size(), metrics);
  out << metrics_csv_header() << '\n' << row << '\n';
  if (!cfg.metrics.empty()) append_metrics(cfg.metrics, row);
  return 0;
}

struct DetectFlags {
  std::string alerts = "alerts.log";
  std::string annotate;
  std::string run_id;
  bool pool_knn = false;
};

int cmd_detect(const RunConfig& cfg, const DetectFlags& f, std::ostream& out) {
  require_readable(cfg.model_path, "--model");
  require_readable(cfg.encoder_path, "--encoder");
  require_readable(cfg.input, "--input");
  const auto model = load_model(cfg.model_path);
  const auto encoder = Encoder::load(cfg.encoder_path);
  const auto run_id = f.run_id.empty() ? "r" + file_sha256(cfg.input).substr(0, 12) : f.run_id;

  // Alerts and annotations go to side files renamed into place only when the
  // whole run succeeds.
  const fs::path alerts = f.alerts;
  const fs::path alerts_tmp = alerts.string() + ".partial";
  const fs::path annotate = f.annotate;
  const fs::path annotate_tmp = annotate.empty() ? fs::path() : fs::path(annotate.string() + ".partial");
  auto cleanup = [&] {
    std::error_code ec;
    fs::remove(alerts_tmp, ec);
    if (!annotate_tmp.empty()) fs::remove(annotate_tmp, ec);
  };

  try {
    std::error_code ec;
    fs::remove(alerts_tmp, ec);
    if (fs::exists(alerts)) fs::copy_file(alerts, alerts_tmp, fs::copy_options::overwrite_existing);
    FileAlertSink sink(alerts_tmp);

    std::ofstream annotated;
    if (!annotate_tmp.empty()) {
      annotated.open(annotate_tmp, std::ios::binary | std::ios::trunc);
      if (!annotated) throw Error(Errc::sink_write_failure, "cannot write " + annotate_tmp.string());
      const auto& schema = encoder.schema();
      for (std::size_t i = 0; i < schema.size(); ++i) annotated << (i ? "," : "") << schema[i].name;
      annotated << ",predicted\n";
    }

    CsvSource source(cfg.input, encoder.schema(), ParseOptions{cfg.strict});
    DetectOptions opts;
    opts.chunk_size = cfg.chunk_size;
    opts.workers = cfg.workers;
    opts.alert_threshold = cfg.alert_threshold;
    opts.force_pooled_knn = f.pool_knn;
    opts.run_id = run_id;
    opts.sink = &sink;
    if (annotated.is_open()) {
      opts.on_chunk = [&annotated](const RecordChunk& chunk, const ChunkReport& report) {
        for (std::size_t i = 0; i < chunk.records.size(); ++i)
          annotated << format_record(chunk.records[i]) << ',' << int(report.predictions[i]) << '\n';
      };
    }
    const auto run = run_detection(model, encoder, source, opts);
    if (annotated.is_open()) {
      annotated.close();
      if (!annotated) throw Error(Errc::sink_write_failure, "write to " + annotate_tmp.string() + " failed");
      fs::rename(annotate_tmp, annotate);
    }
    fs::rename(alerts_tmp, alerts);

    out << "run_id: " << run_id << '\n'
        << "model: " << model_name(model_kind(model)) << '\n'
        << "records: " << run.records << '\n'
        << "chunks: " << run.reports.size() << " (size " << cfg.chunk_size << ")\n"
        << "workers: " << run.config.workers << '\n'
        << "alerts: " << run.alert_count() << " (threshold " << cfg.alert_threshold << ")\n";
    if (source.summary().rows_rejected > 0) out << "rejected_rows: " << source.summary().rows_rejected << '\n';
    if (run.fully_labeled()) {
      const auto m = metrics_from(run.aggregate);
      out << "accuracy_pct: " << std::setprecision(6) << 100.0 * m.accuracy << '\n'
          << "false_alarm_rate: " << m.false_alarm_rate << '\n';
    }
    const auto& t = run.timings;
    out << std::setprecision(6) << "load_distribute_s: " << t.load_distribute_s << '\n'
        << "preprocess_s: " << t.preprocess_s << '\n'
        << "detect_s: " << t.detect_s << '\n'
        << "total_s: " << t.total_s << '\n';
    if (t.total_s > 0) out << "throughput_pps: " << static_cast<double>(run.records) / t.total_s << '\n';

    if (!cfg.log_dir.empty()) {
      const auto archived = archive_input(cfg.input, cfg.log_dir, run_id);
      out << "archived: " << archived.archived.string() << " sha256=" << archived.sha256 << '\n';
    }
  } catch (...) {
    cleanup();
    throw;
  }
  return 0;
}

int cmd_bench(KeyValues kv, std::ostream& out) {
  auto plan = take_bench_plan(kv);
  const auto cfg = resolve_config(kv);
  require_path(cfg.out, "--out");
  const auto rows = run_bench_plan(plan, cfg, cfg.out, out);
  KeyValues snap = KeyValues::parse(cfg.snapshot());
  snap.set("bench.models", [&] {
    std::string s;
    for (const auto& m : plan.models) s += (s.empty() ? "" : ",") + m;
    return s;
  }());
  snap.set("bench.repetitions", std::to_string(plan.repetitions));
  const auto files = emit_tables(rows, cfg.out, plan.format);
  write_bench_meta(rows, cfg.out, snap.text());
  for (const auto& f : files) out << "wrote " << f.string() << '\n';
  std::size_t failed = 0;
  for (const auto& r : rows) failed += r.failed;
  if (failed > 0) out << failed << " case(s) failed, see meta.json\n";
  return 0;
}

struct SynthFlags {
  std::size_t rows = 1000;
  std::string out;
  double attack_fraction = 0.3;
  double overlap = 0.06;
  bool no_header = false;
};

int cmd_synth(const RunConfig& cfg, const SynthFlags& f, std::ostream& out) {
  require_path(f.out, "--out");
  SynthOptions opts;
  opts.seed = cfg.seed;
  opts.attack_fraction = f.attack_fraction;
  opts.overlap = f.overlap;
  write_synth_csv(f.out, f.rows, opts, !f.no_header);
  out << "wrote " << f.rows << " records to " << f.out << '\n';
  return 0;
}

}  // namespace

// ---------------------------------------------------------------------------

TrainOutcome fit_and_evaluate(std::span<const FlowRecord> train, std::span<const FlowRecord> test,
                              const DatasetSchema& schema, const RunConfig& cfg) {
  auto encoder = Encoder::fit(train, schema, cfg.encoder);
  const auto train_set = encoder.encode_dataset(train);
  const auto start = Clock::now();
  auto model = train_model(cfg.model, train_set, cfg.params);
  const double train_s = std::chrono::duration<double>(Clock::now() - start).count();

  EvalMetrics metrics;
  if (!test.empty()) metrics = evaluate(model, encoder.encode_dataset(test));
  metrics.train_time_s = train_s;
  return TrainOutcome{std::move(encoder), std::move(model), metrics, train.size(), test.size()};
}

BenchPlan take_bench_plan(KeyValues& kv) {
  BenchPlan plan;
  KeyValues rest;
  for (const auto& [key, value] : kv.entries()) {
    if (!key.starts_with("bench.")) {
      rest.set(key, value);
      continue;
    }
    if (key == "bench.models") {
      plan.models = split_list(value);
      if (plan.models.empty()) throw Error(Errc::usage, "bench.models is empty");
      for (const auto& m : plan.models)
        if (!parse_model_kind(m)) throw Error(Errc::usage, "unknown model '" + m + "' in bench.models");
    } else if (key == "bench.counts") {
      plan.counts = size_list(key, value);
    } else if (key == "bench.chunks") {
      plan.chunks = size_list(key, value);
    } else if (key == "bench.workers") {
      plan.workers = size_list(key, value);
    } else if (key == "bench.repetitions") {
      plan.repetitions = parse_u64(key, value);
      if (plan.repetitions == 0) throw Error(Errc::usage, "bench.repetitions must be >= 1");
    } else if (key == "bench.train_rows") {
      plan.train_rows = parse_u64(key, value);
    } else if (key == "bench.source") {
      plan.source = value;
    } else if (key == "bench.train") {
      plan.train = value;
    } else if (key == "bench.format") {
      if (value == "csv") plan.format = TableFormat::csv;
      else if (value == "json") plan.format = TableFormat::json;
      else if (value == "both") plan.format = TableFormat::both;
      else throw Error(Errc::usage, "bench.format must be csv|json|both");
    } else {
      throw Error(Errc::usage, "unknown config key '" + key + "'");
    }
  }
  kv = std::move(rest);
  return plan;
}

std::vector<BenchRow> run_bench_plan(const BenchPlan& plan, const RunConfig& cfg, const fs::path& out_dir,
                                     std::ostream& log) {
  const auto schema = load_schema(cfg.dataset);
  fs::create_directories(out_dir);

  std::vector<FlowRecord> train;
  if (plan.train.empty()) {
    SynthOptions opts;
    opts.seed = cfg.seed + 1;
    train = synth_records(plan.train_rows, opts);
  } else {
    train = read_csv(plan.train, schema, ParseOptions{cfg.strict});
  }

  fs::path source = plan.source;
  if (source.empty()) {
    std::size_t max_count = 0;
    for (const auto c : plan.counts) max_count = std::max(max_count, c);
    source = out_dir / "source.csv";
    SynthOptions opts;
    opts.seed = cfg.seed;
    write_synth_csv(source, max_count, opts);
  }
  const auto ladder = make_ladder(source, schema, plan.counts, out_dir / "ladder");

  const auto encoder = Encoder::fit(train, schema, cfg.encoder);
  const auto train_set = encoder.encode_dataset(train);
  std::map<std::string, TrainedModel> models;
  for (const auto& id : plan.models) {
    const auto kind = *parse_model_kind(id);
    log << "training " << id << " on " << train_set.size() << " rows\n";
    models.emplace(id, train_model(kind, train_set, cfg.params));
  }

  std::vector<BenchCase> cases;
  for (const auto& id : plan.models)
    for (const auto chunk : plan.chunks)
      for (const auto workers : plan.workers)
        for (const auto& step : ladder) {
          BenchCase c;
          c.model_id = id;
          c.records = step.count;
          c.input = step.path;
          c.chunk_size = chunk;
          c.workers = workers;
          c.repetitions = plan.repetitions;
          c.file_mb = static_cast<double>(step.bytes) / 1e6;
          cases.push_back(std::move(c));
        }
  return run_bench(cases, models, encoder, schema, [&log](const BenchRow& r) {
    const auto& c = r.bench_case;
    log << c.model_id << " records=" << c.records << " chunk=" << c.chunk_size << " workers=" << c.workers;
    if (r.failed)
      log << " FAILED: " << r.error << '\n';
    else
      log << " total_s=" << r.mean.total_s << " pps=" << r.throughput_pps << '\n';
  });
}

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Chunked flow-record attack detection"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all");

  std::string schema_name;
  auto* schema_cmd = app.add_subcommand("schema", "print the column table of a dataset");
  schema_cmd->add_option("dataset", schema_name, "unsw_nb15 | unsw_nb15_split | kdd99")->required();

  Common split_c, train_c, eval_c, detect_c, bench_c, synth_c;

  auto* split_cmd = app.add_subcommand("split", "split a CSV into train/test files or time slots");
  add_common(split_cmd, split_c);
  split_c.flags.add(split_cmd, "--input", "input", "input CSV");
  split_c.flags.add(split_cmd, "--test", "test", "official test CSV (rows = official)");
  split_c.flags.add(split_cmd, "--rows", "rows", "official | head:N,M | random:F[,SEED]");
  split_c.flags.add(split_cmd, "--out", "out", "output directory");
  double slot = 0;
  split_cmd->add_option("--slot", slot, "split by start time into slots of this many seconds");

  auto* train_cmd = app.add_subcommand("train", "fit encoder and model, report test metrics");
  add_common(train_cmd, train_c);
  train_c.flags.add(train_cmd, "--input", "input", "training CSV");
  train_c.flags.add(train_cmd, "--test", "test", "separate test CSV");
  train_c.flags.add(train_cmd, "--rows", "rows", "official | head:N,M | random:F[,SEED]");
  train_c.flags.add(train_cmd, "--model", "model", "nb | dt | rf | svm | knn");
  train_c.flags.add(train_cmd, "--out", "model_file", "model output path");
  train_c.flags.add(train_cmd, "--encoder", "encoder_file", "encoder output path");
  train_c.flags.add(train_cmd, "--metrics", "metrics", "CSV file the metrics row is appended to");
  train_c.flags.add(train_cmd, "--train-workers", "model.train_workers", "threads for forest training");

  auto* eval_cmd = app.add_subcommand("eval", "evaluate a saved model on a labeled CSV");
  add_common(eval_cmd, eval_c);
  eval_c.flags.add(eval_cmd, "--model", "model_file", "model file");
  eval_c.flags.add(eval_cmd, "--encoder", "encoder_file", "encoder file");
  eval_c.flags.add(eval_cmd, "--input", "input", "test CSV");
  eval_c.flags.add(eval_cmd, "--metrics", "metrics", "CSV file the metrics row is appended to");

  DetectFlags detect_f;
  auto* detect_cmd = app.add_subcommand("detect", "stream a CSV through the chunked detector");
  add_common(detect_cmd, detect_c);
  detect_c.flags.add(detect_cmd, "--model", "model_file", "model file");
  detect_c.flags.add(detect_cmd, "--encoder", "encoder_file", "encoder file");
  detect_c.flags.add(detect_cmd, "--input", "input", "CSV to classify");
  detect_c.flags.add(detect_cmd, "--chunk", "chunk", "records per chunk (default 300)");
  detect_c.flags.add(detect_cmd, "--workers", "workers", "worker threads (default 1)");
  detect_c.flags.add(detect_cmd, "--threshold", "threshold", "attacks per chunk that raise an alert (default 1)");
  detect_c.flags.add(detect_cmd, "--log-dir", "log_dir", "archive the input under this directory");
  detect_cmd->add_option("--alerts", detect_f.alerts, "alert log, appended to (default alerts.log)");
  detect_cmd->add_option("--annotate", detect_f.annotate, "write the input with a predicted column");
  detect_cmd->add_option("--run-id", detect_f.run_id, "run id (default derived from the input checksum)");
  detect_cmd->add_flag("--pool-knn", detect_f.pool_knn, "let KNN use the worker pool");

  auto* bench_cmd = app.add_subcommand("bench", "run the benchmark matrix and write report tables");
  add_common(bench_cmd, bench_c);
  bench_c.flags.add(bench_cmd, "--out", "out", "report directory");

  SynthFlags synth_f;
  auto* synth_cmd = app.add_subcommand("synth", "write synthetic flow records");
  add_common(synth_cmd, synth_c);
  synth_cmd->add_option("--rows", synth_f.rows, "record count");
  synth_cmd->add_option("--out", synth_f.out, "output CSV");
  synth_cmd->add_option("--attack-fraction", synth_f.attack_fraction, "share of attack rows");
  synth_cmd->add_option("--overlap", synth_f.overlap, "share of rows drawn from the other class's profile");
  synth_cmd->add_flag("--no-header", synth_f.no_header, "omit the header line");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 2;
  }

  try {
    if (schema_cmd->parsed()) return cmd_schema(schema_name, out);
    if (split_cmd->parsed()) return cmd_split(resolve_config(gather(split_c)), slot, out, err);
    if (train_cmd->parsed()) {
      const auto kv = gather(train_c);
      return cmd_train(resolve_config(kv), kv.contains("rows"), out, err);
    }
    if (eval_cmd->parsed()) return cmd_eval(resolve_config(gather(eval_c)), out, err);
    if (detect_cmd->parsed()) return cmd_detect(resolve_config(gather(detect_c)), detect_f, out);
    if (bench_cmd->parsed()) return cmd_bench(gather(bench_c), out);
    if (synth_cmd->parsed()) return cmd_synth(resolve_config(gather(synth_c)), synth_f, out);
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return e.code() == Errc::usage ? 2 : 1;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
  return 2;
}

}  // namespace sadf
