#include <gtest/gtest.h>

#include <json.hpp>

#include "sadf/cli.hpp"
#include "sadf/synth.hpp"
#include "support.hpp"

namespace sadf {
namespace {

namespace fs = std::filesystem;

struct Result {
  int code;
  std::string out, err;
};

Result run(std::vector<std::string> args) {
  args.insert(args.begin(), "sadf");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::string field(const std::string& text, const std::string& key) {
  std::istringstream in(text);
  for (std::string line; std::getline(in, line);)
    if (line.starts_with(key + ": ")) return line.substr(key.size() + 2);
  return {};
}

// Second line of the metrics table, split on commas.
std::vector<std::string> metrics_row(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  std::getline(in, line);
  std::getline(in, line);
  std::vector<std::string> cells;
  std::istringstream row(line);
  for (std::string c; std::getline(row, c, ',');) cells.push_back(c);
  return cells;
}

std::vector<std::string> header_cells(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  std::getline(in, line);
  std::vector<std::string> cells;
  std::istringstream row(line);
  for (std::string c; std::getline(row, c, ',');) cells.push_back(c);
  return cells;
}

double metric(const std::string& text, const std::string& name) {
  const auto head = header_cells(text);
  const auto row = metrics_row(text);
  for (std::size_t i = 0; i < head.size(); ++i)
    if (head[i] == name) return std::stod(row.at(i));
  ADD_FAILURE() << "no column " << name << " in " << text;
  return 0;
}

TEST(Schema, RowCounts) {
  const auto u = run({"schema", "unsw_nb15"});
  ASSERT_EQ(u.code, 0) << u.err;
  EXPECT_EQ(test::count_lines(u.out), 49u + 1);
  const auto k = run({"schema", "kdd99"});
  ASSERT_EQ(k.code, 0) << k.err;
  EXPECT_EQ(test::count_lines(k.out), 42u + 1);
}

TEST(Schema, UnknownDatasetIsUsage) {
  const auto r = run({"schema", "cicids"});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("error:"), std::string::npos);
  EXPECT_EQ(run({"schema"}).code, 2);
  EXPECT_EQ(run({}).code, 2);
}

struct Workspace {
  test::TempDir dir;
  fs::path data = dir / "flows.csv";
  fs::path model = dir / "dt.bin";
  fs::path encoder = dir / "dt.enc";

  Workspace() {
    const auto s = run({"synth", "--rows", "3000", "--out", data.string(), "--seed", "4"});
    EXPECT_EQ(s.code, 0) << s.err;
  }

  Result train(const std::string& kind = "dt", const std::vector<std::string>& extra = {}) {
    std::vector<std::string> args = {"train",   "--input", data.string(),    "--model", kind,
                                     "--out",   model.string(), "--encoder", encoder.string()};
    args.insert(args.end(), extra.begin(), extra.end());
    return run(args);
  }

  Result detect(const fs::path& input, const fs::path& alerts, const std::string& workers,
                const std::vector<std::string>& extra = {}) {
    std::vector<std::string> args = {"detect",  "--model",   model.string(), "--encoder", encoder.string(),
                                     "--input", input.string(), "--alerts", alerts.string(), "--workers",
                                     workers,   "--run-id",  "fixed"};
    args.insert(args.end(), extra.begin(), extra.end());
    return run(args);
  }
};

TEST(Synth, WritesRequestedRows) {
  Workspace ws;
  EXPECT_EQ(test::count_lines(test::read_file(ws.data)), 3001u);
  EXPECT_EQ(read_csv(ws.data, load_schema(DatasetId::unsw_nb15)).size(), 3000u);
}

TEST(Train, WritesArtifactsAndMetrics) {
  Workspace ws;
  const auto r = ws.train();
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_TRUE(fs::exists(ws.model));
  EXPECT_TRUE(fs::exists(ws.encoder));
  const double acc = metric(r.out, "accuracy_pct");
  EXPECT_GE(acc, 0.0);
  EXPECT_LE(acc, 100.0);
  EXPECT_EQ(metrics_row(r.out).at(0), "dt");
}

TEST(Train, DefaultEncoderPathBesideModel) {
  Workspace ws;
  const auto r = run({"train", "--input", ws.data.string(), "--out", ws.model.string()});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_TRUE(fs::exists(ws.dir / "dt.encoder.bin"));
}

TEST(Train, SameSeedSameBytes) {
  Workspace ws;
  for (const auto& kind : {"dt", "rf", "svm"}) {
    ASSERT_EQ(ws.train(kind, {"--seed", "9"}).code, 0);
    const auto model_a = test::read_file(ws.model);
    const auto enc_a = test::read_file(ws.encoder);
    ASSERT_EQ(ws.train(kind, {"--seed", "9"}).code, 0);
    EXPECT_EQ(model_a, test::read_file(ws.model)) << kind;
    EXPECT_EQ(enc_a, test::read_file(ws.encoder)) << kind;
  }
}

TEST(Train, BadArgumentsExitCodes) {
  Workspace ws;
  EXPECT_EQ(run({"train", "--out", ws.model.string()}).code, 2);
  EXPECT_EQ(run({"train", "--input", (ws.dir / "nope.csv").string(), "--out", ws.model.string()}).code, 1);
  EXPECT_EQ(ws.train("kmeans").code, 2);
}

TEST(Train, MetricsFileAppends) {
  Workspace ws;
  const auto metrics = ws.dir / "metrics.csv";
  ASSERT_EQ(ws.train("dt", {"--metrics", metrics.string()}).code, 0);
  ASSERT_EQ(ws.train("nb", {"--metrics", metrics.string()}).code, 0);
  EXPECT_EQ(test::count_lines(test::read_file(metrics)), 3u);
}

TEST(Detect, WorkerCountDoesNotChangeAlerts) {
  Workspace ws;
  ASSERT_EQ(ws.train().code, 0);
  const auto one = ws.detect(ws.data, ws.dir / "a1.log", "1");
  const auto eight = ws.detect(ws.data, ws.dir / "a8.log", "8");
  ASSERT_EQ(one.code, 0) << one.err;
  ASSERT_EQ(eight.code, 0) << eight.err;
  const auto log1 = test::read_file(ws.dir / "a1.log");
  EXPECT_GT(test::count_lines(log1), 0u);

  // Timestamps come from the records, so the whole files agree.
  EXPECT_EQ(log1, test::read_file(ws.dir / "a8.log"));
  EXPECT_EQ(field(one.out, "alerts"), field(eight.out, "alerts"));
  EXPECT_EQ(field(one.out, "accuracy_pct"), field(eight.out, "accuracy_pct"));
  EXPECT_EQ(field(one.out, "records"), "3000");
  EXPECT_EQ(field(one.out, "chunks"), "10 (size 300)");
}

TEST(Detect, StrictMalformedInputLeavesNoAlertLog) {
  Workspace ws;
  ASSERT_EQ(ws.train().code, 0);
  auto text = test::read_file(ws.data);
  text += "this,is,not,a,flow\n";
  test::write_file(ws.dir / "bad.csv", text);
  const auto alerts = ws.dir / "bad.log";
  const auto r = ws.detect(ws.dir / "bad.csv", alerts, "2", {"--strict"});
  EXPECT_NE(r.code, 0);
  EXPECT_FALSE(fs::exists(alerts));
  EXPECT_FALSE(fs::exists(alerts.string() + ".partial"));

  // An existing log is left untouched by a failed run.
  test::write_file(alerts, "old\n");
  EXPECT_NE(ws.detect(ws.dir / "bad.csv", alerts, "2", {"--strict"}).code, 0);
  EXPECT_EQ(test::read_file(alerts), "old\n");
}

TEST(Detect, LenientByDefaultSkipsBadRows) {
  Workspace ws;
  ASSERT_EQ(ws.train().code, 0);
  test::write_file(ws.dir / "bad.csv", test::read_file(ws.data) + "junk\n");
  const auto r = run({"detect", "--model", ws.model.string(), "--encoder", ws.encoder.string(), "--input",
                      (ws.dir / "bad.csv").string(), "--alerts", (ws.dir / "x.log").string()});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(field(r.out, "records"), "3000");
  EXPECT_EQ(field(r.out, "rejected_rows"), "1");
}

TEST(Detect, AccuracyMatchesEval) {
  Workspace ws;
  ASSERT_EQ(ws.train().code, 0);
  const auto d = ws.detect(ws.data, ws.dir / "a.log", "3");
  ASSERT_EQ(d.code, 0) << d.err;
  const auto e = run({"eval", "--model", ws.model.string(), "--encoder", ws.encoder.string(), "--input",
                      ws.data.string()});
  ASSERT_EQ(e.code, 0) << e.err;
  EXPECT_NEAR(std::stod(field(d.out, "accuracy_pct")), metric(e.out, "accuracy_pct"), 1e-3);
}

TEST(Detect, TimingsAddUp) {
  Workspace ws;
  ASSERT_EQ(ws.train("nb").code, 0);
  const auto d = ws.detect(ws.data, ws.dir / "a.log", "2");
  ASSERT_EQ(d.code, 0) << d.err;
  const double sum = std::stod(field(d.out, "load_distribute_s")) + std::stod(field(d.out, "preprocess_s")) +
                     std::stod(field(d.out, "detect_s"));
  const double total = std::stod(field(d.out, "total_s"));
  EXPECT_LE(sum, total * 1.001 + 1e-5);
  EXPECT_NEAR(std::stod(field(d.out, "throughput_pps")), 3000 / total, 3000 / total * 1e-4);
}

TEST(Detect, ArchivesInput) {
  Workspace ws;
  ASSERT_EQ(ws.train().code, 0);
  const auto r = run({"detect", "--model", ws.model.string(), "--encoder", ws.encoder.string(), "--input",
                      ws.data.string(), "--alerts", (ws.dir / "a.log").string(), "--log-dir",
                      (ws.dir / "archive").string()});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto archived = field(r.out, "archived");
  ASSERT_FALSE(archived.empty());
  const auto path = archived.substr(0, archived.find(' '));
  EXPECT_EQ(test::read_file(path), test::read_file(ws.data));
}

TEST(Detect, MismatchedEncoderFails) {
  Workspace ws;
  ASSERT_EQ(ws.train().code, 0);
  const auto other = ws.dir / "other.enc";
  ASSERT_EQ(run({"train", "--input", ws.data.string(), "--out", (ws.dir / "o.bin").string(), "--encoder",
                 other.string(), "--set", "encode.srcip=drop"})
                .code,
            0);
  const auto r = run({"detect", "--model", ws.model.string(), "--encoder", other.string(), "--input",
                      ws.data.string(), "--alerts", (ws.dir / "a.log").string()});
  EXPECT_EQ(r.code, 1);
  EXPECT_FALSE(fs::exists(ws.dir / "a.log"));
}

TEST(Split, HeadPolicyCounts) {
  Workspace ws;
  const auto r = run({"split", "--input", ws.data.string(), "--rows", "head:1000,500", "--out",
                      (ws.dir / "parts").string()});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(r.out, "train.csv,1000\ntest.csv,500\n");
  EXPECT_EQ(test::count_lines(test::read_file(ws.dir / "parts" / "test.csv")), 501u);
}

// ---------------------------------------------------------------------------

TEST(Config, FlagsBeatFile) {
  Workspace ws;
  const auto conf = ws.dir / "run.conf";
  test::write_file(conf, "model = nb\nseed = 3\n[model]\ndepth_unused_guard = 1\n");
  // Unknown keys are rejected even when a flag is set.
  EXPECT_EQ(ws.train("dt", {"--config", conf.string()}).code, 2);

  test::write_file(conf, "# comment\nmodel = nb\n[model]\nmax_depth = 3\n");
  const auto from_file = run({"train", "--input", ws.data.string(), "--out", ws.model.string(), "--config",
                              conf.string()});
  ASSERT_EQ(from_file.code, 0) << from_file.err;
  EXPECT_EQ(metrics_row(from_file.out).at(0), "nb");
  const auto overridden = ws.train("dt", {"--config", conf.string()});
  ASSERT_EQ(overridden.code, 0) << overridden.err;
  EXPECT_EQ(metrics_row(overridden.out).at(0), "dt");
}

TEST(Config, UnknownKeyIsUsage) {
  Workspace ws;
  const auto r = ws.train("dt", {"--set", "modle=dt"});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("modle"), std::string::npos);
  EXPECT_EQ(ws.train("dt", {"--set", "noequals"}).code, 2);
  EXPECT_EQ(run({"detect", "--chunk", "0", "--input", ws.data.string()}).code, 2);
}

TEST(Config, SnapshotRoundTrips) {
  KeyValues kv;
  kv.set("model", "rf");
  kv.set("seed", "17");
  kv.set("model.trees", "7");
  kv.set("encode.srcip", "hash:64");
  kv.set("rows", "head:100,50");
  const auto cfg = resolve_config(kv);
  const auto text = cfg.snapshot();
  EXPECT_EQ(resolve_config(KeyValues::parse(text)).snapshot(), text);
  EXPECT_NE(text.find("model.trees=7"), std::string::npos);
  EXPECT_NE(text.find("encode.srcip=hash:64"), std::string::npos);
}

TEST(Config, BenchKeysAreSeparated) {
  KeyValues kv;
  kv.set("bench.models", "dt,svm");
  kv.set("bench.counts", "10,20");
  kv.set("seed", "1");
  const auto plan = take_bench_plan(kv);
  EXPECT_EQ(plan.models, (std::vector<std::string>{"dt", "svm"}));
  EXPECT_EQ(plan.counts, (std::vector<std::size_t>{10, 20}));
  EXPECT_EQ(kv.entries().size(), 1u);

  KeyValues bad;
  bad.set("bench.modles", "dt");
  EXPECT_ERRC(take_bench_plan(bad), Errc::usage);
  KeyValues zero;
  zero.set("bench.repetitions", "0");
  EXPECT_ERRC(take_bench_plan(zero), Errc::usage);
}

// ---------------------------------------------------------------------------

TEST(Bench, RunsMatrixAndWritesTables) {
  test::TempDir dir;
  const auto conf = dir / "bench.conf";
  test::write_file(conf,
                   "[bench]\nmodels = dt,nb\ncounts = 400,900\nrepetitions = 3\ntrain_rows = 1500\nformat = csv\n");
  const auto r = run({"bench", "--config", conf.string(), "--out", (dir / "report").string()});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto runs = test::read_file(dir / "report" / "runs.csv");
  EXPECT_EQ(test::count_lines(runs), 1u + 12);
  const auto detect = test::read_file(dir / "report" / "detect_time.csv");
  EXPECT_EQ(test::count_lines(detect), 1u + 2);
  EXPECT_TRUE(detect.starts_with("records,dt,nb\n"));
  const auto meta = nlohmann::json::parse(test::read_file(dir / "report" / "meta.json"));
  EXPECT_EQ(meta["cases"], 4);
  EXPECT_TRUE(meta["failed"].empty());
  EXPECT_NE(meta["config"].get<std::string>().find("bench.models=dt,nb"), std::string::npos);
}

}  // namespace
}  // namespace sadf
