#include "sadf/detect_engine.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <future>

#include "sadf/worker_pool.hpp"

namespace sadf {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t) {
  return std::chrono::duration<double>(Clock::now() - t).count();
}

template <class T>
std::vector<T> wait_all(std::vector<std::future<T>>& futures) {
  std::vector<T> out;
  out.reserve(futures.size());
  std::exception_ptr first;
  for (auto& f : futures) {
    try {
      out.push_back(f.get());
    } catch (...) {
      if (!first) first = std::current_exception();
      out.emplace_back();
    }
  }
  if (first) std::rethrow_exception(first);
  return out;
}

struct EncodedChunk {
  FeatureMatrix x;
  std::vector<std::uint8_t> y;
  std::vector<std::uint8_t> labeled;
  std::optional<double> latest_stime;
};

EncodedChunk encode_chunk(const Encoder& encoder, const RecordChunk& chunk) {
  EncodedChunk out{FeatureMatrix(encoder.dimension()), {}, {}, std::nullopt};
  out.x.reserve(chunk.records.size(), chunk.records.size() * 64);
  std::vector<std::uint32_t> index;
  std::vector<double> value;
  for (const auto& r : chunk.records) {
    index.clear();
    value.clear();
    const auto y = encoder.encode_sparse(r, index, value);
    out.x.add_row(index, value);
    out.y.push_back(y.value_or(0));
    out.labeled.push_back(y.has_value() ? 1 : 0);
    if (r.stime) out.latest_stime = std::max(out.latest_stime.value_or(*r.stime), *r.stime);
  }
  return out;
}

ChunkReport classify_rows(const TrainedModel& model, const FeatureMatrix& x, std::span<const std::uint8_t> y,
                          std::span<const std::uint8_t> labeled, std::size_t threshold) {
  const auto start = Clock::now();
  ChunkReport report;
  report.predictions.reserve(x.rows());
  for (std::size_t i = 0; i < x.rows(); ++i) {
    const auto p = predict(model, x.row(i));
    report.predictions.push_back(p);
    report.attack_count += p;
    if (labeled[i]) report.confusion.add(y[i], p);
  }
  report.alert = report.attack_count >= threshold;
  report.detect_time_s = seconds_since(start);
  return report;
}

}  // namespace

// ---------------------------------------------------------------------------

ChunkStream::ChunkStream(RecordSource& source, std::size_t chunk_size) : source_(&source), chunk_size_(chunk_size) {
  if (chunk_size == 0) throw Error(Errc::usage, "chunk size must be >= 1");
}

std::optional<RecordChunk> ChunkStream::next() {
  RecordChunk chunk;
  chunk.records.reserve(chunk_size_);
  while (chunk.records.size() < chunk_size_) {
    auto r = source_->next();
    if (!r) break;
    chunk.records.push_back(std::move(*r));
  }
  if (chunk.records.empty()) return std::nullopt;
  chunk.index = next_index_++;
  chunk.span = {next_row_, next_row_ + chunk.records.size() - 1};
  next_row_ += chunk.records.size();
  return chunk;
}

std::vector<Chunk> chunk_stream(std::span<const FeatureVector> vectors, std::size_t chunk_size) {
  if (chunk_size == 0) throw Error(Errc::usage, "chunk size must be >= 1");
  std::vector<Chunk> chunks;
  for (std::size_t begin = 0; begin < vectors.size(); begin += chunk_size) {
    const auto end = std::min(vectors.size(), begin + chunk_size);
    Chunk c;
    c.index = chunks.size();
    c.span = {begin, end - 1};
    c.vectors.assign(vectors.begin() + static_cast<std::ptrdiff_t>(begin),
                     vectors.begin() + static_cast<std::ptrdiff_t>(end));
    chunks.push_back(std::move(c));
  }
  return chunks;
}

bool PhaseTimings::additive() const noexcept {
  const double slack = 0.05 * total_s + 0.05;
  if (total_s + 1e-12 < load_distribute_s || total_s + 1e-12 < preprocess_s || total_s + 1e-12 < detect_s)
    return false;
  return std::abs(total_s - phase_sum()) <= slack;
}

std::size_t DetectionRun::alert_count() const noexcept {
  return static_cast<std::size_t>(std::count_if(reports.begin(), reports.end(), [](const auto& r) { return r.alert; }));
}

std::vector<std::uint8_t> DetectionRun::predictions() const {
  std::vector<std::uint8_t> out;
  out.reserve(records);
  for (const auto& r : reports) out.insert(out.end(), r.predictions.begin(), r.predictions.end());
  return out;
}

// ---------------------------------------------------------------------------

std::string AlertRecord::line() const {
  return run_id + "," + std::to_string(chunk_index) + "," + std::to_string(first_row) + "," +
         std::to_string(last_row) + "," + std::to_string(attack_count) + "," + std::to_string(unix_ts);
}

FileAlertSink::FileAlertSink(const std::filesystem::path& path) : path_(path), out_(path, std::ios::app) {
  if (!out_) throw Error(Errc::sink_write_failure, "cannot open alert log " + path.string());
}

void FileAlertSink::write(const AlertRecord& alert) {
  out_ << alert.line() << '\n';
  out_.flush();
  if (!out_) throw Error(Errc::sink_write_failure, "write to " + path_.string() + " failed");
}

std::optional<AlertRecord> raise_alert(const ChunkReport& report, const std::string& run_id, AlertSink& sink) {
  if (!report.alert) return std::nullopt;
  AlertRecord alert;
  alert.run_id = run_id;
  alert.chunk_index = report.chunk_index;
  alert.first_row = report.span.first_row;
  alert.last_row = report.span.last_row;
  alert.attack_count = report.attack_count;
  if (report.latest_stime) {
    alert.unix_ts = static_cast<std::int64_t>(std::floor(*report.latest_stime));
  } else {
    alert.unix_ts = std::chrono::duration_cast<std::chrono::seconds>(
                        std::chrono::system_clock::now().time_since_epoch())
                        .count();
  }
  sink.write(alert);
  return alert;
}

// ---------------------------------------------------------------------------

ChunkReport classify_chunk(const TrainedModel& model, const Chunk& chunk, std::size_t alert_threshold) {
  FeatureMatrix x(model_dimension(model));
  std::vector<std::uint8_t> y, labeled;
  for (const auto& v : chunk.vectors) {
    if (v.x.size() != x.cols())
      throw Error(Errc::dimension_mismatch, "chunk vector length differs from the model dimension");
    x.add_dense_row(v.x);
    y.push_back(v.y);
    labeled.push_back(v.labeled ? 1 : 0);
  }
  auto report = classify_rows(model, x, y, labeled, alert_threshold);
  report.chunk_index = chunk.index;
  report.span = chunk.span;
  return report;
}

DetectionRun run_detection(const TrainedModel& model, const Encoder& encoder, RecordSource& source,
                           const DetectOptions& options) {
  const auto run_start = Clock::now();
  if (options.workers == 0) throw Error(Errc::usage, "workers must be >= 1");
  if (options.chunk_size == 0) throw Error(Errc::usage, "chunk size must be >= 1");
  if (model_dimension(model) != encoder.dimension())
    throw Error(Errc::encoder_model_mismatch, "model expects " + std::to_string(model_dimension(model)) +
                                                  " features, encoder produces " +
                                                  std::to_string(encoder.dimension()));

  std::size_t workers = options.workers;
  if (model_kind(model) == ModelKind::knn && !options.force_pooled_knn) workers = 1;

  DetectionRun run;
  run.config.run_id = options.run_id;
  run.config.model_id = options.model_id.empty() ? std::string(model_name(model_kind(model))) : options.model_id;
  run.config.encoder_id = encoder.fingerprint();
  run.config.chunk_size = options.chunk_size;
  run.config.workers = workers;
  run.config.alert_threshold = options.alert_threshold;

  std::size_t window = options.window_chunks;
  if (window == 0) window = std::max<std::size_t>(workers * 4, (16384 + options.chunk_size - 1) / options.chunk_size);

  WorkerPool pool(workers);
  ChunkStream stream(source, options.chunk_size);

  // Phases are contiguous laps, so setup and per-window teardown land in
  // load/distribute and no wall time goes unattributed.
  auto mark = run_start;
  auto lap = [&mark] {
    const auto now = Clock::now();
    const double s = std::chrono::duration<double>(now - mark).count();
    mark = now;
    return s;
  };

  while (true) {
    // Load and distribute: pull the next window of chunks off the source.
    std::vector<RecordChunk> chunks;
    chunks.reserve(window);
    while (chunks.size() < window) {
      auto c = stream.next();
      if (!c) break;
      chunks.push_back(std::move(*c));
    }
    run.timings.load_distribute_s += lap();
    if (chunks.empty()) break;

    std::vector<std::future<EncodedChunk>> encode_jobs;
    encode_jobs.reserve(chunks.size());
    for (const auto& c : chunks) encode_jobs.push_back(pool.submit([&encoder, &c] { return encode_chunk(encoder, c); }));
    auto encoded = wait_all(encode_jobs);
    run.timings.preprocess_s += lap();

    std::vector<std::future<ChunkReport>> detect_jobs;
    detect_jobs.reserve(chunks.size());
    for (const auto& e : encoded)
      detect_jobs.push_back(pool.submit([&model, &e, &options] {
        return classify_rows(model, e.x, e.y, e.labeled, options.alert_threshold);
      }));
    auto reports = wait_all(detect_jobs);

    // Sequencer: chunk order, regardless of completion order.
    for (std::size_t i = 0; i < chunks.size(); ++i) {
      auto& report = reports[i];
      report.chunk_index = chunks[i].index;
      report.span = chunks[i].span;
      report.latest_stime = encoded[i].latest_stime;
      run.records += report.predictions.size();
      run.labeled_records += static_cast<std::size_t>(
          std::count(encoded[i].labeled.begin(), encoded[i].labeled.end(), std::uint8_t{1}));
      run.aggregate += report.confusion;
      if (options.sink) raise_alert(report, run.config.run_id, *options.sink);
      if (options.on_chunk) options.on_chunk(chunks[i], report);
      run.reports.push_back(std::move(report));
    }
    run.timings.detect_s += lap();
  }
  run.timings.total_s = seconds_since(run_start);
  return run;
}

// ---------------------------------------------------------------------------

std::string file_sha256(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::io_failure, "cannot read " + path.string());
  std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), &EVP_MD_CTX_free);
  if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1)
    throw Error(Errc::io_failure, "sha256 initialisation failed");
  std::vector<char> buf(1 << 16);
  while (in) {
    in.read(buf.data(), static_cast<std::streamsize>(buf.size()));
    const auto got = in.gcount();
    if (got > 0) EVP_DigestUpdate(ctx.get(), buf.data(), static_cast<std::size_t>(got));
  }
  if (in.bad()) throw Error(Errc::io_failure, "read failure on " + path.string());
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_DigestFinal_ex(ctx.get(), digest, &len);
  static constexpr char hex[] = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < len; ++i) {
    out += hex[digest[i] >> 4];
    out += hex[digest[i] & 0xf];
  }
  return out;
}

ArchiveResult archive_input(const std::filesystem::path& path, const std::filesystem::path& log_dir,
                            const std::string& run_id) {
  namespace fs = std::filesystem;
  std::error_code ec;
  if (!fs::is_regular_file(path, ec)) throw Error(Errc::io_failure, "no such input file " + path.string());

  std::string base = run_id;
  if (base.empty()) {
    const auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                        std::chrono::system_clock::now().time_since_epoch())
                        .count();
    base = "run-" + std::to_string(ms);
  }
  fs::create_directories(log_dir, ec);
  if (ec) throw Error(Errc::io_failure, "cannot create " + log_dir.string() + ": " + ec.message());

  ArchiveResult result;
  for (std::size_t attempt = 0;; ++attempt) {
    result.run_dir = log_dir / (attempt == 0 ? base : base + "-" + std::to_string(attempt));
    if (fs::create_directory(result.run_dir, ec)) break;
    if (ec) throw Error(Errc::io_failure, "cannot create " + result.run_dir.string() + ": " + ec.message());
  }
  result.archived = result.run_dir / path.filename();
  if (!fs::copy_file(path, result.archived, ec) || ec)
    throw Error(Errc::io_failure, "copy to " + result.archived.string() + " failed: " + ec.message());
  result.sha256 = file_sha256(result.archived);

  std::ofstream sum(result.run_dir / (path.filename().string() + ".sha256"));
  sum << result.sha256 << "  " << path.filename().string() << '\n';
  if (!sum) throw Error(Errc::io_failure, "cannot write checksum file");
  return result;
}

}  // namespace sadf
