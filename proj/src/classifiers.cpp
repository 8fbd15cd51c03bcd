#include "sadf/classifiers.hpp"

#include <chrono>
#include <cstdio>
#include <set>

#include "sadf/binary_io.hpp"
#include "sadf/error.hpp"

namespace sadf {

std::string_view model_name(ModelKind kind) noexcept {
  switch (kind) {
    case ModelKind::nb: return "nb";
    case ModelKind::dt: return "dt";
    case ModelKind::rf: return "rf";
    case ModelKind::svm: return "svm";
    case ModelKind::knn: return "knn";
  }
  return "?";
}

std::optional<ModelKind> parse_model_kind(std::string_view name) noexcept {
  for (auto k : {ModelKind::nb, ModelKind::dt, ModelKind::rf, ModelKind::svm, ModelKind::knn})
    if (model_name(k) == name) return k;
  return std::nullopt;
}

namespace {

std::uint64_t to_u64(std::string_view key, std::string_view value) {
  try {
    std::size_t used = 0;
    const std::string s(value);
    const auto v = std::stoull(s, &used);
    if (used == s.size()) return v;
  } catch (const std::logic_error&) {
  }
  throw Error(Errc::usage, std::string(key) + " expects an unsigned integer, got '" + std::string(value) + "'");
}

double to_double(std::string_view key, std::string_view value) {
  try {
    std::size_t used = 0;
    const std::string s(value);
    const auto v = std::stod(s, &used);
    if (used == s.size()) return v;
  } catch (const std::logic_error&) {
  }
  throw Error(Errc::usage, std::string(key) + " expects a number, got '" + std::string(value) + "'");
}

std::string fmt_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

void apply_model_setting(ModelParams& p, std::string_view key, std::string_view value) {
  if (key == "model.max_depth") {
    p.tree.max_depth = p.forest.max_depth = static_cast<int>(to_u64(key, value));
  } else if (key == "model.min_leaf") {
    p.tree.min_leaf = p.forest.min_leaf = to_u64(key, value);
  } else if (key == "model.trees") {
    p.forest.n_trees = to_u64(key, value);
  } else if (key == "model.mtry") {
    p.forest.mtry = to_u64(key, value);
  } else if (key == "model.bootstrap") {
    p.forest.bootstrap = value == "1" || value == "true";
  } else if (key == "model.lambda") {
    p.svm.lambda = to_double(key, value);
  } else if (key == "model.epochs") {
    p.svm.epochs = to_u64(key, value);
  } else if (key == "model.k") {
    p.knn.k = to_u64(key, value);
  } else if (key == "model.train_workers") {
    p.forest.workers = to_u64(key, value);
  } else {
    throw Error(Errc::usage, "unknown model key " + std::string(key));
  }
}

std::string describe_params(ModelKind kind, const ModelParams& p) {
  std::string out;
  auto kv = [&](const char* k, const std::string& v) { out += std::string(k) + "=" + v + "\n"; };
  switch (kind) {
    case ModelKind::nb: kv("model.sigma_floor", fmt_double(1e-9)); break;
    case ModelKind::dt:
      kv("model.max_depth", std::to_string(p.tree.max_depth));
      kv("model.min_leaf", std::to_string(p.tree.min_leaf));
      break;
    case ModelKind::rf:
      kv("model.trees", std::to_string(p.forest.n_trees));
      kv("model.max_depth", std::to_string(p.forest.max_depth));
      kv("model.min_leaf", std::to_string(p.forest.min_leaf));
      kv("model.mtry", p.forest.mtry == 0 ? "sqrt" : std::to_string(p.forest.mtry));
      kv("model.bootstrap", p.forest.bootstrap ? "true" : "false");
      kv("model.seed", std::to_string(p.forest.seed));
      break;
    case ModelKind::svm:
      kv("model.lambda", fmt_double(p.svm.lambda));
      kv("model.epochs", std::to_string(p.svm.epochs));
      kv("model.seed", std::to_string(p.svm.seed));
      break;
    case ModelKind::knn: kv("model.k", std::to_string(p.knn.k)); break;
  }
  return out;
}

ModelKind model_kind(const TrainedModel& model) noexcept {
  return static_cast<ModelKind>(model.index());
}

std::size_t model_dimension(const TrainedModel& model) noexcept {
  struct {
    std::size_t operator()(const NaiveBayesModel& m) const { return m.dimension; }
    std::size_t operator()(const DecisionTreeModel& m) const { return m.dimension; }
    std::size_t operator()(const RandomForestModel& m) const { return m.dimension; }
    std::size_t operator()(const LinearSvmModel& m) const { return m.weights.size(); }
    std::size_t operator()(const KnnModel& m) const { return m.points.cols(); }
  } visitor;
  return std::visit(visitor, model);
}

TrainedModel train_model(ModelKind kind, const Dataset& train, const ModelParams& params) {
  switch (kind) {
    case ModelKind::nb: return train_nb(train);
    case ModelKind::dt: return train_dt(train, params.tree);
    case ModelKind::rf: return train_rf(train, params.forest);
    case ModelKind::svm: return train_svm(train, params.svm);
    case ModelKind::knn: return train_knn(train, params.knn.k);
  }
  throw Error(Errc::usage, "unknown model kind");
}

std::map<std::string, TrainedModel> train_per_category(const Dataset& train,
                                                       std::span<const std::optional<std::string>> categories,
                                                       ModelKind kind, const ModelParams& params) {
  if (categories.size() != train.size()) throw Error(Errc::dimension_mismatch, "one category per training row needed");
  std::set<std::string> names;
  for (std::size_t i = 0; i < train.size(); ++i)
    if (train.y[i] && categories[i] && !categories[i]->empty()) names.insert(*categories[i]);
  std::map<std::string, TrainedModel> out;
  for (const auto& name : names) {
    Dataset one{train.x, {}};
    one.y.reserve(train.size());
    for (std::size_t i = 0; i < train.size(); ++i)
      one.y.push_back(train.y[i] && categories[i] && *categories[i] == name ? 1 : 0);
    out.emplace(name, train_model(kind, one, params));
  }
  return out;
}

// ---------------------------------------------------------------------------

std::uint8_t predict(const TrainedModel& model, SparseRow x) {
  switch (model.index()) {
    case 0: return predict_nb(std::get<NaiveBayesModel>(model), x);
    case 1: return predict_tree(std::get<DecisionTreeModel>(model), x);
    case 2: {
      const auto& forest = std::get<RandomForestModel>(model);
      std::size_t attack = 0;
      for (const auto& t : forest.trees) attack += predict_tree(t, x);
      return 2 * attack > forest.trees.size() ? 1 : 0;
    }
    case 3: return svm_score(std::get<LinearSvmModel>(model), x) > 0.0 ? 1 : 0;
    case 4: return predict_knn(std::get<KnnModel>(model), x);
  }
  return 0;
}

std::uint8_t predict(const TrainedModel& model, std::span<const double> x) {
  const auto dim = model_dimension(model);
  if (x.size() != dim)
    throw Error(Errc::dimension_mismatch,
                "vector has " + std::to_string(x.size()) + " entries, model expects " + std::to_string(dim));
  const DenseAsSparse sparse(x);
  return predict(model, sparse.row());
}

// ---------------------------------------------------------------------------

void Confusion::add(std::uint8_t truth, std::uint8_t predicted) noexcept {
  if (truth) {
    predicted ? ++tp : ++fn;
  } else {
    predicted ? ++fp : ++tn;
  }
}

Confusion& Confusion::operator+=(const Confusion& o) noexcept {
  tp += o.tp;
  tn += o.tn;
  fp += o.fp;
  fn += o.fn;
  return *this;
}

EvalMetrics metrics_from(const Confusion& c) {
  EvalMetrics m;
  m.confusion = c;
  const auto total = c.total();
  m.accuracy = total ? static_cast<double>(c.tp + c.tn) / static_cast<double>(total) : 0.0;
  m.false_alarm_rate = (c.fp + c.tn) ? static_cast<double>(c.fp) / static_cast<double>(c.fp + c.tn) : 0.0;
  return m;
}

EvalMetrics evaluate(const TrainedModel& model, const Dataset& test) {
  if (test.size() == 0) throw Error(Errc::usage, "empty test set");
  if (test.dimension() != model_dimension(model))
    throw Error(Errc::dimension_mismatch, "test vectors do not match the model dimension");
  Confusion c;
  const auto start = std::chrono::steady_clock::now();
  for (std::size_t i = 0; i < test.size(); ++i) c.add(test.y[i], predict(model, test.x.row(i)));
  const auto elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  auto m = metrics_from(c);
  m.detection_time_s = elapsed;
  return m;
}

std::string metrics_csv_header() {
  return "model,train_rows,test_rows,train_time_s,test_time_s,accuracy_pct,false_alarm_rate";
}

std::string metrics_csv_row(std::string_view model, std::size_t train_rows, std::size_t test_rows,
                            const EvalMetrics& m) {
  char buf[256];
  std::snprintf(buf, sizeof buf, "%.*s,%zu,%zu,%.6f,%.6f,%.4f,%.6f", static_cast<int>(model.size()), model.data(),
                train_rows, test_rows, m.train_time_s, m.detection_time_s, 100.0 * m.accuracy, m.false_alarm_rate);
  return buf;
}

// ---------------------------------------------------------------------------

namespace {

constexpr std::string_view kModelMagic = "SADM";
constexpr std::uint8_t kModelVersion = 1;

void write_tree(ByteWriter& w, const DecisionTreeModel& t) {
  w.u64(t.dimension);
  w.i32(t.params.max_depth);
  w.u64(t.params.min_leaf);
  w.u32(static_cast<std::uint32_t>(t.nodes.size()));
  for (const auto& n : t.nodes) {
    w.i32(n.feature);
    w.f64(n.threshold);
    w.i32(n.left);
    w.i32(n.right);
    w.u8(n.label);
    w.f64(n.counts[0]);
    w.f64(n.counts[1]);
  }
}

DecisionTreeModel read_tree(ByteReader& r) {
  DecisionTreeModel t;
  t.dimension = r.u64();
  t.params.max_depth = r.i32();
  t.params.min_leaf = r.u64();
  const auto n = r.u32();
  t.nodes.resize(n);
  for (auto& node : t.nodes) {
    node.feature = r.i32();
    node.threshold = r.f64();
    node.left = r.i32();
    node.right = r.i32();
    node.label = r.u8();
    node.counts[0] = r.f64();
    node.counts[1] = r.f64();
  }
  for (const auto& node : t.nodes) {
    if (node.is_leaf()) continue;
    if (node.left < 0 || node.right < 0 || static_cast<std::uint32_t>(node.left) >= n ||
        static_cast<std::uint32_t>(node.right) >= n || static_cast<std::size_t>(node.feature) >= t.dimension)
      throw Error(Errc::bad_format, "corrupt tree node");
  }
  if (t.nodes.empty()) throw Error(Errc::bad_format, "empty tree");
  return t;
}

void write_vec(ByteWriter& w, const std::vector<double>& v) {
  w.u64(v.size());
  for (const double x : v) w.f64(x);
}

std::vector<double> read_vec(ByteReader& r) {
  const auto n = r.u64();
  std::vector<double> v;
  v.reserve(static_cast<std::size_t>(std::min<std::uint64_t>(n, 1u << 24)));
  for (std::uint64_t i = 0; i < n; ++i) v.push_back(r.f64());
  return v;
}

}  // namespace

std::vector<char> serialize_model(const TrainedModel& model, std::string_view snapshot) {
  std::vector<std::pair<std::string, ByteWriter>> sections;
  ByteWriter kind;
  kind.u8(static_cast<std::uint8_t>(model_kind(model)));
  sections.emplace_back("KIND", std::move(kind));

  ByteWriter body;
  switch (model_kind(model)) {
    case ModelKind::nb: {
      const auto& m = std::get<NaiveBayesModel>(model);
      body.u64(m.dimension);
      body.u8(m.prior_only ? 1 : 0);
      for (int c = 0; c < 2; ++c) {
        body.f64(m.prior[c]);
        write_vec(body, m.mean[c]);
        write_vec(body, m.sigma[c]);
      }
      break;
    }
    case ModelKind::dt: write_tree(body, std::get<DecisionTreeModel>(model)); break;
    case ModelKind::rf: {
      const auto& m = std::get<RandomForestModel>(model);
      body.u64(m.dimension);
      body.u64(m.params.n_trees);
      body.i32(m.params.max_depth);
      body.u64(m.params.min_leaf);
      body.u64(m.params.mtry);
      body.u64(m.params.seed);
      body.u8(m.params.bootstrap ? 1 : 0);
      body.u32(static_cast<std::uint32_t>(m.trees.size()));
      for (std::size_t t = 0; t < m.trees.size(); ++t) {
        body.u64(m.tree_seeds[t]);
        write_tree(body, m.trees[t]);
      }
      break;
    }
    case ModelKind::svm: {
      const auto& m = std::get<LinearSvmModel>(model);
      body.f64(m.params.lambda);
      body.u64(m.params.epochs);
      body.u64(m.params.seed);
      body.f64(m.bias);
      write_vec(body, m.weights);
      write_vec(body, m.objective);
      break;
    }
    case ModelKind::knn: {
      const auto& m = std::get<KnnModel>(model);
      body.u64(m.k);
      body.u64(m.points.cols());
      body.u64(m.points.rows());
      for (std::size_t r = 0; r < m.points.rows(); ++r) {
        const auto row = m.points.row(r);
        body.u8(m.labels[r]);
        body.u32(static_cast<std::uint32_t>(row.nnz()));
        for (std::size_t k = 0; k < row.nnz(); ++k) {
          body.u32(row.index[k]);
          body.f64(row.value[k]);
        }
      }
      break;
    }
  }
  sections.emplace_back("BODY", std::move(body));
  if (!snapshot.empty()) {
    ByteWriter snap;
    snap.str(snapshot);
    sections.emplace_back("SNAP", std::move(snap));
  }
  return build_section_file(kModelMagic, kModelVersion, sections);
}

TrainedModel deserialize_model(std::string_view bytes, std::string* snapshot) {
  const auto file = parse_section_file(bytes, kModelMagic);
  if (file.version != kModelVersion)
    throw Error(Errc::bad_format, "unsupported model version " + std::to_string(file.version));
  ByteReader kind_reader(file.at("KIND"));
  const auto kind = kind_reader.u8();
  ByteReader r(file.at("BODY"));
  TrainedModel model;
  switch (static_cast<ModelKind>(kind)) {
    case ModelKind::nb: {
      NaiveBayesModel m;
      m.dimension = r.u64();
      m.prior_only = r.u8() != 0;
      for (int c = 0; c < 2; ++c) {
        m.prior[c] = r.f64();
        m.mean[c] = read_vec(r);
        m.sigma[c] = read_vec(r);
        if (m.mean[c].size() != m.dimension || m.sigma[c].size() != m.dimension)
          throw Error(Errc::bad_format, "naive Bayes parameter length mismatch");
      }
      prepare_nb(m);
      model = std::move(m);
      break;
    }
    case ModelKind::dt: model = read_tree(r); break;
    case ModelKind::rf: {
      RandomForestModel m;
      m.dimension = r.u64();
      m.params.n_trees = r.u64();
      m.params.max_depth = r.i32();
      m.params.min_leaf = r.u64();
      m.params.mtry = r.u64();
      m.params.seed = r.u64();
      m.params.bootstrap = r.u8() != 0;
      const auto n = r.u32();
      if (n == 0) throw Error(Errc::bad_format, "forest without trees");
      for (std::uint32_t t = 0; t < n; ++t) {
        m.tree_seeds.push_back(r.u64());
        m.trees.push_back(read_tree(r));
        if (m.trees.back().dimension != m.dimension) throw Error(Errc::bad_format, "tree dimension mismatch");
      }
      model = std::move(m);
      break;
    }
    case ModelKind::svm: {
      LinearSvmModel m;
      m.params.lambda = r.f64();
      m.params.epochs = r.u64();
      m.params.seed = r.u64();
      m.bias = r.f64();
      m.weights = read_vec(r);
      m.objective = read_vec(r);
      model = std::move(m);
      break;
    }
    case ModelKind::knn: {
      KnnModel m;
      m.k = r.u64();
      const auto cols = r.u64();
      const auto rows = r.u64();
      m.points = FeatureMatrix(cols);
      std::vector<std::uint32_t> idx;
      std::vector<double> val;
      for (std::uint64_t i = 0; i < rows; ++i) {
        m.labels.push_back(r.u8());
        const auto nnz = r.u32();
        idx.clear();
        val.clear();
        for (std::uint32_t k = 0; k < nnz; ++k) {
          idx.push_back(r.u32());
          val.push_back(r.f64());
        }
        m.points.add_row(idx, val);
      }
      if (m.k < 1 || m.k > rows) throw Error(Errc::bad_format, "knn k out of range");
      model = std::move(m);
      break;
    }
    default: throw Error(Errc::bad_format, "unknown model tag " + std::to_string(kind));
  }
  if (snapshot) {
    snapshot->clear();
    if (const auto it = file.sections.find("SNAP"); it != file.sections.end()) {
      ByteReader snap(it->second);
      *snapshot = snap.str();
    }
  }
  return model;
}

void save_model(const TrainedModel& model, const std::filesystem::path& path, std::string_view snapshot) {
  write_file_bytes(path, serialize_model(model, snapshot));
}

TrainedModel load_model(const std::filesystem::path& path, std::string* snapshot) {
  return deserialize_model(read_file_bytes(path), snapshot);
}

}  // namespace sadf
