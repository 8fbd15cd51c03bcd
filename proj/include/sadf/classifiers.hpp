#pragma once

// The five supervised detectors (Gaussian naive Bayes, CART decision tree,
// random forest, linear SVM, k-nearest neighbours), prediction dispatch,
// evaluation metrics and model persistence.
//
// Class 0 is normal traffic, class 1 is attack. Every tie resolves to 0.

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "sadf/feature_matrix.hpp"

namespace sadf {

enum class ModelKind : std::uint8_t { nb, dt, rf, svm, knn };

std::string_view model_name(ModelKind kind) noexcept;
std::optional<ModelKind> parse_model_kind(std::string_view name) noexcept;

struct TreeParams {
  int max_depth = 16;
  std::size_t min_leaf = 5;
};

struct ForestParams {
  std::size_t n_trees = 25;
  int max_depth = 16;
  std::size_t min_leaf = 5;
  std::size_t mtry = 0;  // 0 means ceil(sqrt(dimension))
  std::uint64_t seed = 0;
  bool bootstrap = true;
  std::size_t workers = 1;  // training threads; does not affect the result
};

struct SvmParams {
  double lambda = 1e-4;
  std::size_t epochs = 5;
  std::uint64_t seed = 0;
};

struct KnnParams {
  std::size_t k = 5;
};

struct ModelParams {
  TreeParams tree;
  ForestParams forest;
  SvmParams svm;
  KnnParams knn;
};

/// Applies one `model.*` key (model.max_depth, model.trees, model.lambda, ...).
void apply_model_setting(ModelParams& params, std::string_view key, std::string_view value);
/// key=value lines describing the hyperparameters a model kind uses.
std::string describe_params(ModelKind kind, const ModelParams& params);

// ---------------------------------------------------------------------------

struct NaiveBayesModel {
  std::array<double, 2> prior{0.5, 0.5};
  std::array<std::vector<double>, 2> mean;
  std::array<std::vector<double>, 2> sigma;
  bool prior_only = false;  // trained on a single class
  std::size_t dimension = 0;
  // Derived by prepare_nb: 1/sigma and sum of -log(sigma) - log(2 pi)/2.
  std::array<std::vector<double>, 2> inv_sigma;
  std::array<double, 2> log_norm{0.0, 0.0};
};

/// Fills the derived scoring terms. Models built by hand should call it.
void prepare_nb(NaiveBayesModel& model);

struct TreeNode {
  std::int32_t feature = -1;  // -1 marks a leaf
  double threshold = 0.0;     // go left when x[feature] <= threshold
  std::int32_t left = -1;
  std::int32_t right = -1;
  std::uint8_t label = 0;
  std::array<double, 2> counts{0.0, 0.0};

  bool is_leaf() const noexcept { return feature < 0; }
  bool operator==(const TreeNode&) const = default;
};

struct DecisionTreeModel {
  std::vector<TreeNode> nodes;  // nodes[0] is the root
  std::size_t dimension = 0;
  TreeParams params;
};

struct RandomForestModel {
  std::vector<DecisionTreeModel> trees;
  std::vector<std::uint64_t> tree_seeds;
  std::size_t dimension = 0;
  ForestParams params;
};

struct LinearSvmModel {
  std::vector<double> weights;
  double bias = 0.0;
  SvmParams params;
  std::vector<double> objective;  // regularized hinge objective after each epoch
};

struct KnnModel {
  FeatureMatrix points;
  std::vector<std::uint8_t> labels;
  std::size_t k = 1;
};

using TrainedModel = std::variant<NaiveBayesModel, DecisionTreeModel, RandomForestModel, LinearSvmModel, KnnModel>;

ModelKind model_kind(const TrainedModel& model) noexcept;
std::size_t model_dimension(const TrainedModel& model) noexcept;

// ---------------------------------------------------------------------------
// Training

NaiveBayesModel train_nb(const Dataset& train);
DecisionTreeModel train_dt(const Dataset& train, const TreeParams& params = {});
RandomForestModel train_rf(const Dataset& train, const ForestParams& params = {});
/// Throws Error(single_class_training) when only one class is present.
LinearSvmModel train_svm(const Dataset& train, const SvmParams& params = {});
KnnModel train_knn(const Dataset& train, std::size_t k);

TrainedModel train_model(ModelKind kind, const Dataset& train, const ModelParams& params);

/// One binary model per attack category present among attack rows: each is
/// trained with y = (category == c).
std::map<std::string, TrainedModel> train_per_category(const Dataset& train,
                                                       std::span<const std::optional<std::string>> categories,
                                                       ModelKind kind, const ModelParams& params);

/// Weighted Gini impurity helpers, exposed for tests.
double gini(double c0, double c1) noexcept;

// ---------------------------------------------------------------------------
// Prediction

std::uint8_t predict(const TrainedModel& model, SparseRow x);
/// Throws Error(dimension_mismatch) when x has the wrong length.
std::uint8_t predict(const TrainedModel& model, std::span<const double> x);

std::uint8_t predict_tree(const DecisionTreeModel& tree, SparseRow x) noexcept;
std::uint8_t predict_nb(const NaiveBayesModel& model, SparseRow x) noexcept;
/// Per-class log joint scores, log P(c) + sum log N(x_i; mean, sigma).
std::array<double, 2> nb_log_scores(const NaiveBayesModel& model, SparseRow x) noexcept;
/// Exp-normalized posterior.
std::array<double, 2> nb_posterior(const NaiveBayesModel& model, SparseRow x) noexcept;
double svm_score(const LinearSvmModel& model, SparseRow x) noexcept;
std::uint8_t predict_knn(const KnnModel& model, SparseRow x);

/// Squared Euclidean distance between two sparse rows, summed in index order.
double squared_distance(SparseRow a, SparseRow b) noexcept;

// ---------------------------------------------------------------------------
// Evaluation

struct Confusion {
  std::size_t tp = 0, tn = 0, fp = 0, fn = 0;

  std::size_t total() const noexcept { return tp + tn + fp + fn; }
  void add(std::uint8_t truth, std::uint8_t predicted) noexcept;
  Confusion& operator+=(const Confusion& o) noexcept;
  bool operator==(const Confusion&) const = default;
};

struct EvalMetrics {
  double accuracy = 0.0;
  Confusion confusion;
  double false_alarm_rate = 0.0;
  double detection_time_s = 0.0;
  double train_time_s = 0.0;
};

EvalMetrics metrics_from(const Confusion& confusion);
/// Test set must be non-empty (Error(usage) otherwise).
EvalMetrics evaluate(const TrainedModel& model, const Dataset& test);

/// "model,train_rows,test_rows,train_time_s,test_time_s,accuracy_pct,false_alarm_rate"
std::string metrics_csv_header();
std::string metrics_csv_row(std::string_view model, std::size_t train_rows, std::size_t test_rows,
                            const EvalMetrics& m);

// ---------------------------------------------------------------------------
// Persistence

std::vector<char> serialize_model(const TrainedModel& model, std::string_view snapshot = {});
TrainedModel deserialize_model(std::string_view bytes, std::string* snapshot = nullptr);
void save_model(const TrainedModel& model, const std::filesystem::path& path, std::string_view snapshot = {});
TrainedModel load_model(const std::filesystem::path& path, std::string* snapshot = nullptr);

}  // namespace sadf
