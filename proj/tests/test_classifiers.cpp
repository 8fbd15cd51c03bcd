#include <gtest/gtest.h>

#include <cmath>
#include <numeric>

#include "oracles.hpp"
#include "sadf/classifiers.hpp"
#include "sadf/random.hpp"
#include "support.hpp"

namespace sadf {
namespace {

using oracle::Points;
using test::make_dataset;

std::uint8_t predict_dense(const TrainedModel& m, const std::vector<double>& x) { return predict(m, std::span(x)); }

// Two Gaussian blobs in `dims` dimensions, class 1 shifted by `gap` on every axis.
std::pair<Points, std::vector<int>> blobs(std::size_t n, std::size_t dims, double gap, std::uint64_t seed) {
  Rng rng(seed);
  Points x;
  std::vector<int> y;
  for (std::size_t i = 0; i < n; ++i) {
    const int c = static_cast<int>(i % 2);
    std::vector<double> p(dims);
    for (auto& v : p) v = normal_draw(rng, c * gap, 1.0);
    x.push_back(p);
    y.push_back(c);
  }
  return {x, y};
}

Points random_points(std::size_t n, std::size_t dims, Rng& rng, int grid) {
  Points x(n, std::vector<double>(dims));
  for (auto& p : x)
    for (auto& v : p) v = static_cast<double>(uniform_index(rng, static_cast<std::uint64_t>(grid)));
  return x;
}

double train_accuracy(const TrainedModel& m, const Points& x, const std::vector<int>& y) {
  std::size_t ok = 0;
  for (std::size_t i = 0; i < x.size(); ++i) ok += predict_dense(m, x[i]) == y[i];
  return static_cast<double>(ok) / static_cast<double>(x.size());
}

// ---------------------------------------------------------------------------

TEST(NaiveBayes, ToyParameters) {
  const auto m = train_nb(make_dataset({{0}, {2}, {10}, {12}}, {0, 0, 1, 1}));
  EXPECT_DOUBLE_EQ(m.mean[0][0], 1.0);
  EXPECT_DOUBLE_EQ(m.mean[1][0], 11.0);
  EXPECT_DOUBLE_EQ(m.sigma[0][0], 1.0);
  EXPECT_DOUBLE_EQ(m.sigma[1][0], 1.0);
  EXPECT_DOUBLE_EQ(m.prior[0], 0.5);
  EXPECT_DOUBLE_EQ(m.prior[1], 0.5);
  EXPECT_EQ(predict_dense(m, {1.0}), 0);
  EXPECT_EQ(predict_dense(m, {11.0}), 1);
}

TEST(NaiveBayes, MatchesHandBayes) {
  Rng rng(21);
  for (int trial = 0; trial < 20; ++trial) {
    const auto x = random_points(12, 3, rng, 7);
    std::vector<int> y(12);
    for (std::size_t i = 0; i < y.size(); ++i) y[i] = static_cast<int>(uniform_index(rng, 2));
    y[0] = 0;
    y[1] = 1;
    const auto m = train_nb(make_dataset(x, y));
    for (const auto& q : random_points(10, 3, rng, 7)) EXPECT_EQ(predict_dense(m, q), oracle::naive_bayes(x, y, q));
  }
}

TEST(NaiveBayes, PosteriorSumsToOne) {
  const auto [x, y] = blobs(200, 4, 1.5, 3);
  const auto m = train_nb(make_dataset(x, y));
  for (const auto& p : x) {
    const DenseAsSparse row(p);
    const auto post = nb_posterior(m, row.row());
    EXPECT_NEAR(post[0] + post[1], 1.0, 1e-9);
  }
}

TEST(NaiveBayes, SingleClassIsPriorOnly) {
  const auto m = train_nb(make_dataset({{1, 2}, {3, 4}, {5, 6}}, {1, 1, 1}));
  EXPECT_TRUE(m.prior_only);
  EXPECT_EQ(predict_dense(m, {0, 0}), 1);
  EXPECT_EQ(predict_dense(m, {100, -100}), 1);
}

// ---------------------------------------------------------------------------

TEST(Tree, GiniHalf) {
  EXPECT_DOUBLE_EQ(gini(5, 5), 0.5);
  EXPECT_DOUBLE_EQ(gini(4, 0), 0.0);
}

TEST(Tree, PureInputIsSingleLeaf) {
  const auto m = train_dt(make_dataset({{1}, {2}, {3}}, {1, 1, 1}));
  ASSERT_EQ(m.nodes.size(), 1u);
  EXPECT_TRUE(m.nodes[0].is_leaf());
  EXPECT_EQ(predict_dense(m, {-50}), 1);
}

TEST(Tree, XorDepthTwo) {
  const Points x = {{0, 0}, {0, 1}, {1, 0}, {1, 1}};
  const std::vector<int> y = {0, 1, 1, 0};
  ASSERT_TRUE(oracle::depth2_tree_exists(x, y, {0.5}));
  const auto m = train_dt(make_dataset(x, y), {.max_depth = 2, .min_leaf = 1});
  EXPECT_EQ(train_accuracy(m, x, y), 1.0);
}

TEST(Tree, RootSplitIsExhaustiveOptimum) {
  Rng rng(5);
  for (int trial = 0; trial < 25; ++trial) {
    const auto x = random_points(20, 3, rng, 6);
    std::vector<int> y(20);
    for (auto& v : y) v = static_cast<int>(uniform_index(rng, 2));
    y[0] = 0;
    y[1] = 1;
    const auto best = oracle::best_split(x, y, 1);
    const auto m = train_dt(make_dataset(x, y), {.max_depth = 1, .min_leaf = 1});
    if (!best) {
      EXPECT_TRUE(m.nodes[0].is_leaf());
      continue;
    }
    const auto& root = m.nodes[0];
    ASSERT_FALSE(root.is_leaf());
    EXPECT_NEAR(oracle::split_gini(x, y, static_cast<std::size_t>(root.feature), root.threshold),
                best->weighted_gini, 1e-12);
  }
}

TEST(Tree, ThresholdsAreMidpoints) {
  const auto m = train_dt(make_dataset({{1}, {3}, {7}, {9}}, {0, 0, 1, 1}), {.max_depth = 4, .min_leaf = 1});
  ASSERT_FALSE(m.nodes[0].is_leaf());
  EXPECT_DOUBLE_EQ(m.nodes[0].threshold, 5.0);
}

TEST(Tree, RespectsMinLeaf) {
  const auto [x, y] = blobs(300, 3, 1.0, 8);
  const auto m = train_dt(make_dataset(x, y), {.max_depth = 16, .min_leaf = 10});
  for (const auto& node : m.nodes)
    if (node.is_leaf()) {
      EXPECT_GE(node.counts[0] + node.counts[1], 10.0);
    }
}

// Walks the node array by hand.
std::uint8_t traverse(const DecisionTreeModel& m, const std::vector<double>& x) {
  std::int32_t i = 0;
  while (!m.nodes[i].is_leaf()) i = x[m.nodes[i].feature] <= m.nodes[i].threshold ? m.nodes[i].left : m.nodes[i].right;
  return m.nodes[i].label;
}

TEST(Tree, PredictEqualsManualTraversal) {
  Rng rng(31);
  for (int trial = 0; trial < 10; ++trial) {
    const auto x = random_points(150, 4, rng, 9);
    std::vector<int> y(x.size());
    for (std::size_t i = 0; i < y.size(); ++i) y[i] = (x[i][0] + x[i][1] * uniform_unit(rng) > 6) ? 1 : 0;
    const auto m = train_dt(make_dataset(x, y), {.max_depth = 6, .min_leaf = 2});
    for (const auto& q : random_points(100, 4, rng, 9)) EXPECT_EQ(predict_dense(m, q), traverse(m, q));
  }
}

// ---------------------------------------------------------------------------

TEST(Forest, SingleTreeWithoutBootstrapEqualsTree) {
  Rng rng(17);
  for (int trial = 0; trial < 5; ++trial) {
    const auto [x, y] = blobs(200, 5, 1.0, 100 + trial);
    const auto data = make_dataset(x, y);
    const auto dt = train_dt(data, {.max_depth = 8, .min_leaf = 3});
    const auto rf = train_rf(data, {.n_trees = 1, .max_depth = 8, .min_leaf = 3, .mtry = 5, .seed = 4, .bootstrap = false});
    for (const auto& q : random_points(200, 5, rng, 5)) EXPECT_EQ(predict_dense(rf, q), predict_dense(dt, q));
    EXPECT_EQ(rf.trees[0].nodes, dt.nodes);
  }
}

TEST(Forest, DeterministicAndWorkerInvariant) {
  const auto [x, y] = blobs(400, 6, 0.8, 2);
  const auto data = make_dataset(x, y);
  const ForestParams p{.n_trees = 9, .max_depth = 10, .min_leaf = 2, .seed = 12};
  auto p4 = p;
  p4.workers = 4;
  const auto a = train_rf(data, p);
  const auto b = train_rf(data, p);
  const auto c = train_rf(data, p4);
  EXPECT_EQ(serialize_model(a), serialize_model(b));
  EXPECT_EQ(serialize_model(a), serialize_model(c));
  for (std::size_t t = 0; t < a.trees.size(); ++t) EXPECT_EQ(a.tree_seeds[t], 12 + t);
}

TEST(Forest, MtryRange) {
  const auto data = make_dataset({{1, 2}, {2, 1}, {3, 3}}, {0, 1, 0});
  EXPECT_ERRC(train_rf(data, {.mtry = 3}), Errc::usage);
  EXPECT_ERRC(train_rf(data, {.n_trees = 0}), Errc::usage);
  EXPECT_EQ(train_rf(data, {.n_trees = 2}).params.mtry, 2u);  // ceil(sqrt(2))
}

TEST(Forest, BlobAccuracyAtLeastTree) {
  const auto [x, y] = blobs(200, 4, 1.0, 40);
  const auto [tx, ty] = blobs(2000, 4, 1.0, 41);
  const auto data = make_dataset(x, y);
  const auto test = make_dataset(tx, ty);
  const auto dt = evaluate(train_dt(data), test).accuracy;
  const auto rf = evaluate(train_rf(data, {.n_trees = 25, .seed = 7}), test).accuracy;
  EXPECT_GE(rf, dt - 0.02) << "dt " << dt << " rf " << rf;
}

TEST(Forest, VoteTieGoesToNormal) {
  DecisionTreeModel zero, one;
  zero.nodes = {TreeNode{.label = 0}};
  one.nodes = {TreeNode{.label = 1}};
  zero.dimension = one.dimension = 1;
  RandomForestModel rf;
  rf.trees = {zero, one};
  rf.tree_seeds = {0, 1};
  rf.dimension = 1;
  EXPECT_EQ(predict_dense(rf, {0.0}), 0);
}

// ---------------------------------------------------------------------------

// 10 points per class; x0 + x1 <= 6 for class 0 and >= 11 for class 1, so
// w = (0.4, 0.4), b = -3.4 has margin at least 1.
std::pair<Points, std::vector<int>> separable() {
  Points x;
  std::vector<int> y;
  for (int i = 0; i < 10; ++i) {
    x.push_back({static_cast<double>(i % 4), static_cast<double>(i % 3) + 1});
    y.push_back(0);
    x.push_back({static_cast<double>(i % 4) + 6, static_cast<double>(i % 3) + 5});
    y.push_back(1);
  }
  return {x, y};
}

TEST(Svm, SeparableToyReachesFullAccuracy) {
  const auto [x, y] = separable();
  ASSERT_GE(oracle::min_margin(x, y, {0.4, 0.4}, -3.4), 1.0);
  const auto m = train_svm(make_dataset(x, y), {.lambda = 0.1, .epochs = 200, .seed = 3});
  EXPECT_EQ(train_accuracy(m, x, y), 1.0);
  EXPECT_GT(oracle::min_margin(x, y, m.weights, m.bias), 0.0);
}

TEST(Svm, ObjectiveNonIncreasingWithinJitter) {
  const auto [x, y] = separable();
  const auto m = train_svm(make_dataset(x, y), {.lambda = 0.1, .epochs = 30, .seed = 3});
  ASSERT_EQ(m.objective.size(), 30u);
  for (std::size_t e = 1; e < m.objective.size(); ++e)
    EXPECT_LE(m.objective[e], m.objective[e - 1] * 1.05 + 1e-12) << "epoch " << e;
}

TEST(Svm, ZeroEpochPredictsNormal) {
  const auto [x, y] = separable();
  const auto m = train_svm(make_dataset(x, y), {.epochs = 0});
  EXPECT_EQ(m.weights, std::vector<double>(2, 0.0));
  EXPECT_EQ(m.bias, 0.0);
  for (const auto& p : x) EXPECT_EQ(predict_dense(m, p), 0);
}

TEST(Svm, SingleClassRejected) {
  EXPECT_ERRC(train_svm(make_dataset({{1}, {2}}, {0, 0})), Errc::single_class_training);
}

TEST(Svm, SignRuleAndScaleInvariance) {
  LinearSvmModel m;
  m.weights = {1, 0};
  m.bias = -0.5;
  EXPECT_EQ(predict_dense(m, {1, 0}), 1);
  EXPECT_EQ(predict_dense(m, {0, 0}), 0);
  EXPECT_EQ(predict_dense(m, {0.5, 3}), 0);  // score exactly 0
  Rng rng(2);
  const auto pts = random_points(50, 2, rng, 5);
  auto scaled = m;
  for (auto& w : scaled.weights) w *= 3.7;
  scaled.bias *= 3.7;
  for (const auto& p : pts) EXPECT_EQ(predict_dense(m, p), predict_dense(scaled, p));
}

// ---------------------------------------------------------------------------

TEST(Knn, MatchesBruteForce) {
  Rng rng(9);
  for (int trial = 0; trial < 30; ++trial) {
    const auto x = random_points(20, 2, rng, 5);  // small grid forces distance ties
    std::vector<int> y(x.size());
    for (auto& v : y) v = static_cast<int>(uniform_index(rng, 2));
    for (const std::size_t k : {1u, 2u, 3u, 4u, 7u}) {
      const auto m = train_knn(make_dataset(x, y), k);
      for (const auto& q : random_points(10, 2, rng, 5)) EXPECT_EQ(predict_dense(m, q), oracle::knn(x, y, q, k));
    }
  }
}

TEST(Knn, HandPlacedVote) {
  const Points x = {{0, 0}, {1, 0}, {0, 1}, {5, 5}, {6, 5}};
  const std::vector<int> y = {1, 0, 1, 0, 0};
  const auto m = train_knn(make_dataset(x, y), 3);
  EXPECT_EQ(predict_dense(m, {0.2, 0.2}), 1);  // nearest three: 1, 0, 1
  EXPECT_EQ(predict_dense(m, {5, 4}), 0);
}

TEST(Knn, KOneRecallsTrainingPoints) {
  Rng rng(4);
  Points x;
  std::vector<int> y;
  for (int i = 0; i < 40; ++i) {
    x.push_back({static_cast<double>(i), static_cast<double>(i * i % 7)});
    y.push_back(static_cast<int>(uniform_index(rng, 2)));
  }
  const auto m = train_knn(make_dataset(x, y), 1);
  EXPECT_EQ(train_accuracy(m, x, y), 1.0);
}

TEST(Knn, KEqualsSizeIsGlobalMajority) {
  const Points x = {{0}, {1}, {2}, {3}, {4}};
  const auto m = train_knn(make_dataset(x, {1, 1, 1, 0, 0}), 5);
  for (const double q : {-10.0, 0.0, 4.0, 100.0}) EXPECT_EQ(predict_dense(m, {q}), 1);
  const auto tied = train_knn(make_dataset({{0}, {1}, {2}, {3}}, {1, 1, 0, 0}), 4);
  EXPECT_EQ(predict_dense(tied, {0.0}), 0);
}

TEST(Knn, KOutOfRange) {
  const auto data = make_dataset({{0}, {1}}, {0, 1});
  EXPECT_ERRC(train_knn(data, 0), Errc::usage);
  EXPECT_ERRC(train_knn(data, 3), Errc::usage);
}

// ---------------------------------------------------------------------------

TEST(Predict, DimensionMismatch) {
  const TrainedModel m = train_dt(make_dataset({{0, 1}, {1, 0}}, {0, 1}));
  const std::vector<double> wrong = {1, 2, 3};
  EXPECT_ERRC(predict(m, std::span(wrong)), Errc::dimension_mismatch);
}

TEST(Predict, SingleLeafAttackTree) {
  DecisionTreeModel m;
  m.nodes = {TreeNode{.label = 1}};
  m.dimension = 3;
  EXPECT_EQ(predict_dense(m, {9, 9, 9}), 1);
}

// ---------------------------------------------------------------------------

TEST(Evaluate, ConstantNormalOnSeventyThirty) {
  DecisionTreeModel zero;
  zero.nodes = {TreeNode{.label = 0}};
  zero.dimension = 1;
  std::vector<std::vector<double>> rows(10, {0.0});
  const auto m = evaluate(zero, make_dataset(rows, {0, 0, 0, 0, 0, 0, 0, 1, 1, 1}));
  EXPECT_DOUBLE_EQ(m.accuracy, 0.7);
  EXPECT_EQ(m.false_alarm_rate, 0.0);
  EXPECT_EQ(m.confusion, (Confusion{.tp = 0, .tn = 7, .fp = 0, .fn = 3}));
}

TEST(Evaluate, AllCorrect) {
  const auto data = make_dataset({{0}, {10}, {1}, {11}}, {0, 1, 0, 1});
  const auto m = evaluate(train_dt(data, {.max_depth = 3, .min_leaf = 1}), data);
  EXPECT_EQ(m.accuracy, 1.0);
  EXPECT_EQ(m.confusion.fp, 0u);
  EXPECT_EQ(m.confusion.fn, 0u);
}

TEST(Evaluate, ConfusionSumsToTestSize) {
  const auto [x, y] = blobs(300, 3, 0.7, 15);
  const auto data = make_dataset(x, y);
  for (const auto kind : {ModelKind::nb, ModelKind::dt, ModelKind::rf, ModelKind::svm, ModelKind::knn}) {
    const auto m = evaluate(train_model(kind, data, {}), data);
    EXPECT_EQ(m.confusion.total(), data.size());
    EXPECT_DOUBLE_EQ(m.accuracy, static_cast<double>(m.confusion.tp + m.confusion.tn) / data.size());
  }
}

TEST(Evaluate, EmptyTestRejected) {
  const TrainedModel m = train_dt(make_dataset({{0}, {1}}, {0, 1}));
  EXPECT_ERRC(evaluate(m, Dataset{FeatureMatrix(1), {}}), Errc::usage);
}

TEST(Evaluate, MetricsRow) {
  EXPECT_EQ(metrics_csv_header(), "model,train_rows,test_rows,train_time_s,test_time_s,accuracy_pct,false_alarm_rate");
  EvalMetrics m = metrics_from(Confusion{.tp = 1, .tn = 2, .fp = 1, .fn = 0});
  EXPECT_DOUBLE_EQ(m.accuracy, 0.75);
  EXPECT_DOUBLE_EQ(m.false_alarm_rate, 1.0 / 3.0);
  EXPECT_EQ(metrics_csv_row("dt", 10, 4, m).substr(0, 8), "dt,10,4,");
}

// ---------------------------------------------------------------------------

TEST(Persist, RoundTripEveryKind) {
  test::TempDir dir;
  const auto [x, y] = blobs(120, 3, 1.2, 19);
  const auto data = make_dataset(x, y);
  Rng rng(1);
  const auto queries = random_points(60, 3, rng, 4);
  for (const auto kind : {ModelKind::nb, ModelKind::dt, ModelKind::rf, ModelKind::svm, ModelKind::knn}) {
    const auto model = train_model(kind, data, {});
    const auto path = dir / (std::string(model_name(kind)) + ".bin");
    save_model(model, path, "model=" + std::string(model_name(kind)));
    std::string snap;
    const auto back = load_model(path, &snap);
    EXPECT_EQ(model_kind(back), kind);
    EXPECT_EQ(snap, "model=" + std::string(model_name(kind)));
    EXPECT_EQ(serialize_model(back), serialize_model(model));
    for (const auto& q : queries) EXPECT_EQ(predict_dense(back, q), predict_dense(model, q));
  }
}

TEST(Persist, SameSeedSameBytes) {
  const auto [x, y] = blobs(150, 3, 1.0, 23);
  const auto data = make_dataset(x, y);
  ModelParams p;
  p.forest.seed = p.svm.seed = 99;
  for (const auto kind : {ModelKind::nb, ModelKind::dt, ModelKind::rf, ModelKind::svm, ModelKind::knn})
    EXPECT_EQ(serialize_model(train_model(kind, data, p)), serialize_model(train_model(kind, data, p)));
}

TEST(Persist, RejectsGarbage) {
  EXPECT_ERRC(deserialize_model("definitely not a model"), Errc::bad_format);
}

TEST(Settings, ModelKeys) {
  ModelParams p;
  apply_model_setting(p, "model.trees", "7");
  apply_model_setting(p, "model.k", "3");
  apply_model_setting(p, "model.lambda", "0.5");
  EXPECT_EQ(p.forest.n_trees, 7u);
  EXPECT_EQ(p.knn.k, 3u);
  EXPECT_EQ(p.svm.lambda, 0.5);
  EXPECT_ERRC(apply_model_setting(p, "model.bogus", "1"), Errc::usage);
  EXPECT_ERRC(apply_model_setting(p, "model.trees", "many"), Errc::usage);
}

TEST(PerCategory, OneModelPerAttackType) {
  const auto [x, y] = blobs(90, 2, 2.0, 5);
  const auto data = make_dataset(x, y);
  std::vector<std::optional<std::string>> cats(x.size());
  for (std::size_t i = 0; i < x.size(); ++i)
    if (y[i]) cats[i] = (i % 4 == 1) ? "DoS" : "Exploits";
  const auto models = train_per_category(data, cats, ModelKind::dt, {});
  ASSERT_EQ(models.size(), 2u);
  EXPECT_TRUE(models.contains("DoS"));
  EXPECT_TRUE(models.contains("Exploits"));
}

}  // namespace
}  // namespace sadf
