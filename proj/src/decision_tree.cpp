// CART with Gini impurity, grown level by level.
//
// Each feature column is sorted once. A level scans every column a single
// time and feeds each entry to the accumulator of the node its row currently
// sits in, so the cost of a level is O(nnz) regardless of how many nodes are
// open. Rows absent from a column hold an implicit 0, which is injected as one
// block between the negative and positive entries.

#include <algorithm>
#include <cmath>
#include <numeric>

#include "sadf/classifiers.hpp"
#include "sadf/error.hpp"
#include "sadf/random.hpp"
#include "sadf/worker_pool.hpp"

namespace sadf {

double gini(double c0, double c1) noexcept {
  const double n = c0 + c1;
  if (n <= 0.0) return 0.0;
  const double p0 = c0 / n;
  const double p1 = c1 / n;
  return 1.0 - (p0 * p0 + p1 * p1);
}

namespace {

struct ColumnIndex {
  std::vector<std::size_t> start;           // dim + 1 offsets
  std::vector<std::size_t> first_positive;  // absolute offset of first value > 0
  std::vector<double> value;
  std::vector<std::uint32_t> row;
};

ColumnIndex build_columns(const FeatureMatrix& x) {
  const auto dim = x.cols();
  ColumnIndex cols;
  cols.start.assign(dim + 1, 0);
  for (std::size_t r = 0; r < x.rows(); ++r)
    for (const auto f : x.row(r).index) ++cols.start[f + 1];
  std::partial_sum(cols.start.begin(), cols.start.end(), cols.start.begin());
  cols.value.resize(x.nnz());
  cols.row.resize(x.nnz());
  std::vector<std::size_t> fill(cols.start.begin(), cols.start.end() - 1);
  for (std::size_t r = 0; r < x.rows(); ++r) {
    const auto row = x.row(r);
    for (std::size_t k = 0; k < row.nnz(); ++k) {
      const auto pos = fill[row.index[k]]++;
      cols.value[pos] = row.value[k];
      cols.row[pos] = static_cast<std::uint32_t>(r);
    }
  }
  cols.first_positive.resize(dim);
  std::vector<std::pair<double, std::uint32_t>> scratch;
  for (std::size_t f = 0; f < dim; ++f) {
    const auto b = cols.start[f];
    const auto e = cols.start[f + 1];
    scratch.clear();
    for (auto i = b; i < e; ++i) scratch.emplace_back(cols.value[i], cols.row[i]);
    std::sort(scratch.begin(), scratch.end());
    for (auto i = b; i < e; ++i) {
      cols.value[i] = scratch[i - b].first;
      cols.row[i] = scratch[i - b].second;
    }
    auto pos = b;
    while (pos < e && cols.value[pos] < 0.0) ++pos;
    cols.first_positive[f] = pos;
  }
  return cols;
}

std::vector<std::uint32_t> sample_features(std::size_t dim, std::size_t mtry, Rng& rng) {
  // Floyd's algorithm: mtry distinct indices from [0, dim).
  std::vector<std::uint32_t> chosen;
  chosen.reserve(mtry);
  for (std::size_t j = dim - mtry; j < dim; ++j) {
    const auto t = static_cast<std::uint32_t>(uniform_index(rng, j + 1));
    if (std::find(chosen.begin(), chosen.end(), t) == chosen.end())
      chosen.push_back(t);
    else
      chosen.push_back(static_cast<std::uint32_t>(j));
  }
  std::sort(chosen.begin(), chosen.end());
  return chosen;
}

double midpoint(double lo, double hi) noexcept {
  const double mid = lo + (hi - lo) / 2.0;
  return mid < hi ? mid : lo;
}

class TreeGrower {
 public:
  TreeGrower(const Dataset& data, const ColumnIndex& cols, std::span<const std::uint32_t> weight, int max_depth,
             std::size_t min_leaf, std::size_t mtry, Rng* rng)
      : data_(data), cols_(cols), weight_(weight), max_depth_(max_depth),
        min_leaf_(static_cast<double>(std::max<std::size_t>(min_leaf, 1))), mtry_(mtry), rng_(rng) {}

  DecisionTreeModel grow() {
    const auto n = data_.size();
    const auto dim = data_.dimension();
    row_node_.assign(n, -1);
    TreeNode root;
    for (std::size_t r = 0; r < n; ++r) {
      if (weight_[r] == 0) continue;
      row_node_[r] = 0;
      root.counts[data_.y[r]] += weight_[r];
    }
    root.label = root.counts[1] > root.counts[0] ? 1 : 0;
    nodes_.push_back(root);

    std::vector<std::int32_t> frontier;
    if (splittable(0, 0)) frontier.push_back(0);
    int depth = 0;
    std::vector<std::vector<std::uint32_t>> by_feature(full_scan() ? 0 : dim);

    while (!frontier.empty()) {
      open_.assign(frontier.size(), Open{});
      slot_of_node_.assign(nodes_.size(), -1);
      for (std::size_t s = 0; s < frontier.size(); ++s) {
        open_[s].node = frontier[s];
        slot_of_node_[static_cast<std::size_t>(frontier[s])] = static_cast<std::int32_t>(s);
      }
      if (!full_scan()) {
        for (auto& list : by_feature) list.clear();
        for (std::size_t s = 0; s < frontier.size(); ++s)
          for (const auto f : sample_features(dim, mtry_, *rng_)) by_feature[f].push_back(static_cast<std::uint32_t>(s));
      }
      node_slot_.assign(n, -1);
      for (std::size_t r = 0; r < n; ++r)
        if (row_node_[r] >= 0) node_slot_[r] = slot_of_node_[static_cast<std::size_t>(row_node_[r])];

      stamp_.assign(open_.size(), 0);
      for (std::size_t f = 0; f < dim; ++f) {
        interested_.clear();
        if (full_scan()) {
          interested_.resize(open_.size());
          std::iota(interested_.begin(), interested_.end(), 0U);
        } else {
          interested_ = by_feature[f];
        }
        if (!interested_.empty()) scan_feature(f);
      }

      std::vector<std::int32_t> next;
      for (auto& o : open_) {
        if (o.best_feature < 0) continue;
        const auto parent_id = static_cast<std::size_t>(o.node);
        const double n0 = nodes_[parent_id].counts[0], n1 = nodes_[parent_id].counts[1];
        TreeNode left, right;
        left.counts = {o.best_l0, o.best_l1};
        right.counts = {n0 - o.best_l0, n1 - o.best_l1};
        left.label = left.counts[1] > left.counts[0] ? 1 : 0;
        right.label = right.counts[1] > right.counts[0] ? 1 : 0;
        const auto left_id = static_cast<std::int32_t>(nodes_.size());
        nodes_[parent_id].feature = o.best_feature;
        nodes_[parent_id].threshold = o.best_threshold;
        nodes_[parent_id].left = left_id;
        nodes_[parent_id].right = left_id + 1;
        nodes_.push_back(left);
        nodes_.push_back(right);
        if (splittable(left_id, depth + 1)) next.push_back(left_id);
        if (splittable(left_id + 1, depth + 1)) next.push_back(left_id + 1);
      }
      for (std::size_t r = 0; r < n; ++r) {
        const auto slot = node_slot_[r];
        if (slot < 0) continue;
        const auto& parent = nodes_[static_cast<std::size_t>(open_[static_cast<std::size_t>(slot)].node)];
        if (parent.is_leaf()) {
          row_node_[r] = -1;
          continue;
        }
        const double v = data_.x.row(r).at(static_cast<std::uint32_t>(parent.feature));
        row_node_[r] = v <= parent.threshold ? parent.left : parent.right;
      }
      frontier = std::move(next);
      ++depth;
    }

    DecisionTreeModel model;
    model.nodes = std::move(nodes_);
    model.dimension = dim;
    return model;
  }

 private:
  struct Open {
    std::int32_t node = -1;
    double l0 = 0, l1 = 0, nz0 = 0, nz1 = 0, prev = 0;
    bool has_prev = false;
    double best_score = -1.0;
    std::int32_t best_feature = -1;
    double best_threshold = 0.0;
    double best_l0 = 0, best_l1 = 0;
  };

  bool full_scan() const noexcept { return mtry_ >= data_.dimension(); }

  bool splittable(std::int32_t node, int depth) const {
    const auto& c = nodes_[static_cast<std::size_t>(node)].counts;
    if (depth >= max_depth_) return false;
    if (c[0] == 0.0 || c[1] == 0.0) return false;
    return c[0] + c[1] >= 2.0 * min_leaf_;
  }

  void consider(Open& o, std::size_t feature, double threshold) {
    const auto& c = nodes_[static_cast<std::size_t>(o.node)].counts;
    const double left = o.l0 + o.l1;
    const double right = c[0] + c[1] - left;
    if (left < min_leaf_ || right < min_leaf_) return;
    const double r0 = c[0] - o.l0;
    const double r1 = c[1] - o.l1;
    // Maximizing this minimizes the weighted Gini impurity of the children.
    const double score = (o.l0 * o.l0 + o.l1 * o.l1) / left + (r0 * r0 + r1 * r1) / right;
    if (score > o.best_score) {
      o.best_score = score;
      o.best_feature = static_cast<std::int32_t>(feature);
      o.best_threshold = threshold;
      o.best_l0 = o.l0;
      o.best_l1 = o.l1;
    }
  }

  void push(Open& o, std::size_t feature, double v, double w0, double w1) {
    if (o.has_prev && v > o.prev) consider(o, feature, midpoint(o.prev, v));
    o.l0 += w0;
    o.l1 += w1;
    o.prev = v;
    o.has_prev = true;
  }

  void scan_feature(std::size_t f) {
    const auto mark = static_cast<std::uint32_t>(f + 1);
    for (const auto s : interested_) {
      auto& o = open_[s];
      o.l0 = o.l1 = o.nz0 = o.nz1 = 0.0;
      o.has_prev = false;
      stamp_[s] = mark;
    }
    const auto b = cols_.start[f];
    const auto e = cols_.start[f + 1];
    for (auto i = b; i < e; ++i) {
      const auto r = cols_.row[i];
      const auto slot = node_slot_[r];
      if (slot < 0 || stamp_[static_cast<std::size_t>(slot)] != mark) continue;
      auto& o = open_[static_cast<std::size_t>(slot)];
      (data_.y[r] ? o.nz1 : o.nz0) += weight_[r];
    }
    const auto zeros_at = cols_.first_positive[f];
    auto inject_zeros = [&] {
      for (const auto s : interested_) {
        auto& o = open_[s];
        const auto& c = nodes_[static_cast<std::size_t>(o.node)].counts;
        const double z0 = c[0] - o.nz0;
        const double z1 = c[1] - o.nz1;
        if (z0 + z1 > 0.0) push(o, f, 0.0, z0, z1);
      }
    };
    for (auto i = b; i < e; ++i) {
      if (i == zeros_at) inject_zeros();
      const auto r = cols_.row[i];
      const auto slot = node_slot_[r];
      if (slot < 0 || stamp_[static_cast<std::size_t>(slot)] != mark) continue;
      const double w = weight_[r];
      push(open_[static_cast<std::size_t>(slot)], f, cols_.value[i], data_.y[r] ? 0.0 : w, data_.y[r] ? w : 0.0);
    }
    if (zeros_at == e) inject_zeros();
  }

  const Dataset& data_;
  const ColumnIndex& cols_;
  std::span<const std::uint32_t> weight_;
  int max_depth_;
  double min_leaf_;
  std::size_t mtry_;
  Rng* rng_;

  std::vector<TreeNode> nodes_;
  std::vector<std::int32_t> row_node_;
  std::vector<std::int32_t> node_slot_;
  std::vector<std::int32_t> slot_of_node_;
  std::vector<Open> open_;
  std::vector<std::uint32_t> stamp_;
  std::vector<std::uint32_t> interested_;
};

void check_rows(const Dataset& train) {
  if (train.size() == 0) throw Error(Errc::empty_training, "no training vectors");
  if (train.x.rows() != train.y.size()) throw Error(Errc::dimension_mismatch, "label count differs from row count");
}

}  // namespace

DecisionTreeModel train_dt(const Dataset& train, const TreeParams& params) {
  check_rows(train);
  const auto cols = build_columns(train.x);
  const std::vector<std::uint32_t> weight(train.size(), 1);
  TreeGrower grower(train, cols, weight, params.max_depth, params.min_leaf, train.dimension(), nullptr);
  auto model = grower.grow();
  model.params = params;
  return model;
}

RandomForestModel train_rf(const Dataset& train, const ForestParams& params) {
  check_rows(train);
  const auto dim = train.dimension();
  if (params.n_trees == 0) throw Error(Errc::usage, "forest needs at least one tree");
  const std::size_t mtry =
      params.mtry == 0 ? static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(dim)))) : params.mtry;
  if (dim > 0 && (mtry < 1 || mtry > dim))
    throw Error(Errc::usage, "mtry must be in [1, " + std::to_string(dim) + "]");

  const auto cols = build_columns(train.x);
  RandomForestModel forest;
  forest.dimension = dim;
  forest.params = params;
  forest.params.mtry = mtry;
  forest.trees.resize(params.n_trees);
  forest.tree_seeds.resize(params.n_trees);

  auto grow_one = [&](std::size_t t) {
    const std::uint64_t seed = params.seed + t;
    forest.tree_seeds[t] = seed;
    Rng rng(seed);
    const auto n = train.size();
    std::vector<std::uint32_t> weight(n, params.bootstrap ? 0 : 1);
    if (params.bootstrap)
      for (std::size_t i = 0; i < n; ++i) ++weight[uniform_index(rng, n)];
    TreeGrower grower(train, cols, weight, params.max_depth, params.min_leaf, mtry, &rng);
    forest.trees[t] = grower.grow();
    forest.trees[t].params = TreeParams{params.max_depth, params.min_leaf};
  };

  if (params.workers <= 1) {
    for (std::size_t t = 0; t < params.n_trees; ++t) grow_one(t);
  } else {
    WorkerPool pool(params.workers);
    pool.parallel_for(params.n_trees, [&](std::size_t b, std::size_t e) {
      for (auto t = b; t < e; ++t) grow_one(t);
    });
  }
  return forest;
}

std::uint8_t predict_tree(const DecisionTreeModel& tree, SparseRow x) noexcept {
  std::size_t i = 0;
  while (!tree.nodes[i].is_leaf()) {
    const auto& node = tree.nodes[i];
    i = static_cast<std::size_t>(x.at(static_cast<std::uint32_t>(node.feature)) <= node.threshold ? node.left
                                                                                                  : node.right);
  }
  return tree.nodes[i].label;
}

}  // namespace sadf
