#include <algorithm>

#include "sadf/classifiers.hpp"
#include "sadf/error.hpp"

namespace sadf {

KnnModel train_knn(const Dataset& train, std::size_t k) {
  if (train.size() == 0) throw Error(Errc::empty_training, "no training vectors");
  if (k < 1 || k > train.size())
    throw Error(Errc::usage, "k must be in [1, " + std::to_string(train.size()) + "], got " + std::to_string(k));
  KnnModel model;
  model.points = train.x;
  model.labels = train.y;
  model.k = k;
  return model;
}

double squared_distance(SparseRow a, SparseRow b) noexcept {
  double sum = 0.0;
  std::size_t i = 0, j = 0;
  while (i < a.nnz() || j < b.nnz()) {
    double d;
    if (j == b.nnz() || (i < a.nnz() && a.index[i] < b.index[j])) {
      d = a.value[i++];
    } else if (i == a.nnz() || b.index[j] < a.index[i]) {
      d = b.value[j++];
    } else {
      d = a.value[i++] - b.value[j++];
    }
    sum += d * d;
  }
  return sum;
}

std::uint8_t predict_knn(const KnnModel& model, SparseRow x) {
  const auto n = model.points.rows();
  std::vector<std::pair<double, std::size_t>> dist(n);
  for (std::size_t i = 0; i < n; ++i) dist[i] = {squared_distance(x, model.points.row(i)), i};
  // Equal distances keep the earlier training row.
  std::partial_sort(dist.begin(), dist.begin() + static_cast<std::ptrdiff_t>(model.k), dist.end());
  std::size_t votes[2] = {0, 0};
  for (std::size_t i = 0; i < model.k; ++i) ++votes[model.labels[dist[i].second]];
  return votes[1] > votes[0] ? 1 : 0;
}

}  // namespace sadf
