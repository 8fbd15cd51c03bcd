// Primal linear SVM trained with Pegasos: stochastic subgradient steps on the
// L2-regularized hinge loss with step size 1/(lambda * t), followed by
// projection onto the ball of radius 1/sqrt(lambda). The bias is an extra
// regularized coordinate with constant input 1.
//
// The weight vector is stored as scale * v so the (1 - eta*lambda) shrink is
// O(1) and an update costs O(nnz) of the example. The returned model is the
// average of all iterates weighted by step number, which is far less jumpy
// epoch to epoch than the last iterate and discounts the huge early steps. The average is kept lazily: coordinate j only folds its
// contribution v[j] * (sum of scales since its last change) when it changes.

#include <cmath>
#include <numeric>

#include "sadf/classifiers.hpp"
#include "sadf/error.hpp"
#include "sadf/random.hpp"

namespace sadf {

namespace {

double dot(const std::vector<double>& v, SparseRow x) noexcept {
  double s = 0.0;
  for (std::size_t k = 0; k < x.nnz(); ++k) s += v[x.index[k]] * x.value[k];
  return s;
}

double objective(const std::vector<double>& w, double b, double lambda, const Dataset& data) {
  double norm2 = b * b;
  for (const double wi : w) norm2 += wi * wi;
  double hinge = 0.0;
  for (std::size_t r = 0; r < data.size(); ++r) {
    const double y = data.y[r] ? 1.0 : -1.0;
    const double margin = y * (dot(w, data.x.row(r)) + b);
    if (margin < 1.0) hinge += 1.0 - margin;
  }
  return 0.5 * lambda * norm2 + hinge / static_cast<double>(data.size());
}

}  // namespace

LinearSvmModel train_svm(const Dataset& train, const SvmParams& params) {
  if (train.size() == 0) throw Error(Errc::empty_training, "no training vectors");
  if (!(params.lambda > 0.0)) throw Error(Errc::usage, "lambda must be positive");
  std::size_t positives = 0;
  for (const auto y : train.y) positives += y;
  if (positives == 0 || positives == train.size())
    throw Error(Errc::single_class_training, "SVM needs both classes in the training set");

  const auto dim = train.dimension();
  const auto n = train.size();
  const double lambda = params.lambda;
  const double radius = 1.0 / std::sqrt(lambda);

  std::vector<double> v(dim, 0.0);
  double vb = 0.0;
  double scale = 1.0;
  double vnorm2 = 0.0;

  // Lazy iterate sums: acc holds the sum of t * w_t up to mark[j] on the
  // running sum `pref` of t * scale_t.
  std::vector<double> acc(dim, 0.0), mark(dim, 0.0);
  double acc_b = 0.0, mark_b = 0.0, pref = 0.0;
  auto flush = [&](std::size_t j) {
    acc[j] += v[j] * (pref - mark[j]);
    mark[j] = pref;
  };
  auto flush_all = [&] {
    for (std::size_t j = 0; j < dim; ++j) acc[j] += v[j] * (pref - mark[j]);
    acc_b += vb * (pref - mark_b);
    std::fill(mark.begin(), mark.end(), 0.0);
    mark_b = 0.0;
    pref = 0.0;
  };

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  Rng rng(params.seed);

  LinearSvmModel model;
  model.params = params;
  std::uint64_t t = 0;

  auto fold_scale = [&] {
    flush_all();
    for (auto& vi : v) vi *= scale;
    vb *= scale;
    scale = 1.0;
    vnorm2 = vb * vb;
    for (const double vi : v) vnorm2 += vi * vi;
  };

  for (std::size_t epoch = 0; epoch < params.epochs; ++epoch) {
    shuffle_in_place(std::span<std::size_t>(order), rng);
    for (const auto i : order) {
      ++t;
      const auto x = train.x.row(i);
      const double y = train.y[i] ? 1.0 : -1.0;
      const double eta = 1.0 / (lambda * static_cast<double>(t));
      const double vx = dot(v, x) + vb;
      const double margin = y * scale * vx;

      const double shrink = 1.0 - eta * lambda;
      if (shrink <= 0.0) {
        flush_all();
        std::fill(v.begin(), v.end(), 0.0);
        vb = 0.0;
        vnorm2 = 0.0;
        scale = 1.0;
      } else {
        scale *= shrink;
      }
      if (margin < 1.0) {
        const double step = eta * y / scale;
        double xnorm2 = 1.0;
        for (std::size_t k = 0; k < x.nnz(); ++k) {
          flush(x.index[k]);
          v[x.index[k]] += step * x.value[k];
          xnorm2 += x.value[k] * x.value[k];
        }
        acc_b += vb * (pref - mark_b);
        mark_b = pref;
        vb += step;
        const double cross = shrink <= 0.0 ? 0.0 : vx;
        vnorm2 += 2.0 * step * cross + step * step * xnorm2;
      }
      const double norm = scale * std::sqrt(std::max(vnorm2, 0.0));
      if (norm > radius) scale *= radius / norm;
      pref += static_cast<double>(t) * scale;
      if (scale < 1e-9) fold_scale();
    }
    fold_scale();
    const double tt = static_cast<double>(t);
    const double inv_t = 2.0 / (tt * (tt + 1.0));
    model.weights.resize(dim);
    for (std::size_t j = 0; j < dim; ++j) model.weights[j] = acc[j] * inv_t;
    model.bias = acc_b * inv_t;
    model.objective.push_back(objective(model.weights, model.bias, lambda, train));
  }
  if (params.epochs == 0) model.weights.assign(dim, 0.0);
  return model;
}

double svm_score(const LinearSvmModel& model, SparseRow x) noexcept {
  return dot(model.weights, x) + model.bias;
}

}  // namespace sadf
