#include <cmath>
#include <limits>
#include <numbers>

#include "sadf/classifiers.hpp"
#include "sadf/error.hpp"
#include "sadf/preprocess.hpp"

namespace sadf {

NaiveBayesModel train_nb(const Dataset& train) {
  if (train.size() == 0) throw Error(Errc::empty_training, "no training vectors");
  const auto dim = train.dimension();
  NaiveBayesModel model;
  model.dimension = dim;

  std::array<double, 2> n{0.0, 0.0};
  std::array<std::vector<double>, 2> sum, nnz, ss;
  for (int c = 0; c < 2; ++c) {
    sum[c].assign(dim, 0.0);
    nnz[c].assign(dim, 0.0);
    ss[c].assign(dim, 0.0);
  }
  for (std::size_t r = 0; r < train.size(); ++r) {
    const auto c = train.y[r];
    n[c] += 1.0;
    const auto row = train.x.row(r);
    for (std::size_t k = 0; k < row.nnz(); ++k) {
      sum[c][row.index[k]] += row.value[k];
      nnz[c][row.index[k]] += 1.0;
    }
  }
  const double total = n[0] + n[1];
  model.prior = {n[0] / total, n[1] / total};
  model.prior_only = n[0] == 0.0 || n[1] == 0.0;

  for (int c = 0; c < 2; ++c) {
    model.mean[c].assign(dim, 0.0);
    model.sigma[c].assign(dim, kSigmaFloor);
    if (n[c] == 0.0) continue;
    for (std::size_t f = 0; f < dim; ++f) model.mean[c][f] = sum[c][f] / n[c];
  }
  for (std::size_t r = 0; r < train.size(); ++r) {
    const auto c = train.y[r];
    const auto row = train.x.row(r);
    for (std::size_t k = 0; k < row.nnz(); ++k) {
      const double d = row.value[k] - model.mean[c][row.index[k]];
      ss[c][row.index[k]] += d * d;
    }
  }
  for (int c = 0; c < 2; ++c) {
    if (n[c] == 0.0) continue;
    for (std::size_t f = 0; f < dim; ++f) {
      const double mu = model.mean[c][f];
      const double var = (ss[c][f] + (n[c] - nnz[c][f]) * mu * mu) / n[c];
      model.sigma[c][f] = std::max(std::sqrt(var), kSigmaFloor);
    }
  }
  prepare_nb(model);
  return model;
}

namespace {
constexpr double kHalfLog2Pi = 0.91893853320467274178;  // 0.5 * log(2*pi)
}

void prepare_nb(NaiveBayesModel& model) {
  for (int c = 0; c < 2; ++c) {
    const auto& sd = model.sigma[c];
    model.inv_sigma[c].resize(sd.size());
    double norm = 0.0;
    for (std::size_t f = 0; f < sd.size(); ++f) {
      model.inv_sigma[c][f] = 1.0 / sd[f];
      norm += -std::log(sd[f]) - kHalfLog2Pi;
    }
    model.log_norm[c] = norm;
  }
}

std::array<double, 2> nb_log_scores(const NaiveBayesModel& model, SparseRow x) noexcept {
  std::array<double, 2> score{};
  for (int c = 0; c < 2; ++c) {
    const double log_prior = model.prior[c] > 0.0 ? std::log(model.prior[c]) : -std::numeric_limits<double>::infinity();
    const auto& mu = model.mean[c];
    const auto& sd = model.sigma[c];
    if (model.inv_sigma[c].size() != model.dimension) {
      // Unprepared model: evaluate every term directly.
      double ll = 0.0;
      std::size_t k = 0;
      for (std::size_t f = 0; f < model.dimension; ++f) {
        double v = 0.0;
        if (k < x.nnz() && x.index[k] == f) v = x.value[k++];
        const double z = (v - mu[f]) / sd[f];
        ll += -std::log(sd[f]) - kHalfLog2Pi - 0.5 * z * z;
      }
      score[c] = log_prior + ll;
      continue;
    }
    const auto& inv = model.inv_sigma[c];
    double sq = 0.0;
    std::size_t k = 0;
    for (std::size_t f = 0; f < model.dimension; ++f) {
      double v = 0.0;
      if (k < x.nnz() && x.index[k] == f) v = x.value[k++];
      const double z = (v - mu[f]) * inv[f];
      sq += z * z;
    }
    score[c] = log_prior + model.log_norm[c] - 0.5 * sq;
  }
  return score;
}

std::array<double, 2> nb_posterior(const NaiveBayesModel& model, SparseRow x) noexcept {
  const auto s = nb_log_scores(model, x);
  const double top = std::max(s[0], s[1]);
  const double e0 = std::exp(s[0] - top);
  const double e1 = std::exp(s[1] - top);
  return {e0 / (e0 + e1), e1 / (e0 + e1)};
}

std::uint8_t predict_nb(const NaiveBayesModel& model, SparseRow x) noexcept {
  const auto s = nb_log_scores(model, x);
  return s[1] > s[0] ? 1 : 0;
}

}  // namespace sadf
