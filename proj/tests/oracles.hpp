#pragma once

// Brute-force reference computations, written without the library's
// algorithms so they can check them.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <optional>
#include <set>
#include <vector>

namespace sadf::oracle {

using Points = std::vector<std::vector<double>>;

/// Gaussian naive Bayes by hand: per-class mean, population variance with
/// the 1e-9 sigma floor, log prior plus log densities. Returns the class.
inline int naive_bayes(const Points& x, const std::vector<int>& y, const std::vector<double>& query) {
  double best = -std::numeric_limits<double>::infinity();
  int best_class = 0;
  for (int c = 0; c < 2; ++c) {
    std::vector<const std::vector<double>*> members;
    for (std::size_t i = 0; i < x.size(); ++i)
      if (y[i] == c) members.push_back(&x[i]);
    if (members.empty()) continue;
    double score = std::log(static_cast<double>(members.size()) / static_cast<double>(x.size()));
    for (std::size_t f = 0; f < query.size(); ++f) {
      double mean = 0;
      for (const auto* m : members) mean += (*m)[f];
      mean /= static_cast<double>(members.size());
      double var = 0;
      for (const auto* m : members) var += ((*m)[f] - mean) * ((*m)[f] - mean);
      var /= static_cast<double>(members.size());
      const double sd = std::max(std::sqrt(var), 1e-9);
      const double z = (query[f] - mean) / sd;
      score += -std::log(sd * std::sqrt(2 * std::numbers::pi)) - 0.5 * z * z;
    }
    if (score > best) {
      best = score;
      best_class = c;
    }
  }
  return best_class;
}

/// k nearest by full sort of every distance (ties keep training order), then
/// majority vote with ties to class 0.
inline int knn(const Points& x, const std::vector<int>& y, const std::vector<double>& query, std::size_t k) {
  std::vector<std::pair<double, std::size_t>> all;
  for (std::size_t i = 0; i < x.size(); ++i) {
    double d = 0;
    for (std::size_t f = 0; f < query.size(); ++f) d += (x[i][f] - query[f]) * (x[i][f] - query[f]);
    all.push_back({d, i});
  }
  std::stable_sort(all.begin(), all.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
  int votes1 = 0;
  for (std::size_t i = 0; i < k; ++i) votes1 += y[all[i].second];
  return 2 * votes1 > static_cast<int>(k) ? 1 : 0;
}

struct SplitChoice {
  std::size_t feature = 0;
  double threshold = 0;
  double weighted_gini = 0;  // lower is better
};

inline double gini(double c0, double c1) {
  const double n = c0 + c1;
  if (n == 0) return 0;
  return 1.0 - (c0 / n) * (c0 / n) - (c1 / n) * (c1 / n);
}

/// Every (feature, midpoint) pair with at least min_leaf rows per side.
inline std::vector<SplitChoice> all_splits(const Points& x, const std::vector<int>& y, std::size_t min_leaf) {
  std::vector<SplitChoice> out;
  if (x.empty()) return out;
  const double n = static_cast<double>(x.size());
  for (std::size_t f = 0; f < x.front().size(); ++f) {
    std::set<double> distinct;
    for (const auto& p : x) distinct.insert(p[f]);
    std::vector<double> v(distinct.begin(), distinct.end());
    for (std::size_t i = 0; i + 1 < v.size(); ++i) {
      const double t = v[i] + (v[i + 1] - v[i]) / 2;
      double l0 = 0, l1 = 0, r0 = 0, r1 = 0;
      for (std::size_t r = 0; r < x.size(); ++r) {
        if (x[r][f] <= t)
          (y[r] ? l1 : l0) += 1;
        else
          (y[r] ? r1 : r0) += 1;
      }
      if (l0 + l1 < static_cast<double>(min_leaf) || r0 + r1 < static_cast<double>(min_leaf)) continue;
      out.push_back({f, t, ((l0 + l1) / n) * gini(l0, l1) + ((r0 + r1) / n) * gini(r0, r1)});
    }
  }
  return out;
}

inline std::optional<SplitChoice> best_split(const Points& x, const std::vector<int>& y, std::size_t min_leaf) {
  const auto all = all_splits(x, y, min_leaf);
  if (all.empty()) return std::nullopt;
  return *std::min_element(all.begin(), all.end(),
                           [](const auto& a, const auto& b) { return a.weighted_gini < b.weighted_gini; });
}

/// Weighted Gini of splitting on (feature, threshold).
inline double split_gini(const Points& x, const std::vector<int>& y, std::size_t f, double t) {
  double l0 = 0, l1 = 0, r0 = 0, r1 = 0;
  for (std::size_t r = 0; r < x.size(); ++r) {
    if (x[r][f] <= t)
      (y[r] ? l1 : l0) += 1;
    else
      (y[r] ? r1 : r0) += 1;
  }
  const double n = static_cast<double>(x.size());
  return ((l0 + l1) / n) * gini(l0, l1) + ((r0 + r1) / n) * gini(r0, r1);
}

/// Whether some tree of depth <= 2 over the given axis thresholds classifies
/// every point correctly. Enumerates root split, both child splits (or
/// leaves) and all leaf labels.
inline bool depth2_tree_exists(const Points& x, const std::vector<int>& y, const std::vector<double>& thresholds) {
  const std::size_t dims = x.front().size();
  auto leaf_ok = [&](const std::vector<std::size_t>& rows) {
    std::set<int> labels;
    for (const auto r : rows) labels.insert(y[r]);
    return labels.size() <= 1;
  };
  auto subtree_ok = [&](const std::vector<std::size_t>& rows) {
    if (leaf_ok(rows)) return true;
    for (std::size_t f = 0; f < dims; ++f)
      for (const double t : thresholds) {
        std::vector<std::size_t> l, r;
        for (const auto i : rows) (x[i][f] <= t ? l : r).push_back(i);
        if (leaf_ok(l) && leaf_ok(r)) return true;
      }
    return false;
  };
  std::vector<std::size_t> all(x.size());
  for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
  for (std::size_t f = 0; f < dims; ++f)
    for (const double t : thresholds) {
      std::vector<std::size_t> l, r;
      for (const auto i : all) (x[i][f] <= t ? l : r).push_back(i);
      if (subtree_ok(l) && subtree_ok(r)) return true;
    }
  return false;
}

/// Smallest y * (w.x + b) over the set.
inline double min_margin(const Points& x, const std::vector<int>& y, const std::vector<double>& w, double b) {
  double m = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < x.size(); ++i) {
    double s = b;
    for (std::size_t f = 0; f < w.size(); ++f) s += w[f] * x[i][f];
    m = std::min(m, (y[i] ? 1.0 : -1.0) * s);
  }
  return m;
}

/// Reference FNV-1a 64 over the bytes with a seeded basis, then the splitmix64
/// finalizer.
inline std::uint64_t fnv_splitmix(const std::string& bytes, std::uint64_t seed) {
  std::uint64_t h = 14695981039346656037ull ^ (seed * 0x9e3779b97f4a7c15ull);
  for (const unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ull;
  }
  h ^= h >> 30;
  h *= 0xbf58476d1ce4e5b9ull;
  h ^= h >> 27;
  h *= 0x94d049bb133111ebull;
  h ^= h >> 31;
  return h;
}

}  // namespace sadf::oracle
