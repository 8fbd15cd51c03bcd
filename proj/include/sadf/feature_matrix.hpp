#pragma once

// Row-compressed storage for encoded feature vectors. Encoded rows are mostly
// zeros (one-hot and hashed indicator blocks), so bulk training and detection
// keep them sparse; a row expands to the dense vector it stands for with
// zeros at every index not stored.

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "sadf/error.hpp"

namespace sadf {

/// Non-zero entries of one row, ascending index order.
struct SparseRow {
  std::span<const std::uint32_t> index;
  std::span<const double> value;

  std::size_t nnz() const noexcept { return index.size(); }

  double at(std::uint32_t feature) const noexcept {
    const auto it = std::lower_bound(index.begin(), index.end(), feature);
    if (it == index.end() || *it != feature) return 0.0;
    return value[static_cast<std::size_t>(it - index.begin())];
  }
};

class FeatureMatrix {
 public:
  explicit FeatureMatrix(std::size_t cols = 0) : cols_(cols) {}

  std::size_t rows() const noexcept { return row_ptr_.size() - 1; }
  std::size_t cols() const noexcept { return cols_; }
  std::size_t nnz() const noexcept { return index_.size(); }

  SparseRow row(std::size_t r) const noexcept {
    const auto b = row_ptr_[r];
    const auto e = row_ptr_[r + 1];
    return {std::span(index_).subspan(b, e - b), std::span(value_).subspan(b, e - b)};
  }

  /// Entries must be ascending in index; zeros are dropped.
  void add_row(std::span<const std::uint32_t> index, std::span<const double> value) {
    for (std::size_t k = 0; k < index.size(); ++k) {
      if (value[k] == 0.0) continue;
      if (index[k] >= cols_) throw Error(Errc::dimension_mismatch, "feature index out of range");
      index_.push_back(index[k]);
      value_.push_back(value[k]);
    }
    row_ptr_.push_back(index_.size());
  }

  void add_row(SparseRow r) { add_row(r.index, r.value); }

  void add_dense_row(std::span<const double> x) {
    if (x.size() != cols_) throw Error(Errc::dimension_mismatch, "dense row has wrong length");
    for (std::size_t i = 0; i < x.size(); ++i) {
      if (x[i] == 0.0) continue;
      index_.push_back(static_cast<std::uint32_t>(i));
      value_.push_back(x[i]);
    }
    row_ptr_.push_back(index_.size());
  }

  std::vector<double> dense_row(std::size_t r) const {
    std::vector<double> x(cols_, 0.0);
    const auto sr = row(r);
    for (std::size_t k = 0; k < sr.nnz(); ++k) x[sr.index[k]] = sr.value[k];
    return x;
  }

  void reserve(std::size_t rows, std::size_t nnz) {
    row_ptr_.reserve(rows + 1);
    index_.reserve(nnz);
    value_.reserve(nnz);
  }

  void clear() {
    row_ptr_.assign(1, 0);
    index_.clear();
    value_.clear();
  }

 private:
  std::size_t cols_;
  std::vector<std::size_t> row_ptr_{0};
  std::vector<std::uint32_t> index_;
  std::vector<double> value_;
};

/// Sparse view over a dense vector (zeros skipped). Owns its storage.
class DenseAsSparse {
 public:
  explicit DenseAsSparse(std::span<const double> x) {
    for (std::size_t i = 0; i < x.size(); ++i) {
      if (x[i] == 0.0) continue;
      index_.push_back(static_cast<std::uint32_t>(i));
      value_.push_back(x[i]);
    }
  }
  SparseRow row() const noexcept { return {index_, value_}; }

 private:
  std::vector<std::uint32_t> index_;
  std::vector<double> value_;
};

/// Encoded examples with binary labels.
struct Dataset {
  FeatureMatrix x;
  std::vector<std::uint8_t> y;

  std::size_t size() const noexcept { return y.size(); }
  std::size_t dimension() const noexcept { return x.cols(); }
};

}  // namespace sadf
