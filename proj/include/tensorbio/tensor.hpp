#pragma once

// Dense real tensors of order d >= 2, their matrix flattenings and
// multilinear (mode-k) products.
//
// Storage layout: generalized row-major, the last index varies fastest. The
// entry (i_1, ..., i_d) lives at sum_m i_m * prod_{l>m} n_l.
//
// Flattening convention: unfold(t, k) is n_k x prod_{m!=k} n_m. The column of
// entry (i_1, ..., i_d) is sum_{m!=k} i_m * J_m with J_m = prod_{l<m, l!=k} n_l,
// i.e. the remaining indices are enumerated first-index-fastest. All modes are
// zero-based.

#include <cstddef>
#include <span>
#include <utility>
#include <vector>

namespace tensorbio {

// Row-major dense matrix.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols);
  Matrix(std::size_t rows, std::size_t cols, std::vector<double> data);

  static Matrix identity(std::size_t n);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  std::size_t size() const noexcept { return data_.size(); }

  double& operator()(std::size_t r, std::size_t c) noexcept { return data_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const noexcept { return data_[r * cols_ + c]; }

  std::span<double> row(std::size_t r) noexcept { return {data_.data() + r * cols_, cols_}; }
  std::span<const double> row(std::size_t r) const noexcept {
    return {data_.data() + r * cols_, cols_};
  }

  std::span<double> data() noexcept { return data_; }
  std::span<const double> data() const noexcept { return data_; }

  Matrix transpose() const;

  friend bool operator==(const Matrix&, const Matrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

Matrix matmul(const Matrix& a, const Matrix& b);
double frobenius_norm(const Matrix& m);

class Tensor {
 public:
  // Empty placeholder (order 0). Only useful as a target for assignment.
  Tensor() = default;
  // Zero-filled tensor. Requires order >= 2 and every extent >= 1.
  explicit Tensor(std::vector<std::size_t> dims);
  Tensor(std::vector<std::size_t> dims, std::vector<double> data);

  const std::vector<std::size_t>& dims() const noexcept { return dims_; }
  std::size_t order() const noexcept { return dims_.size(); }
  std::size_t dim(std::size_t mode) const { return dims_.at(mode); }
  std::size_t size() const noexcept { return data_.size(); }

  std::span<double> data() noexcept { return data_; }
  std::span<const double> data() const noexcept { return data_; }

  std::size_t linear_index(std::span<const std::size_t> index) const;
  double& at(std::span<const std::size_t> index) { return data_[linear_index(index)]; }
  double at(std::span<const std::size_t> index) const { return data_[linear_index(index)]; }

  // Order-3 shorthand.
  double& operator()(std::size_t i, std::size_t j, std::size_t k) noexcept {
    return data_[(i * dims_[1] + j) * dims_[2] + k];
  }
  double operator()(std::size_t i, std::size_t j, std::size_t k) const noexcept {
    return data_[(i * dims_[1] + j) * dims_[2] + k];
  }

  friend bool operator==(const Tensor&, const Tensor&) = default;

 private:
  std::vector<std::size_t> dims_;
  std::vector<double> data_;
};

// Row and column mode groups of a general flattening. Together they must list
// every mode exactly once and both must be nonempty.
struct ModePartition {
  std::vector<std::size_t> row_modes;
  std::vector<std::size_t> col_modes;
};

std::size_t product(std::span<const std::size_t> dims) noexcept;

Matrix unfold(const Tensor& t, std::size_t mode);
Tensor fold(const Matrix& m, std::size_t mode, const std::vector<std::size_t>& dims);

// Row index enumerates row_modes first-index-fastest in the listed order, and
// likewise for the columns. With row_modes = {k} and col_modes the remaining
// modes ascending, this is unfold(t, k).
Matrix general_flatten(const Tensor& t, const ModePartition& part);
Tensor general_fold(const Matrix& m, const ModePartition& part,
                    const std::vector<std::size_t>& dims);

// m applied along `mode`: result has extent m.rows() there and equals
// fold(m * unfold(t, mode), mode, new_dims).
Tensor mode_dot(const Tensor& t, const Matrix& m, std::size_t mode);

// Sequential mode_dot over distinct modes, in list order.
Tensor multi_mode_dot(const Tensor& t, std::span<const std::pair<Matrix, std::size_t>> products);

double frobenius_norm(const Tensor& t);
double squared_norm(const Tensor& t);

}  // namespace tensorbio
