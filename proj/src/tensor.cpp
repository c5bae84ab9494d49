#include "tensorbio/tensor.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "tensorbio/kernels.hpp"

namespace tensorbio {
namespace {

[[noreturn]] void invalid(const std::string& msg) { throw std::invalid_argument(msg); }

std::string dims_string(std::span<const std::size_t> dims) {
  std::string s = "(";
  for (std::size_t i = 0; i < dims.size(); ++i) {
    if (i) s += ",";
    s += std::to_string(dims[i]);
  }
  return s + ")";
}

void validate_dims(std::span<const std::size_t> dims) {
  if (dims.size() < 2) invalid("tensor order must be at least 2, got " + std::to_string(dims.size()));
  for (std::size_t n : dims) {
    if (n == 0) invalid("tensor extents must be positive, got " + dims_string(dims));
  }
}

// Per-mode strides into the flattened (row, col) matrix; a mode contributes
// to exactly one of the two.
struct FlattenStrides {
  std::vector<std::size_t> row;
  std::vector<std::size_t> col;
  std::size_t rows = 1;
  std::size_t cols = 1;
};

FlattenStrides flatten_strides(std::span<const std::size_t> dims, const ModePartition& part) {
  const std::size_t d = dims.size();
  if (part.row_modes.empty() || part.col_modes.empty()) {
    invalid("mode partition needs nonempty row and column groups");
  }
  std::vector<bool> seen(d, false);
  FlattenStrides s;
  s.row.assign(d, 0);
  s.col.assign(d, 0);
  auto take = [&](std::size_t mode, std::vector<std::size_t>& stride, std::size_t& extent) {
    if (mode >= d) invalid("mode " + std::to_string(mode) + " out of range for order " + std::to_string(d));
    if (seen[mode]) invalid("mode " + std::to_string(mode) + " listed twice in partition");
    seen[mode] = true;
    stride[mode] = extent;
    extent *= dims[mode];
  };
  for (std::size_t m : part.row_modes) take(m, s.row, s.rows);
  for (std::size_t m : part.col_modes) take(m, s.col, s.cols);
  if (std::find(seen.begin(), seen.end(), false) != seen.end()) {
    invalid("mode partition does not cover every mode");
  }
  return s;
}

// Calls fn(linear, row, col) for every entry in storage order.
template <typename Fn>
void for_each_flattened(std::span<const std::size_t> dims, const FlattenStrides& s, Fn&& fn) {
  const std::size_t d = dims.size();
  std::vector<std::size_t> idx(d, 0);
  std::size_t row = 0;
  std::size_t col = 0;
  const std::size_t total = product(dims);
  for (std::size_t lin = 0; lin < total; ++lin) {
    fn(lin, row, col);
    for (std::size_t m = d; m-- > 0;) {
      if (++idx[m] < dims[m]) {
        row += s.row[m];
        col += s.col[m];
        break;
      }
      row -= (dims[m] - 1) * s.row[m];
      col -= (dims[m] - 1) * s.col[m];
      idx[m] = 0;
    }
  }
}

ModePartition standard_partition(std::size_t order, std::size_t mode) {
  ModePartition part;
  part.row_modes = {mode};
  for (std::size_t m = 0; m < order; ++m) {
    if (m != mode) part.col_modes.push_back(m);
  }
  return part;
}

}  // namespace

Matrix::Matrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols, 0.0) {}

Matrix::Matrix(std::size_t rows, std::size_t cols, std::vector<double> data)
    : rows_(rows), cols_(cols), data_(std::move(data)) {
  if (data_.size() != rows_ * cols_) {
    invalid("matrix data length " + std::to_string(data_.size()) + " does not match " +
            std::to_string(rows_) + "x" + std::to_string(cols_));
  }
}

Matrix Matrix::identity(std::size_t n) {
  Matrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

Matrix Matrix::transpose() const {
  Matrix t(cols_, rows_);
  for (std::size_t r = 0; r < rows_; ++r) {
    for (std::size_t c = 0; c < cols_; ++c) t(c, r) = (*this)(r, c);
  }
  return t;
}

Matrix matmul(const Matrix& a, const Matrix& b) {
  if (a.cols() != b.rows()) {
    invalid("matmul: inner dimensions differ (" + std::to_string(a.cols()) + " vs " +
            std::to_string(b.rows()) + ")");
  }
  Matrix c(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    auto out = c.row(i);
    for (std::size_t k = 0; k < a.cols(); ++k) kernels::axpy(a(i, k), b.row(k), out);
  }
  return c;
}

double frobenius_norm(const Matrix& m) { return std::sqrt(kernels::sum_squares(m.data())); }

Tensor::Tensor(std::vector<std::size_t> dims) : dims_(std::move(dims)) {
  validate_dims(dims_);
  data_.assign(product(dims_), 0.0);
}

Tensor::Tensor(std::vector<std::size_t> dims, std::vector<double> data)
    : dims_(std::move(dims)), data_(std::move(data)) {
  validate_dims(dims_);
  if (data_.size() != product(dims_)) {
    invalid("tensor data length " + std::to_string(data_.size()) + " does not match dims " +
            dims_string(dims_));
  }
}

std::size_t Tensor::linear_index(std::span<const std::size_t> index) const {
  if (index.size() != dims_.size()) invalid("index arity does not match tensor order");
  std::size_t lin = 0;
  for (std::size_t m = 0; m < dims_.size(); ++m) {
    if (index[m] >= dims_[m]) invalid("index out of range in mode " + std::to_string(m));
    lin = lin * dims_[m] + index[m];
  }
  return lin;
}

std::size_t product(std::span<const std::size_t> dims) noexcept {
  std::size_t p = 1;
  for (std::size_t n : dims) p *= n;
  return p;
}

Matrix general_flatten(const Tensor& t, const ModePartition& part) {
  const FlattenStrides s = flatten_strides(t.dims(), part);
  Matrix m(s.rows, s.cols);
  const auto src = t.data();
  auto dst = m.data();
  for_each_flattened(t.dims(), s, [&](std::size_t lin, std::size_t r, std::size_t c) {
    dst[r * s.cols + c] = src[lin];
  });
  return m;
}

Tensor general_fold(const Matrix& m, const ModePartition& part, const std::vector<std::size_t>& dims) {
  validate_dims(dims);
  const FlattenStrides s = flatten_strides(dims, part);
  if (m.rows() != s.rows || m.cols() != s.cols) {
    invalid("fold: matrix is " + std::to_string(m.rows()) + "x" + std::to_string(m.cols()) +
            " but dims " + dims_string(dims) + " need " + std::to_string(s.rows) + "x" +
            std::to_string(s.cols));
  }
  Tensor t(dims);
  auto dst = t.data();
  const auto src = m.data();
  for_each_flattened(dims, s, [&](std::size_t lin, std::size_t r, std::size_t c) {
    dst[lin] = src[r * s.cols + c];
  });
  return t;
}

Matrix unfold(const Tensor& t, std::size_t mode) {
  if (mode >= t.order()) {
    invalid("unfold: mode " + std::to_string(mode) + " out of range for order " +
            std::to_string(t.order()));
  }
  return general_flatten(t, standard_partition(t.order(), mode));
}

Tensor fold(const Matrix& m, std::size_t mode, const std::vector<std::size_t>& dims) {
  if (mode >= dims.size()) {
    invalid("fold: mode " + std::to_string(mode) + " out of range for order " +
            std::to_string(dims.size()));
  }
  return general_fold(m, standard_partition(dims.size(), mode), dims);
}

Tensor mode_dot(const Tensor& t, const Matrix& m, std::size_t mode) {
  if (mode >= t.order()) {
    invalid("mode_dot: mode " + std::to_string(mode) + " out of range for order " +
            std::to_string(t.order()));
  }
  const std::size_t n = t.dim(mode);
  if (m.cols() != n) {
    invalid("mode_dot: matrix has " + std::to_string(m.cols()) + " columns but mode " +
            std::to_string(mode) + " has extent " + std::to_string(n));
  }
  std::vector<std::size_t> out_dims = t.dims();
  out_dims[mode] = m.rows();
  Tensor out(out_dims);

  // View both tensors as (outer, extent, inner) blocks in storage order.
  const std::span<const std::size_t> dims = t.dims();
  const std::size_t outer = product(dims.first(mode));
  const std::size_t inner = product(dims.subspan(mode + 1));
  const std::size_t rows = m.rows();
  const auto src = t.data();
  auto dst = out.data();

  if (inner == 1) {
    for (std::size_t o = 0; o < outer; ++o) {
      const auto fiber = src.subspan(o * n, n);
      for (std::size_t r = 0; r < rows; ++r) dst[o * rows + r] = kernels::dot(m.row(r), fiber);
    }
    return out;
  }
  for (std::size_t o = 0; o < outer; ++o) {
    for (std::size_t r = 0; r < rows; ++r) {
      auto y = dst.subspan((o * rows + r) * inner, inner);
      for (std::size_t j = 0; j < n; ++j) {
        kernels::axpy(m(r, j), src.subspan((o * n + j) * inner, inner), y);
      }
    }
  }
  return out;
}

Tensor multi_mode_dot(const Tensor& t, std::span<const std::pair<Matrix, std::size_t>> products) {
  std::vector<bool> used(t.order(), false);
  for (const auto& [m, mode] : products) {
    if (mode >= t.order()) invalid("multi_mode_dot: mode " + std::to_string(mode) + " out of range");
    if (used[mode]) invalid("multi_mode_dot: mode " + std::to_string(mode) + " given twice");
    used[mode] = true;
  }
  Tensor out = t;
  for (const auto& [m, mode] : products) out = mode_dot(out, m, mode);
  return out;
}

double squared_norm(const Tensor& t) { return kernels::sum_squares(t.data()); }

double frobenius_norm(const Tensor& t) { return std::sqrt(squared_norm(t)); }

}  // namespace tensorbio
