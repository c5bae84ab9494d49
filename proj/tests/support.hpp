#pragma once

// Random inputs and comparison helpers shared by the test binaries.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "tensorbio/raster.hpp"
#include "tensorbio/tensor.hpp"

namespace tbtest {

using tensorbio::Matrix;
using tensorbio::Raster;
using tensorbio::Tensor;

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  double normal() { return std::normal_distribution<double>(0.0, 1.0)(gen_); }
  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(gen_); }
  std::size_t index(std::size_t lo, std::size_t hi) {  // inclusive
    return std::uniform_int_distribution<std::size_t>(lo, hi)(gen_);
  }
  std::mt19937_64& engine() { return gen_; }

 private:
  std::mt19937_64 gen_;
};

inline Tensor random_tensor(Rng& rng, std::vector<std::size_t> dims) {
  Tensor t(std::move(dims));
  for (double& v : t.data()) v = rng.normal();
  return t;
}

inline Matrix random_matrix(Rng& rng, std::size_t rows, std::size_t cols) {
  Matrix m(rows, cols);
  for (double& v : m.data()) v = rng.normal();
  return m;
}

inline Eigen::MatrixXd to_eigen(const Matrix& m) {
  Eigen::MatrixXd e(m.rows(), m.cols());
  for (std::size_t i = 0; i < m.rows(); ++i) {
    for (std::size_t j = 0; j < m.cols(); ++j) e(i, j) = m(i, j);
  }
  return e;
}

inline Matrix from_eigen(const Eigen::MatrixXd& e) {
  Matrix m(e.rows(), e.cols());
  for (std::size_t i = 0; i < m.rows(); ++i) {
    for (std::size_t j = 0; j < m.cols(); ++j) m(i, j) = e(i, j);
  }
  return m;
}

inline double diff_norm(std::span<const double> a, std::span<const double> b) {
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) acc += (a[i] - b[i]) * (a[i] - b[i]);
  return std::sqrt(acc);
}

inline double plain_norm(std::span<const double> a) {
  double acc = 0.0;
  for (double v : a) acc += v * v;
  return std::sqrt(acc);
}

// ||a - b|| / max(||a||, tiny)
inline double rel_diff(const Tensor& a, const Tensor& b) {
  return diff_norm(a.data(), b.data()) / std::max(plain_norm(a.data()), 1e-300);
}

inline double rel_diff(const Matrix& a, const Matrix& b) {
  return diff_norm(a.data(), b.data()) / std::max(plain_norm(a.data()), 1e-300);
}

inline double max_abs_diff(std::span<const double> a, std::span<const double> b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

// Max |(U^T U - I)_ij|.
inline double orthonormality_defect(const Matrix& u) {
  double worst = 0.0;
  for (std::size_t a = 0; a < u.cols(); ++a) {
    for (std::size_t b = 0; b < u.cols(); ++b) {
      double s = 0.0;
      for (std::size_t i = 0; i < u.rows(); ++i) s += u(i, a) * u(i, b);
      worst = std::max(worst, std::abs(s - (a == b ? 1.0 : 0.0)));
    }
  }
  return worst;
}

// Values drawn from a small set of levels so windows contain repeated labels,
// with roughly `hole_fraction` of the cells set to nodata.
inline Raster random_label_raster(Rng& rng, std::size_t rows, std::size_t cols, std::size_t levels,
                                  double hole_fraction) {
  Raster r(rows, cols);
  for (double& v : r.values()) {
    if (rng.uniform(0.0, 1.0) < hole_fraction) {
      v = r.nodata();
    } else {
      v = static_cast<double>(rng.index(0, levels - 1)) / static_cast<double>(levels) - 0.3;
    }
  }
  return r;
}

}  // namespace tbtest
