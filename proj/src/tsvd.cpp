#include "tensorbio/tsvd.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "tensorbio/kernels.hpp"

namespace tensorbio {
namespace {

using RowMajorMap = Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>;

struct ShortSide {
  Eigen::MatrixXd vectors;     // s x s, columns ordered by decreasing eigenvalue
  std::vector<double> sigma;   // s singular values, nonincreasing
};

ShortSide short_side_eigen(const Matrix& m, bool row_side) {
  const Matrix g = row_side ? gram_rows(m) : gram_cols(m);
  const RowMajorMap gm(g.data().data(), static_cast<Eigen::Index>(g.rows()),
                       static_cast<Eigen::Index>(g.cols()));
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(gm);
  if (solver.info() != Eigen::Success) {
    throw std::runtime_error("symmetric eigensolver failed on a " + std::to_string(g.rows()) +
                             "x" + std::to_string(g.cols()) + " Gram matrix");
  }
  const Eigen::Index s = gm.rows();
  ShortSide out;
  out.vectors = solver.eigenvectors().rowwise().reverse();
  out.sigma.resize(static_cast<std::size_t>(s));
  const auto& ev = solver.eigenvalues();
  for (Eigen::Index i = 0; i < s; ++i) out.sigma[static_cast<std::size_t>(i)] = std::sqrt(std::max(ev(s - 1 - i), 0.0));
  return out;
}

// True if column j should be negated to make its largest-magnitude entry positive.
bool needs_flip(const Eigen::MatrixXd& cols, Eigen::Index j) {
  Eigen::Index best = 0;
  double best_abs = -1.0;
  for (Eigen::Index i = 0; i < cols.rows(); ++i) {
    const double a = std::abs(cols(i, j));
    if (a > best_abs) {
      best_abs = a;
      best = i;
    }
  }
  return cols(best, j) < 0.0;
}

// Orthonormal basis of the columns of w with diag(R) >= 0, so column j stays
// aligned with w's column j.
Eigen::MatrixXd orthonormalize(const Eigen::MatrixXd& w) {
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(w);
  Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(w.rows(), w.cols());
  const auto& packed = qr.matrixQR();
  for (Eigen::Index j = 0; j < w.cols(); ++j) {
    if (packed(j, j) < 0.0) q.col(j) = -q.col(j);
  }
  return q;
}

Matrix to_matrix(const Eigen::MatrixXd& e) {
  Matrix m(static_cast<std::size_t>(e.rows()), static_cast<std::size_t>(e.cols()));
  for (Eigen::Index r = 0; r < e.rows(); ++r) {
    for (Eigen::Index c = 0; c < e.cols(); ++c) m(static_cast<std::size_t>(r), static_cast<std::size_t>(c)) = e(r, c);
  }
  return m;
}

// m^T u for u with k columns (row_side) or m v (column side), as a long x k matrix.
Eigen::MatrixXd project_long_side(const Matrix& m, const Eigen::MatrixXd& basis, bool row_side) {
  const std::size_t k = static_cast<std::size_t>(basis.cols());
  if (row_side) {
    // rows_j of (k x cols) accumulate sum_r u(r, j) * m.row(r)
    Matrix wt(k, m.cols());
    for (std::size_t r = 0; r < m.rows(); ++r) {
      for (std::size_t j = 0; j < k; ++j) {
        kernels::axpy(basis(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(j)), m.row(r), wt.row(j));
      }
    }
    return RowMajorMap(wt.data().data(), static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(m.cols())).transpose();
  }
  Matrix vt(k, m.cols());
  for (std::size_t j = 0; j < k; ++j) {
    for (std::size_t c = 0; c < m.cols(); ++c) vt(j, c) = basis(static_cast<Eigen::Index>(c), static_cast<Eigen::Index>(j));
  }
  Eigen::MatrixXd w(static_cast<Eigen::Index>(m.rows()), static_cast<Eigen::Index>(k));
  for (std::size_t r = 0; r < m.rows(); ++r) {
    for (std::size_t j = 0; j < k; ++j) w(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(j)) = kernels::dot(m.row(r), vt.row(j));
  }
  return w;
}

void check_rank(const Matrix& m, std::size_t k) {
  const std::size_t limit = std::min(m.rows(), m.cols());
  if (k < 1 || k > limit) {
    throw std::invalid_argument("truncated_svd: k=" + std::to_string(k) + " must lie in [1, " +
                                std::to_string(limit) + "] for a " + std::to_string(m.rows()) +
                                "x" + std::to_string(m.cols()) + " matrix");
  }
}

}  // namespace

Matrix gram_rows(const Matrix& m) {
  Matrix g(m.rows(), m.rows());
  for (std::size_t a = 0; a < m.rows(); ++a) {
    for (std::size_t b = 0; b <= a; ++b) {
      const double v = kernels::dot(m.row(a), m.row(b));
      g(a, b) = v;
      g(b, a) = v;
    }
  }
  return g;
}

Matrix gram_cols(const Matrix& m) {
  Matrix g(m.cols(), m.cols());
  for (std::size_t r = 0; r < m.rows(); ++r) {
    const auto row = m.row(r);
    for (std::size_t a = 0; a < m.cols(); ++a) kernels::axpy(row[a], row, g.row(a));
  }
  return g;
}

TruncatedSvd truncated_svd(const Matrix& m, std::size_t k) {
  check_rank(m, k);
  const bool row_side = m.rows() <= m.cols();
  ShortSide eig = short_side_eigen(m, row_side);
  const auto kk = static_cast<Eigen::Index>(k);
  Eigen::MatrixXd short_vecs = eig.vectors.leftCols(kk);

  Eigen::MatrixXd u;
  Eigen::MatrixXd v;
  if (row_side) {
    for (Eigen::Index j = 0; j < kk; ++j) {
      if (needs_flip(short_vecs, j)) short_vecs.col(j) = -short_vecs.col(j);
    }
    u = std::move(short_vecs);
    v = orthonormalize(project_long_side(m, u, true));
  } else {
    v = std::move(short_vecs);
    u = orthonormalize(project_long_side(m, v, false));
    for (Eigen::Index j = 0; j < kk; ++j) {
      if (needs_flip(u, j)) {
        u.col(j) = -u.col(j);
        v.col(j) = -v.col(j);
      }
    }
  }
  eig.sigma.resize(k);
  return {to_matrix(u), std::move(eig.sigma), to_matrix(v)};
}

Matrix dominant_left_singular_vectors(const Matrix& m, std::size_t k) {
  check_rank(m, k);
  if (m.rows() > m.cols()) return truncated_svd(m, k).u;
  const ShortSide eig = short_side_eigen(m, true);
  Eigen::MatrixXd u = eig.vectors.leftCols(static_cast<Eigen::Index>(k));
  for (Eigen::Index j = 0; j < u.cols(); ++j) {
    if (needs_flip(u, j)) u.col(j) = -u.col(j);
  }
  return to_matrix(u);
}

std::vector<double> full_singular_values(const Matrix& m) {
  if (m.rows() == 0 || m.cols() == 0) return {};
  return short_side_eigen(m, m.rows() <= m.cols()).sigma;
}

}  // namespace tensorbio
