#include "tensorbio/hosvd.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

#include "tensorbio/kernels.hpp"
#include "tensorbio/tsvd.hpp"

namespace tensorbio {
namespace {

std::string join(const std::vector<std::size_t>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) s += ",";
    s += std::to_string(v[i]);
  }
  return s;
}

void validate_order(std::size_t d, const std::vector<std::size_t>& order) {
  std::vector<bool> seen(d, false);
  bool ok = order.size() == d;
  for (std::size_t m : order) {
    if (!ok) break;
    ok = m < d && !seen[m];
    if (ok) seen[m] = true;
  }
  if (!ok) {
    throw std::invalid_argument("processing order (" + join(order) + ") is not a permutation of " +
                                std::to_string(d) + " modes");
  }
}

// A projection cannot grow the norm; anything else means the factors are broken.
void check_core_contracts(const Tensor& original, const Tensor& core) {
  const double orig = squared_norm(original);
  const double c = squared_norm(core);
  if (c > orig * (1.0 + 1e-10) + 1e-300) {
    throw std::logic_error("core norm exceeds input norm; factors are not orthonormal");
  }
}

// Leading k left singular vectors of m. When k exceeds the number of columns
// the SVD yields min(rows, cols) vectors; the rest is an orthonormal completion
// built by pivoted Gram-Schmidt against the standard basis, so the factor still has k
// orthonormal columns and the projection stays exact.
Matrix leading_basis(const Matrix& m, std::size_t k) {
  const std::size_t avail = std::min(m.rows(), m.cols());
  if (k <= avail) return dominant_left_singular_vectors(m, k);
  const Matrix head = dominant_left_singular_vectors(m, avail);
  const std::size_t n = m.rows();
  std::vector<std::vector<double>> cols;
  cols.reserve(k);
  for (std::size_t j = 0; j < avail; ++j) {
    std::vector<double> c(n);
    for (std::size_t i = 0; i < n; ++i) c[i] = head(i, j);
    cols.push_back(std::move(c));
  }
  auto residual = [&](std::size_t e) {
    std::vector<double> c(n, 0.0);
    c[e] = 1.0;
    for (int pass = 0; pass < 2; ++pass) {
      for (const auto& q : cols) {
        double dot = 0.0;
        for (std::size_t i = 0; i < n; ++i) dot += q[i] * c[i];
        for (std::size_t i = 0; i < n; ++i) c[i] -= dot * q[i];
      }
    }
    return c;
  };
  // Pivot on the basis vector with the largest residual; ties go to the lowest index.
  while (cols.size() < k) {
    std::vector<double> best;
    double best_norm = -1.0;
    for (std::size_t e = 0; e < n; ++e) {
      std::vector<double> c = residual(e);
      double norm = 0.0;
      for (double x : c) norm += x * x;
      if (norm > best_norm) {
        best_norm = norm;
        best = std::move(c);
      }
    }
    const double scale = 1.0 / std::sqrt(best_norm);
    for (double& x : best) x *= scale;
    cols.push_back(std::move(best));
  }
  Matrix u(n, k);
  for (std::size_t j = 0; j < k; ++j) {
    for (std::size_t i = 0; i < n; ++i) u(i, j) = cols[j][i];
  }
  return u;
}

}  // namespace

std::string_view method_name(Method m) noexcept {
  return m == Method::THosvd ? "t-hosvd" : "st-hosvd";
}

std::vector<std::size_t> TuckerFactors::dims() const {
  std::vector<std::size_t> d;
  d.reserve(factors.size());
  for (const auto& f : factors) d.push_back(f.rows());
  return d;
}

MultilinearRank TuckerFactors::rank() const {
  MultilinearRank r;
  r.reserve(factors.size());
  for (const auto& f : factors) r.push_back(f.cols());
  return r;
}

void validate_rank(const std::vector<std::size_t>& dims, const MultilinearRank& rank) {
  bool ok = rank.size() == dims.size();
  for (std::size_t i = 0; ok && i < rank.size(); ++i) ok = rank[i] >= 1 && rank[i] <= dims[i];
  if (!ok) {
    throw std::invalid_argument("multilinear rank (" + join(rank) + ") is invalid for dims (" +
                                join(dims) + ")");
  }
}

TuckerFactors t_hosvd(const Tensor& t, const MultilinearRank& rank) {
  validate_rank(t.dims(), rank);
  const std::size_t d = t.order();
  TuckerFactors f;
  f.method = Method::THosvd;
  f.processing_order.resize(d);
  std::iota(f.processing_order.begin(), f.processing_order.end(), std::size_t{0});
  f.factors.reserve(d);
  for (std::size_t i = 0; i < d; ++i) {
    f.factors.push_back(leading_basis(unfold(t, i), rank[i]));
  }
  std::vector<std::pair<Matrix, std::size_t>> projections;
  projections.reserve(d);
  for (std::size_t i = 0; i < d; ++i) projections.emplace_back(f.factors[i].transpose(), i);
  f.core = multi_mode_dot(t, projections);
  check_core_contracts(t, f.core);
  return f;
}

TuckerFactors st_hosvd(const Tensor& t, const MultilinearRank& rank, std::vector<std::size_t> order) {
  validate_rank(t.dims(), rank);
  const std::size_t d = t.order();
  if (order.empty()) {
    order.resize(d);
    std::iota(order.begin(), order.end(), std::size_t{0});
  }
  validate_order(d, order);

  TuckerFactors f;
  f.method = Method::StHosvd;
  f.processing_order = order;
  f.factors.resize(d);
  f.step_energy.reserve(d);
  Tensor core = t;
  double energy = squared_norm(core);
  for (std::size_t mode : order) {
    Matrix u = leading_basis(unfold(core, mode), rank[mode]);
    core = mode_dot(core, u.transpose(), mode);
    const double next = squared_norm(core);
    f.step_energy.push_back(energy - next);
    energy = next;
    f.factors[mode] = std::move(u);
  }
  f.core = std::move(core);
  check_core_contracts(t, f.core);
  return f;
}

Tensor reconstruct(const TuckerFactors& f) {
  if (f.factors.size() != f.core.order()) {
    throw std::invalid_argument("reconstruct: factor count does not match core order");
  }
  // Expand the modes with the smallest growth first to keep intermediates small.
  std::vector<std::size_t> modes(f.factors.size());
  std::iota(modes.begin(), modes.end(), std::size_t{0});
  std::stable_sort(modes.begin(), modes.end(), [&](std::size_t a, std::size_t b) {
    return f.factors[a].rows() * f.factors[b].cols() < f.factors[b].rows() * f.factors[a].cols();
  });
  Tensor out = f.core;
  for (std::size_t mode : modes) out = mode_dot(out, f.factors[mode], mode);
  return out;
}

double exact_error(const Tensor& t, const TuckerFactors& f) {
  const Tensor approx = reconstruct(f);
  if (approx.dims() != t.dims()) {
    throw std::invalid_argument("exact_error: factor dims do not match the tensor");
  }
  return std::sqrt(kernels::sum_squared_diff(t.data(), approx.data()));
}

double error_upper_bound(const Tensor& t, const MultilinearRank& rank) {
  validate_rank(t.dims(), rank);
  double total = 0.0;
  for (std::size_t i = 0; i < t.order(); ++i) {
    const std::vector<double> sigma = full_singular_values(unfold(t, i));
    for (std::size_t j = rank[i]; j < sigma.size(); ++j) total += sigma[j] * sigma[j];
  }
  return std::sqrt(total);
}

StorageCost storage_cost(const std::vector<std::size_t>& dims, const MultilinearRank& rank,
                         std::uint64_t relative_denominator, std::uint64_t absolute_denominator) {
  if (relative_denominator == 0 || absolute_denominator == 0) {
    throw std::invalid_argument("storage_cost: denominators must be positive");
  }
  validate_rank(dims, rank);
  std::uint64_t factors = 0;
  std::uint64_t core = 1;
  for (std::size_t i = 0; i < dims.size(); ++i) {
    factors += static_cast<std::uint64_t>(dims[i]) * rank[i];
    core *= rank[i];
  }
  StorageCost cost;
  cost.units = factors + core;
  cost.relative_ratio = static_cast<double>(cost.units) / static_cast<double>(relative_denominator);
  cost.absolute_ratio = static_cast<double>(cost.units) / static_cast<double>(absolute_denominator);
  return cost;
}

StorageCost band_storage_cost(std::size_t rows, std::size_t cols, const MultilinearRank& rank) {
  const std::uint64_t plane = static_cast<std::uint64_t>(rows) * cols;
  return storage_cost({rows, cols, 3}, rank, plane * 2, plane * 3);
}

}  // namespace tensorbio
