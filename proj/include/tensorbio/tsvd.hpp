#pragma once

// Deterministic truncated SVD for flattenings.
//
// The Gram matrix of the shorter side (m m^T or m^T m) is diagonalized with a
// dense symmetric eigensolver. Singular vectors on that side come straight from
// the eigenvectors; vectors on the long side are obtained by projecting m and
// re-orthonormalizing with a Householder QR, so both factors are orthonormal to
// working precision even when trailing singular values are tiny or zero.
//
// Sign convention: each column of u has its largest-magnitude entry positive
// (first such entry on ties); the matching column of v is flipped with it.

#include <cstddef>
#include <vector>

#include "tensorbio/tensor.hpp"

namespace tensorbio {

struct TruncatedSvd {
  Matrix u;                             // rows x k, orthonormal columns
  std::vector<double> singular_values;  // k values, nonincreasing, >= 0
  Matrix v;                             // cols x k, orthonormal columns
};

// k dominant singular triplets. Requires 1 <= k <= min(rows, cols).
TruncatedSvd truncated_svd(const Matrix& m, std::size_t k);

// Same as truncated_svd(m, k).u, without forming v when it is not needed.
Matrix dominant_left_singular_vectors(const Matrix& m, std::size_t k);

// All min(rows, cols) singular values, nonincreasing.
std::vector<double> full_singular_values(const Matrix& m);

// m m^T and m^T m.
Matrix gram_rows(const Matrix& m);
Matrix gram_cols(const Matrix& m);

}  // namespace tensorbio
