#pragma once

// Truncated (T-HOSVD) and sequentially truncated (ST-HOSVD) higher-order SVD,
// reconstruction, error accounting and storage cost of the Tucker format.
//
// A Tucker representation stores orthonormal factors U_i (n_i x r_i) and a
// core C (r_1 x ... x r_d); the approximation is (U_1, ..., U_d) . C.

#include <cstddef>
#include <cstdint>
#include <string_view>
#include <vector>

#include "tensorbio/tensor.hpp"

namespace tensorbio {

using MultilinearRank = std::vector<std::size_t>;

enum class Method : std::uint8_t { THosvd = 1, StHosvd = 2 };

std::string_view method_name(Method m) noexcept;

struct TuckerFactors {
  Method method = Method::THosvd;
  // Mode processing order. Identity for T-HOSVD.
  std::vector<std::size_t> processing_order;
  Tensor core;
  std::vector<Matrix> factors;
  // ST-HOSVD only: energy ||C_{i-1}||^2 - ||C_i||^2 removed at each step, in
  // processing order. Their sum is the squared approximation error.
  std::vector<double> step_energy;

  std::vector<std::size_t> dims() const;
  MultilinearRank rank() const;
};

// Throws std::invalid_argument unless rank has one entry per mode with
// 1 <= r_i <= n_i.
void validate_rank(const std::vector<std::size_t>& dims, const MultilinearRank& rank);

TuckerFactors t_hosvd(const Tensor& t, const MultilinearRank& rank);

// Empty order means natural order 0, 1, ..., d-1.
TuckerFactors st_hosvd(const Tensor& t, const MultilinearRank& rank,
                       std::vector<std::size_t> order = {});

Tensor reconstruct(const TuckerFactors& f);

// ||t - reconstruct(f)||_F
double exact_error(const Tensor& t, const TuckerFactors& f);

// sqrt( sum_i sum_{j > r_i} sigma_j(unfold(t, i))^2 ); dominates the exact
// error of both algorithms at the same rank.
double error_upper_bound(const Tensor& t, const MultilinearRank& rank);

struct StorageCost {
  std::uint64_t units = 0;  // sum n_i r_i + prod r_i stored scalars
  double relative_ratio = 0.0;
  double absolute_ratio = 0.0;

  // Both ratios in (0, 1].
  bool compresses() const noexcept {
    return relative_ratio > 0.0 && relative_ratio <= 1.0 && absolute_ratio > 0.0 &&
           absolute_ratio <= 1.0;
  }
};

StorageCost storage_cost(const std::vector<std::size_t>& dims, const MultilinearRank& rank,
                         std::uint64_t relative_denominator, std::uint64_t absolute_denominator);

// Band-stack accounting: relative to one RED plus one NIR raster
// (rows * cols * 2), absolute relative to the three-slice stack
// (rows * cols * 3).
StorageCost band_storage_cost(std::size_t rows, std::size_t cols, const MultilinearRank& rank);

}  // namespace tensorbio
