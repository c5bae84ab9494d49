#include "tensorbio/kernels.hpp"

namespace tensorbio::kernels::scalar {

double dot(const double* a, const double* b, std::size_t n) noexcept {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc += a[i] * b[i];
  return acc;
}

void axpy(double alpha, const double* x, double* y, std::size_t n) noexcept {
  for (std::size_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

double sum_squares(const double* x, std::size_t n) noexcept {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc += x[i] * x[i];
  return acc;
}

double sum_squared_diff(const double* a, const double* b, std::size_t n) noexcept {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double d = a[i] - b[i];
    acc += d * d;
  }
  return acc;
}

void ndvi(const double* red, const double* nir, double* out, std::size_t n,
          const NdviParams& params) noexcept {
  for (std::size_t i = 0; i < n; ++i) {
    const double sum = nir[i] + red[i];
    if (red[i] == params.red_nodata || nir[i] == params.nir_nodata || sum == 0.0) {
      out[i] = params.missing;
    } else {
      out[i] = (nir[i] - red[i]) / sum;
    }
  }
}

}  // namespace tensorbio::kernels::scalar
