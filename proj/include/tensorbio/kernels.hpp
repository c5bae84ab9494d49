#pragma once

// Data-parallel inner loops shared by the tensor, SVD, raster and analysis
// code. Every kernel has a portable scalar reference implementation and, on
// x86-64, an AVX2/FMA variant. The variant is picked once at startup from the
// CPU feature flags; set_isa() lets tests pin a specific one.
//
// The reductions (dot, sum_squares, sum_squared_diff) use a fixed blocking per
// ISA, so results are reproducible for a given ISA but may differ from the
// scalar reference in the last few ulps. ndvi() is element-wise and bit-exact
// across ISAs.

#include <cstddef>
#include <span>
#include <string_view>

namespace tensorbio::kernels {

enum class Isa { Scalar, Avx2 };

std::string_view isa_name(Isa isa) noexcept;

// True if the running CPU can execute the given variant.
bool isa_supported(Isa isa) noexcept;

// Best variant for this CPU.
Isa best_isa() noexcept;

Isa active_isa() noexcept;

// Throws std::invalid_argument if the variant is not supported here.
void set_isa(Isa isa);

struct NdviParams {
  double red_nodata;
  double nir_nodata;
  double missing;
};

double dot(std::span<const double> a, std::span<const double> b);
void axpy(double alpha, std::span<const double> x, std::span<double> y);
double sum_squares(std::span<const double> x);
double sum_squared_diff(std::span<const double> a, std::span<const double> b);

// out[i] = (nir[i] - red[i]) / (nir[i] + red[i]), or params.missing where the
// sum is zero or either input equals its nodata sentinel.
void ndvi(std::span<const double> red, std::span<const double> nir,
          std::span<double> out, const NdviParams& params);

// Raw per-ISA entry points, exposed for equivalence tests and benchmarks.
namespace scalar {
double dot(const double* a, const double* b, std::size_t n) noexcept;
void axpy(double alpha, const double* x, double* y, std::size_t n) noexcept;
double sum_squares(const double* x, std::size_t n) noexcept;
double sum_squared_diff(const double* a, const double* b, std::size_t n) noexcept;
void ndvi(const double* red, const double* nir, double* out, std::size_t n,
          const NdviParams& params) noexcept;
}  // namespace scalar

namespace avx2 {
double dot(const double* a, const double* b, std::size_t n) noexcept;
void axpy(double alpha, const double* x, double* y, std::size_t n) noexcept;
double sum_squares(const double* x, std::size_t n) noexcept;
double sum_squared_diff(const double* a, const double* b, std::size_t n) noexcept;
void ndvi(const double* red, const double* nir, double* out, std::size_t n,
          const NdviParams& params) noexcept;
}  // namespace avx2

}  // namespace tensorbio::kernels
