#include <atomic>
#include <stdexcept>
#include <string>

#include "tensorbio/kernels.hpp"

namespace tensorbio::kernels {
namespace {

struct Table {
  double (*dot)(const double*, const double*, std::size_t) noexcept;
  void (*axpy)(double, const double*, double*, std::size_t) noexcept;
  double (*sum_squares)(const double*, std::size_t) noexcept;
  double (*sum_squared_diff)(const double*, const double*, std::size_t) noexcept;
  void (*ndvi)(const double*, const double*, double*, std::size_t, const NdviParams&) noexcept;
  Isa isa;
};

constexpr Table kScalar{&scalar::dot, &scalar::axpy, &scalar::sum_squares,
                        &scalar::sum_squared_diff, &scalar::ndvi, Isa::Scalar};

#ifdef TENSORBIO_HAVE_AVX2
constexpr Table kAvx2{&avx2::dot, &avx2::axpy, &avx2::sum_squares,
                      &avx2::sum_squared_diff, &avx2::ndvi, Isa::Avx2};
#endif

const Table* table_for(Isa isa) noexcept {
#ifdef TENSORBIO_HAVE_AVX2
  if (isa == Isa::Avx2) return &kAvx2;
#endif
  (void)isa;
  return &kScalar;
}

std::atomic<const Table*>& active() noexcept {
  static std::atomic<const Table*> table{table_for(best_isa())};
  return table;
}

void check_same_size(std::size_t a, std::size_t b, const char* what) {
  if (a != b) {
    throw std::invalid_argument(std::string(what) + ": operand lengths differ (" +
                                std::to_string(a) + " vs " + std::to_string(b) + ")");
  }
}

}  // namespace

std::string_view isa_name(Isa isa) noexcept {
  switch (isa) {
    case Isa::Scalar: return "scalar";
    case Isa::Avx2: return "avx2";
  }
  return "unknown";
}

bool isa_supported(Isa isa) noexcept {
  switch (isa) {
    case Isa::Scalar: return true;
    case Isa::Avx2:
#ifdef TENSORBIO_HAVE_AVX2
      return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
      return false;
#endif
  }
  return false;
}

Isa best_isa() noexcept {
  return isa_supported(Isa::Avx2) ? Isa::Avx2 : Isa::Scalar;
}

Isa active_isa() noexcept { return active().load(std::memory_order_acquire)->isa; }

void set_isa(Isa isa) {
  if (!isa_supported(isa)) {
    throw std::invalid_argument("kernel variant '" + std::string(isa_name(isa)) +
                                "' is not supported on this CPU");
  }
  active().store(table_for(isa), std::memory_order_release);
}

double dot(std::span<const double> a, std::span<const double> b) {
  check_same_size(a.size(), b.size(), "dot");
  return active().load(std::memory_order_acquire)->dot(a.data(), b.data(), a.size());
}

void axpy(double alpha, std::span<const double> x, std::span<double> y) {
  check_same_size(x.size(), y.size(), "axpy");
  active().load(std::memory_order_acquire)->axpy(alpha, x.data(), y.data(), x.size());
}

double sum_squares(std::span<const double> x) {
  return active().load(std::memory_order_acquire)->sum_squares(x.data(), x.size());
}

double sum_squared_diff(std::span<const double> a, std::span<const double> b) {
  check_same_size(a.size(), b.size(), "sum_squared_diff");
  return active().load(std::memory_order_acquire)->sum_squared_diff(a.data(), b.data(),
                                                                     a.size());
}

void ndvi(std::span<const double> red, std::span<const double> nir, std::span<double> out,
          const NdviParams& params) {
  check_same_size(red.size(), nir.size(), "ndvi");
  check_same_size(red.size(), out.size(), "ndvi");
  active().load(std::memory_order_acquire)->ndvi(red.data(), nir.data(), out.data(),
                                                 red.size(), params);
}

}  // namespace tensorbio::kernels
