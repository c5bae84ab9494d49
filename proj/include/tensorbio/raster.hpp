#pragma once

// Single-band rasters, NDVI, and the three-slice band stacks that get
// compressed.
//
// RAS1 file format (little-endian, no padding):
//   offset 0   4 bytes  magic "RAS1"
//   offset 4   u32      rows
//   offset 8   u32      cols
//   offset 12  u8       dtype code: 1 = int16, 2 = float64
//   offset 13  f64      nodata
//   offset 21  payload  rows*cols values, row-major
//
// CSV: one raster row per line, comma-separated; an optional first line
// "# nodata=<v>" sets the sentinel.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "tensorbio/tensor.hpp"

namespace tensorbio {

inline constexpr double kDefaultNodata = -3000.0;

enum class DType : std::uint8_t { Int16 = 1, Float64 = 2 };

class Raster {
 public:
  Raster() = default;
  Raster(std::size_t rows, std::size_t cols, double nodata = kDefaultNodata,
         DType dtype = DType::Float64);
  Raster(std::size_t rows, std::size_t cols, std::vector<double> values,
         double nodata = kDefaultNodata, DType dtype = DType::Float64);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  std::size_t size() const noexcept { return values_.size(); }
  double nodata() const noexcept { return nodata_; }
  DType dtype() const noexcept { return dtype_; }
  void set_dtype(DType dtype) noexcept { dtype_ = dtype; }

  double& operator()(std::size_t r, std::size_t c) noexcept { return values_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const noexcept { return values_[r * cols_ + c]; }

  std::span<double> values() noexcept { return values_; }
  std::span<const double> values() const noexcept { return values_; }

  // Equal to the nodata sentinel, or NaN.
  bool is_missing(double v) const noexcept { return v == nodata_ || v != v; }

  friend bool operator==(const Raster&, const Raster&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> values_;
  double nodata_ = kDefaultNodata;
  DType dtype_ = DType::Float64;
};

// Cellwise (nir - red) / (nir + red). Cells where the sum is zero, or where
// either band holds its own nodata value, become `missing`.
Raster ndvi(const Raster& red, const Raster& nir, double missing = kDefaultNodata);

// Slice assignment of the (rows, cols, 3) stack. Slice indices are zero-based
// below (slice k is tensor(:, :, k)).
//   RedDup:     0 = RED,  1 = RED, 2 = NIR
//   NirDup:     0 = NIR,  1 = RED, 2 = NIR
//   NdviRedNir: 0 = NDVI, 1 = RED, 2 = NIR
// In every layout slices 1 and 2 hold RED and NIR, which is where
// extract_bands reads them from.
enum class BandLayout { RedDup, NirDup, NdviRedNir };

std::string_view layout_name(BandLayout layout) noexcept;

struct BandStack {
  Tensor tensor;
  BandLayout layout = BandLayout::RedDup;
  double nodata = kDefaultNodata;
};

BandStack stack_bands(const Raster& red, const Raster& nir, BandLayout layout);
// For NdviRedNir; the other layouts ignore `ndvi_raster`.
BandStack stack_bands(const Raster& red, const Raster& nir, const Raster& ndvi_raster,
                      BandLayout layout);

// (RED, NIR) read from slices 1 and 2. Works on reconstructed stacks too,
// where the two copies of a duplicated band generally no longer agree.
std::pair<Raster, Raster> extract_bands(const BandStack& stack);

// Raw (rows, cols, 3) tensor variant, e.g. straight out of reconstruct().
std::pair<Raster, Raster> extract_bands(const Tensor& stack, double nodata = kDefaultNodata);

std::string encode_raster(const Raster& r);
Raster decode_raster(std::string_view bytes);

void write_raster(const Raster& r, const std::filesystem::path& path);
Raster read_raster(const std::filesystem::path& path);

Raster parse_raster_csv(std::string_view text, double default_nodata = kDefaultNodata);
std::string format_raster_csv(const Raster& r);
Raster read_raster_csv(const std::filesystem::path& path, double default_nodata = kDefaultNodata);
void write_raster_csv(const Raster& r, const std::filesystem::path& path);

// Picks RAS1 or CSV by extension (".csv" is CSV, anything else RAS1).
Raster load_raster(const std::filesystem::path& path, double default_nodata = kDefaultNodata);

// Deterministic smooth RED/NIR scene with continuous (non-integer) values and
// no nodata cells. Used for demos and end-to-end tests.
std::pair<Raster, Raster> synthetic_scene(std::size_t rows, std::size_t cols, std::uint64_t seed);

}  // namespace tensorbio
