#pragma once

// Moving-window biodiversity indices over index rasters (typically NDVI).
//
// Every window center gets the distinct non-missing values in its window and
// their counts. Distinct floating-point values are distinct labels; there is
// no binning. Missing cells (nodata or NaN) are dropped before counting.
//
//   Rao's Q:  Q = sum_{i != j} p_i p_j d(l_i, l_j)
//   Renyi:    H = log(sum_i p_i^alpha) / ((1 - alpha) * log(base))
//
// An empty window yields the raster's nodata value. A single label yields 0.

#include <cstddef>
#include <numbers>
#include <string>
#include <string_view>
#include <vector>

#include "tensorbio/raster.hpp"

namespace tensorbio {

enum class Border {
  // Only centers whose full window fits inside the raster are computed; the
  // frame of width (side - 1) / 2 is missing.
  InteriorMissing,
  // Every cell is computed with the window clipped to the raster.
  Shrink,
};

std::string_view border_name(Border b) noexcept;

struct WindowSpec {
  std::size_t side = 11;
  Border border = Border::InteriorMissing;

  std::size_t half() const noexcept { return (side - 1) / 2; }
  // Throws std::invalid_argument unless side is odd and >= 3.
  void validate() const;

  friend bool operator==(const WindowSpec&, const WindowSpec&) = default;
};

struct AbundanceTable {
  std::vector<double> labels;        // strictly increasing
  std::vector<std::size_t> counts;   // parallel to labels, all >= 1
  std::size_t total = 0;

  bool empty() const noexcept { return labels.empty(); }
};

// Counts over the window centered at (row, col). Throws std::invalid_argument
// for centers outside the domain of the border policy.
AbundanceTable window_abundances(const Raster& r, std::size_t row, std::size_t col,
                                 const WindowSpec& spec);

// Symmetric distance with d(x, x) = 0.
using DistanceFn = double (*)(double, double);

// Built in: "euclidean" (|a - b|) and "discrete" (0 if equal, else 1).
DistanceFn find_distance(std::string_view name);
void register_distance(std::string name, DistanceFn fn);
std::vector<std::string> distance_names();

double rao_q(const AbundanceTable& table, DistanceFn distance, double missing);
double renyi(const AbundanceTable& table, double alpha, double base, double missing);

// Throws std::invalid_argument for alpha <= 0, alpha == 1, or base <= 1.
void validate_renyi_params(double alpha, double base);

struct IndexMap {
  Raster values;
  std::string index;     // "rao" or "renyi"
  std::string distance;  // rao only
  double alpha = 0.0;    // renyi only
  double base = 0.0;     // renyi only
  WindowSpec window;
};

// threads = 0 uses std::thread::hardware_concurrency(). Output does not depend
// on the thread count: each worker owns whole output rows.
IndexMap rao_q(const Raster& r, const WindowSpec& spec, std::string_view distance = "euclidean",
               unsigned threads = 0);
IndexMap renyi(const Raster& r, const WindowSpec& spec, double alpha = 2.0,
               double base = std::numbers::e, unsigned threads = 0);

}  // namespace tensorbio
