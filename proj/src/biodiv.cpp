#include "tensorbio/biodiv.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <stdexcept>
#include <thread>

namespace tensorbio {
namespace {

double euclidean(double a, double b) { return std::abs(a - b); }
double discrete(double a, double b) { return a == b ? 0.0 : 1.0; }

struct Registry {
  std::mutex mu;
  std::map<std::string, DistanceFn, std::less<>> fns{{"euclidean", &euclidean},
                                                      {"discrete", &discrete}};
};

Registry& registry() {
  static Registry r;
  return r;
}

struct WindowBounds {
  std::size_t r0, r1, c0, c1;  // half-open
};

WindowBounds bounds_for(const Raster& r, std::size_t row, std::size_t col, const WindowSpec& spec) {
  const std::size_t w = spec.half();
  return {row >= w ? row - w : 0, std::min(r.rows(), row + w + 1), col >= w ? col - w : 0,
          std::min(r.cols(), col + w + 1)};
}

bool center_computed(const Raster& r, std::size_t row, std::size_t col, const WindowSpec& spec) {
  if (spec.border == Border::Shrink) return true;
  const std::size_t w = spec.half();
  return row >= w && col >= w && row + w < r.rows() && col + w < r.cols();
}

// Fills `table` reusing `scratch`.
void collect(const Raster& r, const WindowBounds& b, std::vector<double>& scratch, AbundanceTable& table) {
  scratch.clear();
  for (std::size_t i = b.r0; i < b.r1; ++i) {
    for (std::size_t j = b.c0; j < b.c1; ++j) {
      const double v = r(i, j);
      if (!r.is_missing(v)) scratch.push_back(v);
    }
  }
  std::sort(scratch.begin(), scratch.end());
  table.labels.clear();
  table.counts.clear();
  table.total = scratch.size();
  for (double v : scratch) {
    if (!table.labels.empty() && table.labels.back() == v) {
      ++table.counts.back();
    } else {
      table.labels.push_back(v);
      table.counts.push_back(1);
    }
  }
}

unsigned resolve_threads(unsigned threads) {
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  return threads;
}

// Evaluates cell(table) at every computed center. Rows are split
// into contiguous blocks, one per worker.
template <typename CellFn>
Raster compute_map(const Raster& r, const WindowSpec& spec, unsigned threads, CellFn cell) {
  Raster out(r.rows(), r.cols(), r.nodata());
  std::fill(out.values().begin(), out.values().end(), r.nodata());

  auto work = [&](std::size_t row_begin, std::size_t row_end) {
    std::vector<double> scratch;
    scratch.reserve(spec.side * spec.side);
    AbundanceTable table;
    for (std::size_t i = row_begin; i < row_end; ++i) {
      for (std::size_t j = 0; j < r.cols(); ++j) {
        if (!center_computed(r, i, j, spec)) continue;
        collect(r, bounds_for(r, i, j, spec), scratch, table);
        out(i, j) = cell(table);
      }
    }
  };

  const std::size_t workers = std::min<std::size_t>(resolve_threads(threads), r.rows());
  if (workers <= 1) {
    work(0, r.rows());
    return out;
  }
  {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    const std::size_t block = (r.rows() + workers - 1) / workers;
    for (std::size_t t = 0; t < workers; ++t) {
      const std::size_t begin = t * block;
      const std::size_t end = std::min(r.rows(), begin + block);
      if (begin >= end) break;
      pool.emplace_back(work, begin, end);
    }
  }
  return out;
}

}  // namespace

std::string_view border_name(Border b) noexcept {
  return b == Border::InteriorMissing ? "interior" : "shrink";
}

void WindowSpec::validate() const {
  if (side < 3 || side % 2 == 0) {
    throw std::invalid_argument("window side must be odd and >= 3, got " + std::to_string(side));
  }
}

AbundanceTable window_abundances(const Raster& r, std::size_t row, std::size_t col, const WindowSpec& spec) {
  spec.validate();
  if (row >= r.rows() || col >= r.cols() || !center_computed(r, row, col, spec)) {
    throw std::invalid_argument("window center (" + std::to_string(row) + ", " + std::to_string(col) +
                                ") is outside the domain of the '" + std::string(border_name(spec.border)) +
                                "' border policy");
  }
  std::vector<double> scratch;
  AbundanceTable table;
  collect(r, bounds_for(r, row, col, spec), scratch, table);
  return table;
}

DistanceFn find_distance(std::string_view name) {
  auto& reg = registry();
  std::lock_guard lock(reg.mu);
  const auto it = reg.fns.find(name);
  if (it == reg.fns.end()) throw std::invalid_argument("unknown distance '" + std::string(name) + "'");
  return it->second;
}

void register_distance(std::string name, DistanceFn fn) {
  if (fn == nullptr) throw std::invalid_argument("register_distance: null function");
  auto& reg = registry();
  std::lock_guard lock(reg.mu);
  reg.fns[std::move(name)] = fn;
}

std::vector<std::string> distance_names() {
  auto& reg = registry();
  std::lock_guard lock(reg.mu);
  std::vector<std::string> names;
  for (const auto& [name, fn] : reg.fns) names.push_back(name);
  return names;
}

double rao_q(const AbundanceTable& table, DistanceFn distance, double missing) {
  if (table.empty()) return missing;
  if (table.labels.size() == 1) return 0.0;
  const double total = static_cast<double>(table.total);
  const std::size_t k = table.labels.size();
  // Upper triangle only; the ordered-pair sum is twice this.
  double acc = 0.0;
  for (std::size_t i = 0; i < k; ++i) {
    const double pi = static_cast<double>(table.counts[i]) / total;
    for (std::size_t j = i + 1; j < k; ++j) {
      const double pj = static_cast<double>(table.counts[j]) / total;
      acc += pi * pj * distance(table.labels[i], table.labels[j]);
    }
  }
  return 2.0 * acc;
}

void validate_renyi_params(double alpha, double base) {
  if (!(alpha > 0.0) || alpha == 1.0 || !std::isfinite(alpha)) {
    throw std::invalid_argument("renyi alpha must be positive, finite and != 1");
  }
  if (!(base > 1.0) || !std::isfinite(base)) throw std::invalid_argument("renyi base must be > 1");
}

double renyi(const AbundanceTable& table, double alpha, double base, double missing) {
  if (table.empty()) return missing;
  const double total = static_cast<double>(table.total);
  double sum = 0.0;
  for (std::size_t c : table.counts) sum += std::pow(static_cast<double>(c) / total, alpha);
  const double log_sum = std::log(sum);
  if (log_sum == 0.0) return 0.0;
  return (1.0 / (1.0 - alpha)) * log_sum / std::log(base);
}

IndexMap rao_q(const Raster& r, const WindowSpec& spec, std::string_view distance, unsigned threads) {
  spec.validate();
  const DistanceFn fn = find_distance(distance);
  const double missing = r.nodata();
  IndexMap map;
  map.index = "rao";
  map.distance = std::string(distance);
  map.window = spec;
  map.values = compute_map(r, spec, threads,
                           [&](const AbundanceTable& t) { return rao_q(t, fn, missing); });
  return map;
}

IndexMap renyi(const Raster& r, const WindowSpec& spec, double alpha, double base, unsigned threads) {
  spec.validate();
  validate_renyi_params(alpha, base);
  const double missing = r.nodata();
  IndexMap map;
  map.index = "renyi";
  map.alpha = alpha;
  map.base = base;
  map.window = spec;
  map.values = compute_map(r, spec, threads,
                           [&](const AbundanceTable& t) { return renyi(t, alpha, base, missing); });
  return map;
}

}  // namespace tensorbio
