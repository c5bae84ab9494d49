#pragma once

// Batch pipeline: compress band stacks, derive NDVI, compute index maps and
// compare approximated maps against the uncompressed baseline.
//
// Output tree under PipelineConfig::out:
//   compressed/<id>.<variant>.tuck      one per (image, rank)
//   compressed/storage.{json,csv}       storage cost per (image, rank)
//   ndvi/<id>.raw.ras                   NDVI of the raw bands
//   ndvi/<id>.<variant>.ras             NDVI of the reconstructed bands
//   index/<id>.<tag>.<index>.ras        index map, tag = raw or variant
//   index/<id>.<tag>.<index>.json       sidecar with the index parameters
//   reports/compare.<variant>.json      error report (schemas/error_report.schema.json)
//   reports/compare.<variant>.csv       records; .stats.csv holds the statistics
//   reports/summary.{json,csv}          one statistics row per variant
//
// <variant> is "<t|st>.<layout>.r<r1>x<r2>x<r3>", e.g. "st.red-dup.r10x10x2".
//
// Config file: TOML-style "key = value" lines, '#' comments, values written
// as JSON scalars or single-line arrays. Top-level keys:
//   out, layout, method, ranks, rank, st_order, window, border, index,
//   alpha, base, distance, threads, nodata, denominator
// and one section per image:
//   [image.<id>]
//   red = "path"
//   nir = "path"
// Relative paths resolve against the config file's directory.

#include <cstddef>
#include <filesystem>
#include <numbers>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "tensorbio/analysis.hpp"
#include "tensorbio/biodiv.hpp"
#include "tensorbio/hosvd.hpp"
#include "tensorbio/raster.hpp"

namespace tensorbio {

class ConfigError : public std::runtime_error {
 public:
  ConfigError(const std::string& what, std::size_t line)
      : std::runtime_error(line == 0 ? what : "line " + std::to_string(line) + ": " + what),
        line_(line) {}

  // 1-based; 0 when the error is not tied to a line.
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

struct ImageInput {
  std::string id;
  std::filesystem::path red;
  std::filesystem::path nir;
};

enum class IndexKind { Rao, Renyi };

struct PipelineConfig {
  std::vector<ImageInput> images;
  BandLayout layout = BandLayout::RedDup;
  Method method = Method::StHosvd;
  std::vector<MultilinearRank> ranks = default_ranks();
  // ST-HOSVD mode order, zero-based; empty means natural order.
  std::vector<std::size_t> st_order;
  WindowSpec window;
  IndexKind index = IndexKind::Rao;
  double alpha = 2.0;
  double base = std::numbers::e;
  std::string distance = "euclidean";
  unsigned threads = 0;
  double nodata = kDefaultNodata;
  PixelDenominator denominator = PixelDenominator::SharedValid;
  std::filesystem::path out = "out";

  // (i, i, 2) for i in {10, 50, 100, 500, 1000}.
  static std::vector<MultilinearRank> default_ranks();
};

PipelineConfig parse_config(std::string_view text, const std::filesystem::path& base_dir = {});
PipelineConfig load_config(const std::filesystem::path& path);

// Throws ConfigError on invalid settings. Returns warnings for settings that
// are accepted but unusual (third rank component other than 2).
std::vector<std::string> validate_config(const PipelineConfig& config);

// "r1,r2,r3" -> rank. Throws ConfigError.
MultilinearRank parse_rank(std::string_view text);

std::string variant_name(Method method, BandLayout layout, const MultilinearRank& rank);
std::string_view index_name(IndexKind kind) noexcept;

struct BatchResult {
  std::vector<std::string> errors;    // one per failed item
  std::vector<std::string> warnings;
  std::vector<std::filesystem::path> outputs;

  bool ok() const noexcept { return errors.empty(); }
  void merge(BatchResult other);
};

BatchResult cmd_compress(const PipelineConfig& config);
BatchResult cmd_ndvi(const PipelineConfig& config);
BatchResult cmd_index(const PipelineConfig& config);
BatchResult cmd_compare(const PipelineConfig& config);
// Rebuilds reports/summary.* from the reports/compare.*.json files of the
// configured variants, validating each against the report schema.
BatchResult cmd_report(const PipelineConfig& config);
// All of the above in order.
BatchResult cmd_run(const PipelineConfig& config);

}  // namespace tensorbio
