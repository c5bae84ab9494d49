#pragma once

// Errors between index maps and summary statistics over batches of them.
//
// The error between two maps is the Frobenius norm of their difference over
// the cells valid in both; cells missing in either map are excluded and
// counted. The per-pixel error divides it by a pixel count (see
// PixelDenominator).

#include <cstddef>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "tensorbio/biodiv.hpp"
#include "tensorbio/raster.hpp"

namespace tensorbio {

enum class PixelDenominator {
  SharedValid,  // cells valid in both maps (default)
  AllPixels,    // rows * cols
};

struct ErrorRecord {
  std::string image_id;
  double frobenius_error = 0.0;
  double per_pixel_error = 0.0;
  std::size_t valid_pixels = 0;
  std::size_t excluded_pixels = 0;
};

struct ErrorStats {
  double mean_e = 0.0;
  double mean_ep = 0.0;
  double var_e = 0.0;   // unbiased (n - 1)
  double var_ep = 0.0;  // unbiased (n - 1)
  double min_ep = 0.0;
  double max_ep = 0.0;
  std::size_t n = 0;
  // n == 1: variances are reported as 0.
  bool single_record = false;
};

// Throws std::invalid_argument on shape, index or window mismatch.
ErrorRecord map_error(const IndexMap& a, const IndexMap& b, std::string image_id,
                      PixelDenominator denominator = PixelDenominator::SharedValid);
ErrorRecord raster_error(const Raster& a, const Raster& b, std::string image_id,
                         PixelDenominator denominator = PixelDenominator::SharedValid);

// Throws std::invalid_argument for an empty list. Sums run over sorted
// values, so the result does not depend on record order.
ErrorStats summarize(std::span<const ErrorRecord> records);

enum class ReportFormat { Json, Csv };

// Always 17 significant digits, trailing zeros kept ("%#.17g"); non-finite
// values become "null".
std::string format_real(double v);

inline constexpr const char* kReportFormatTag = "tensorbio-error-report/1";

// {"format", "stats", "records", "warnings", "extras"}; reals printed with 17
// significant digits.
std::string report_json(const ErrorStats& stats, std::span<const ErrorRecord> records,
                        const nlohmann::json& extras = nlohmann::json::object());

// Header "image_id,frobenius_error,per_pixel_error,valid_pixels,excluded_pixels"
// followed by one row per record.
std::string report_csv(std::span<const ErrorRecord> records);

// Header "n,mean_e,mean_ep,var_e,var_ep,min_ep,max_ep" and one row.
std::string stats_csv(const ErrorStats& stats);

// JSON writes report_json; CSV writes report_csv to `path` and stats_csv next
// to it as "<stem>.stats.csv".
void emit_report(const ErrorStats& stats, std::span<const ErrorRecord> records,
                 const std::filesystem::path& path, ReportFormat format,
                 const nlohmann::json& extras = nlohmann::json::object());

// The shipped report schema (schemas/error_report.schema.json).
nlohmann::json report_schema();

// Validates `doc` against a JSON Schema using the keywords the shipped schemas
// need: type, required, properties, additionalProperties (boolean), items,
// enum, minimum. Returns the list of violations (empty if valid).
std::vector<std::string> validate_json(const nlohmann::json& doc, const nlohmann::json& schema);

}  // namespace tensorbio
