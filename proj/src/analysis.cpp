#include "tensorbio/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>

#include "report_schema.hpp"
#include "tensorbio/file_io.hpp"

namespace tensorbio {
namespace {

std::string real(double v) { return format_real(v); }

std::string quoted(const std::string& s) { return nlohmann::json(s).dump(); }

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

double sorted_sum(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  double acc = 0.0;
  for (double x : v) acc += x;
  return acc;
}

double sample_variance(const std::vector<double>& v, double mean) {
  if (v.size() < 2) return 0.0;
  std::vector<double> sq;
  sq.reserve(v.size());
  for (double x : v) sq.push_back((x - mean) * (x - mean));
  return sorted_sum(std::move(sq)) / static_cast<double>(v.size() - 1);
}

std::string describe(const IndexMap& m) {
  std::string s = m.index + " window=" + std::to_string(m.window.side) + "/" +
                  std::string(border_name(m.window.border));
  if (m.index == "rao") s += " distance=" + m.distance;
  if (m.index == "renyi") s += " alpha=" + real(m.alpha) + " base=" + real(m.base);
  return s;
}

bool type_matches(const nlohmann::json& v, const std::string& type) {
  if (type == "object") return v.is_object();
  if (type == "array") return v.is_array();
  if (type == "string") return v.is_string();
  if (type == "boolean") return v.is_boolean();
  if (type == "null") return v.is_null();
  if (type == "integer") {
    if (v.is_number_integer()) return true;
    return v.is_number_float() && std::floor(v.get<double>()) == v.get<double>();
  }
  if (type == "number") return v.is_number();
  return false;
}

void validate_at(const nlohmann::json& doc, const nlohmann::json& schema, const std::string& where,
                 std::vector<std::string>& errors) {
  if (!schema.is_object()) return;
  if (auto it = schema.find("type"); it != schema.end()) {
    bool ok = false;
    if (it->is_string()) {
      ok = type_matches(doc, it->get<std::string>());
    } else if (it->is_array()) {
      for (const auto& t : *it) ok = ok || type_matches(doc, t.get<std::string>());
    }
    if (!ok) {
      errors.push_back(where + ": expected type " + it->dump());
      return;
    }
  }
  if (auto it = schema.find("enum"); it != schema.end()) {
    if (std::find(it->begin(), it->end(), doc) == it->end()) {
      errors.push_back(where + ": value " + doc.dump() + " not in " + it->dump());
    }
  }
  if (auto it = schema.find("minimum"); it != schema.end() && doc.is_number()) {
    if (doc.get<double>() < it->get<double>()) {
      errors.push_back(where + ": " + doc.dump() + " is below minimum " + it->dump());
    }
  }
  if (doc.is_object()) {
    if (auto it = schema.find("required"); it != schema.end()) {
      for (const auto& key : *it) {
        if (!doc.contains(key.get<std::string>())) {
          errors.push_back(where + ": missing required property " + key.dump());
        }
      }
    }
    const auto props = schema.find("properties");
    for (const auto& [key, value] : doc.items()) {
      if (props != schema.end() && props->contains(key)) {
        validate_at(value, (*props)[key], where + "/" + key, errors);
      } else if (auto ap = schema.find("additionalProperties");
                 ap != schema.end() && ap->is_boolean() && !ap->get<bool>()) {
        errors.push_back(where + ": unexpected property \"" + key + "\"");
      }
    }
  }
  if (doc.is_array()) {
    if (auto it = schema.find("items"); it != schema.end()) {
      for (std::size_t i = 0; i < doc.size(); ++i) {
        validate_at(doc[i], *it, where + "/" + std::to_string(i), errors);
      }
    }
  }
}

}  // namespace

std::string format_real(double v) {
  if (!std::isfinite(v)) return "null";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%#.17g", v);
  return buf;
}

ErrorRecord raster_error(const Raster& a, const Raster& b, std::string image_id,
                         PixelDenominator denominator) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw std::invalid_argument("map shapes differ: " + std::to_string(a.rows()) + "x" +
                                std::to_string(a.cols()) + " vs " + std::to_string(b.rows()) + "x" +
                                std::to_string(b.cols()));
  }
  ErrorRecord rec;
  rec.image_id = std::move(image_id);
  double acc = 0.0;
  const auto va = a.values();
  const auto vb = b.values();
  for (std::size_t i = 0; i < va.size(); ++i) {
    if (a.is_missing(va[i]) || b.is_missing(vb[i])) {
      ++rec.excluded_pixels;
      continue;
    }
    const double d = va[i] - vb[i];
    acc += d * d;
    ++rec.valid_pixels;
  }
  rec.frobenius_error = std::sqrt(acc);
  const std::size_t count =
      denominator == PixelDenominator::SharedValid ? rec.valid_pixels : va.size();
  rec.per_pixel_error = count == 0 ? 0.0 : rec.frobenius_error / static_cast<double>(count);
  return rec;
}

ErrorRecord map_error(const IndexMap& a, const IndexMap& b, std::string image_id,
                      PixelDenominator denominator) {
  const bool same = a.index == b.index && a.window == b.window &&
                    (a.index != "rao" || a.distance == b.distance) &&
                    (a.index != "renyi" || (a.alpha == b.alpha && a.base == b.base));
  if (!same) {
    throw std::invalid_argument("index maps were computed differently: [" + describe(a) + "] vs [" +
                                describe(b) + "]");
  }
  return raster_error(a.values, b.values, std::move(image_id), denominator);
}

ErrorStats summarize(std::span<const ErrorRecord> records) {
  if (records.empty()) throw std::invalid_argument("summarize: no error records");
  std::vector<double> e;
  std::vector<double> ep;
  for (const auto& r : records) {
    e.push_back(r.frobenius_error);
    ep.push_back(r.per_pixel_error);
  }
  ErrorStats s;
  s.n = records.size();
  const double n = static_cast<double>(s.n);
  s.mean_e = sorted_sum(e) / n;
  s.mean_ep = sorted_sum(ep) / n;
  s.var_e = sample_variance(e, s.mean_e);
  s.var_ep = sample_variance(ep, s.mean_ep);
  s.min_ep = *std::min_element(ep.begin(), ep.end());
  s.max_ep = *std::max_element(ep.begin(), ep.end());
  s.single_record = s.n == 1;
  return s;
}

std::string report_json(const ErrorStats& stats, std::span<const ErrorRecord> records,
                        const nlohmann::json& extras) {
  if (!extras.is_object()) throw std::invalid_argument("report extras must be a JSON object");
  std::string out = "{\n";
  out += "  \"format\": " + quoted(kReportFormatTag) + ",\n";
  out += "  \"stats\": {\n";
  out += "    \"n\": " + std::to_string(stats.n) + ",\n";
  out += "    \"mean_e\": " + real(stats.mean_e) + ",\n";
  out += "    \"mean_ep\": " + real(stats.mean_ep) + ",\n";
  out += "    \"var_e\": " + real(stats.var_e) + ",\n";
  out += "    \"var_ep\": " + real(stats.var_ep) + ",\n";
  out += "    \"min_ep\": " + real(stats.min_ep) + ",\n";
  out += "    \"max_ep\": " + real(stats.max_ep) + "\n";
  out += "  },\n";
  out += "  \"records\": [";
  for (std::size_t i = 0; i < records.size(); ++i) {
    const auto& r = records[i];
    out += i == 0 ? "\n" : ",\n";
    out += "    {\"image_id\": " + quoted(r.image_id) +
           ", \"frobenius_error\": " + real(r.frobenius_error) +
           ", \"per_pixel_error\": " + real(r.per_pixel_error) +
           ", \"valid_pixels\": " + std::to_string(r.valid_pixels) +
           ", \"excluded_pixels\": " + std::to_string(r.excluded_pixels) + "}";
  }
  out += records.empty() ? "],\n" : "\n  ],\n";
  out += "  \"warnings\": [";
  if (stats.single_record) out += quoted("single record: variances reported as 0");
  out += "],\n";
  out += "  \"extras\": " + extras.dump() + "\n";
  out += "}\n";
  return out;
}

std::string report_csv(std::span<const ErrorRecord> records) {
  std::string out = "image_id,frobenius_error,per_pixel_error,valid_pixels,excluded_pixels\n";
  for (const auto& r : records) {
    out += csv_field(r.image_id) + "," + real(r.frobenius_error) + "," + real(r.per_pixel_error) +
           "," + std::to_string(r.valid_pixels) + "," + std::to_string(r.excluded_pixels) + "\n";
  }
  return out;
}

std::string stats_csv(const ErrorStats& s) {
  return "n,mean_e,mean_ep,var_e,var_ep,min_ep,max_ep\n" + std::to_string(s.n) + "," +
         real(s.mean_e) + "," + real(s.mean_ep) + "," + real(s.var_e) + "," + real(s.var_ep) + "," +
         real(s.min_ep) + "," + real(s.max_ep) + "\n";
}

void emit_report(const ErrorStats& stats, std::span<const ErrorRecord> records,
                 const std::filesystem::path& path, ReportFormat format,
                 const nlohmann::json& extras) {
  if (format == ReportFormat::Json) {
    write_file_atomic(path, report_json(stats, records, extras));
    return;
  }
  write_file_atomic(path, report_csv(records));
  auto stats_path = path;
  stats_path.replace_filename(path.stem().string() + ".stats.csv");
  write_file_atomic(stats_path, stats_csv(stats));
}

nlohmann::json report_schema() { return nlohmann::json::parse(detail::kReportSchemaJson); }

std::vector<std::string> validate_json(const nlohmann::json& doc, const nlohmann::json& schema) {
  std::vector<std::string> errors;
  validate_at(doc, schema, "#", errors);
  return errors;
}

}  // namespace tensorbio
