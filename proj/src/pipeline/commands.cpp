#include <algorithm>
#include <exception>
#include <fstream>

#include <json.hpp>

#include "tensorbio/file_io.hpp"
#include "tensorbio/pipeline.hpp"
#include "tensorbio/tucker_io.hpp"

namespace tensorbio {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

constexpr std::string_view kIndexSidecarTag = "tensorbio-index/1";
constexpr std::string_view kStorageTag = "tensorbio-storage/1";
constexpr std::string_view kSummaryTag = "tensorbio-summary/1";

std::string rank_text(const MultilinearRank& r) {
  std::string s;
  for (std::size_t i = 0; i < r.size(); ++i) s += (i ? "," : "") + std::to_string(r[i]);
  return s;
}

json rank_json(const MultilinearRank& r) { return json(r); }

fs::path tucker_path(const PipelineConfig& c, const std::string& id, const std::string& variant) {
  return c.out / "compressed" / (id + "." + variant + ".tuck");
}

fs::path ndvi_path(const PipelineConfig& c, const std::string& id, const std::string& tag) {
  return c.out / "ndvi" / (id + "." + tag + ".ras");
}

fs::path index_path(const PipelineConfig& c, const std::string& id, const std::string& tag) {
  return c.out / "index" / (id + "." + tag + "." + std::string(index_name(c.index)) + ".ras");
}

fs::path sidecar_path(const fs::path& map_path) {
  auto p = map_path;
  return p.replace_extension(".json");
}

fs::path compare_path(const PipelineConfig& c, const std::string& variant) {
  return c.out / "reports" / ("compare." + variant + ".json");
}

std::vector<std::string> variants(const PipelineConfig& c) {
  std::vector<std::string> v;
  for (const auto& r : c.ranks) v.push_back(variant_name(c.method, c.layout, r));
  return v;
}

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw std::runtime_error("cannot create directory " + dir.string() + ": " + ec.message());
}

// Starts a command: validates the config and collects its warnings.
BatchResult begin(const PipelineConfig& c) {
  BatchResult res;
  res.warnings = validate_config(c);
  return res;
}

std::pair<Raster, Raster> load_bands(const PipelineConfig& c, const ImageInput& im) {
  auto red = load_raster(im.red, c.nodata);
  auto nir = load_raster(im.nir, c.nodata);
  if (red.rows() != nir.rows() || red.cols() != nir.cols()) {
    throw std::invalid_argument("red " + im.red.string() + " and nir " + im.nir.string() +
                                " have different shapes");
  }
  return {std::move(red), std::move(nir)};
}

void write_text(const fs::path& path, const std::string& text, BatchResult& res) {
  write_file_atomic(path, text);
  res.outputs.push_back(path);
}

json index_metadata(const IndexMap& m, const std::string& source) {
  json j;
  j["format"] = kIndexSidecarTag;
  j["index"] = m.index;
  if (m.index == "rao") j["distance"] = m.distance;
  if (m.index == "renyi") {
    j["alpha"] = m.alpha;
    j["base"] = m.base;
  }
  j["window"] = m.window.side;
  j["border"] = border_name(m.window.border);
  j["rows"] = m.values.rows();
  j["cols"] = m.values.cols();
  j["nodata"] = m.values.nodata();
  j["source"] = source;
  return j;
}

IndexMap load_index_map(const fs::path& path) {
  IndexMap m;
  m.values = read_raster(path);
  const auto side = sidecar_path(path);
  json j;
  try {
    j = json::parse(read_file(side));
  } catch (const json::exception& e) {
    throw std::runtime_error(side.string() + ": " + e.what());
  }
  try {
    if (j.at("format") != kIndexSidecarTag) throw std::runtime_error("unknown sidecar format");
    m.index = j.at("index").get<std::string>();
    if (m.index == "rao") m.distance = j.at("distance").get<std::string>();
    if (m.index == "renyi") {
      m.alpha = j.at("alpha").get<double>();
      m.base = j.at("base").get<double>();
    }
    m.window.side = j.at("window").get<std::size_t>();
    const auto border = j.at("border").get<std::string>();
    if (border != "interior" && border != "shrink") throw std::runtime_error("bad border " + border);
    m.window.border = border == "interior" ? Border::InteriorMissing : Border::Shrink;
    if (j.at("rows").get<std::size_t>() != m.values.rows() ||
        j.at("cols").get<std::size_t>() != m.values.cols()) {
      throw std::runtime_error("sidecar shape does not match the map");
    }
  } catch (const json::exception& e) {
    throw std::runtime_error(side.string() + ": " + e.what());
  } catch (const std::runtime_error& e) {
    throw std::runtime_error(side.string() + ": " + e.what());
  }
  return m;
}

std::string_view denominator_name(PixelDenominator d) {
  return d == PixelDenominator::SharedValid ? "shared-valid" : "all-pixels";
}

}  // namespace

std::string variant_name(Method method, BandLayout layout, const MultilinearRank& rank) {
  std::string s = method == Method::THosvd ? "t" : "st";
  s += ".";
  s += layout_name(layout);
  s += ".r";
  for (std::size_t i = 0; i < rank.size(); ++i) s += (i ? "x" : "") + std::to_string(rank[i]);
  return s;
}

std::string_view index_name(IndexKind kind) noexcept {
  return kind == IndexKind::Rao ? "rao" : "renyi";
}

void BatchResult::merge(BatchResult other) {
  for (auto& e : other.errors) errors.push_back(std::move(e));
  for (auto& w : other.warnings) {
    if (std::find(warnings.begin(), warnings.end(), w) == warnings.end()) warnings.push_back(std::move(w));
  }
  for (auto& o : other.outputs) outputs.push_back(std::move(o));
}

BatchResult cmd_compress(const PipelineConfig& c) {
  BatchResult res = begin(c);
  ensure_dir(c.out / "compressed");
  json rows = json::array();
  std::string csv = "image_id,method,layout,rows,cols,r1,r2,r3,units,relative_ratio,absolute_ratio\n";

  for (const auto& im : c.images) {
    BandStack stack;
    try {
      const auto [red, nir] = load_bands(c, im);
      stack = stack_bands(red, nir, c.layout);
    } catch (const std::exception& e) {
      res.errors.push_back("compress " + im.id + ": " + e.what());
      continue;
    }
    const std::size_t n_rows = stack.tensor.dim(0);
    const std::size_t n_cols = stack.tensor.dim(1);
    for (const auto& rank : c.ranks) {
      const std::string variant = variant_name(c.method, c.layout, rank);
      try {
        validate_rank(stack.tensor.dims(), rank);
        const TuckerFactors f = c.method == Method::THosvd ? t_hosvd(stack.tensor, rank)
                                                           : st_hosvd(stack.tensor, rank, c.st_order);
        const auto path = tucker_path(c, im.id, variant);
        write_tucker(f, path);
        res.outputs.push_back(path);

        const StorageCost cost = band_storage_cost(n_rows, n_cols, rank);
        rows.push_back({{"image_id", im.id},
                        {"variant", variant},
                        {"rows", n_rows},
                        {"cols", n_cols},
                        {"rank", rank_json(rank)},
                        {"units", cost.units},
                        {"relative_ratio", cost.relative_ratio},
                        {"absolute_ratio", cost.absolute_ratio},
                        {"file", path.filename().string()}});
        csv += im.id + "," + std::string(method_name(c.method)) + "," +
               std::string(layout_name(c.layout)) + "," + std::to_string(n_rows) + "," +
               std::to_string(n_cols) + "," + std::to_string(rank[0]) + "," +
               std::to_string(rank[1]) + "," + std::to_string(rank[2]) + "," +
               std::to_string(cost.units) + "," + format_real(cost.relative_ratio) + "," +
               format_real(cost.absolute_ratio) + "\n";
      } catch (const std::exception& e) {
        res.errors.push_back("compress " + im.id + " rank " + rank_text(rank) + ": " + e.what());
      }
    }
  }

  json doc = {{"format", kStorageTag}, {"rows", rows}};
  write_text(c.out / "compressed" / "storage.json", doc.dump(2) + "\n", res);
  write_text(c.out / "compressed" / "storage.csv", csv, res);
  return res;
}

BatchResult cmd_ndvi(const PipelineConfig& c) {
  BatchResult res = begin(c);
  ensure_dir(c.out / "ndvi");
  for (const auto& im : c.images) {
    Raster red;
    Raster nir;
    Raster raw;
    try {
      std::tie(red, nir) = load_bands(c, im);
      raw = ndvi(red, nir, c.nodata);
      const auto path = ndvi_path(c, im.id, "raw");
      write_raster(raw, path);
      res.outputs.push_back(path);
    } catch (const std::exception& e) {
      res.errors.push_back("ndvi " + im.id + ": " + e.what());
      continue;
    }
    for (const auto& rank : c.ranks) {
      const std::string variant = variant_name(c.method, c.layout, rank);
      const auto source = tucker_path(c, im.id, variant);
      try {
        const TuckerFactors f = read_tucker(source);
        if (f.method != c.method || f.rank() != rank) {
          throw std::runtime_error(source.string() + ": method or rank differs from the config");
        }
        const auto dims = f.dims();
        if (dims.size() != 3 || dims[0] != red.rows() || dims[1] != red.cols() || dims[2] != 3) {
          throw std::runtime_error(source.string() + ": dims do not match the input bands");
        }
        const auto [red_a, nir_a] = extract_bands(reconstruct(f), red.nodata());
        Raster out = ndvi(red_a, nir_a, c.nodata);
        // Cells where the raw NDVI is missing stay missing; reconstructed
        // values there carry no measurement.
        auto v = out.values();
        for (std::size_t i = 0; i < v.size(); ++i) {
          if (raw.is_missing(raw.values()[i])) v[i] = c.nodata;
        }
        const auto path = ndvi_path(c, im.id, variant);
        write_raster(out, path);
        res.outputs.push_back(path);
      } catch (const std::exception& e) {
        res.errors.push_back("ndvi " + im.id + " " + variant + ": " + e.what());
      }
    }
  }
  return res;
}

BatchResult cmd_index(const PipelineConfig& c) {
  BatchResult res = begin(c);
  ensure_dir(c.out / "index");
  std::vector<std::string> tags{"raw"};
  for (auto& v : variants(c)) tags.push_back(std::move(v));

  for (const auto& im : c.images) {
    for (const auto& tag : tags) {
      const auto source = ndvi_path(c, im.id, tag);
      try {
        if (!fs::exists(source)) throw std::runtime_error("missing input " + source.string());
        const Raster r = read_raster(source);
        const IndexMap m = c.index == IndexKind::Rao
                               ? rao_q(r, c.window, c.distance, c.threads)
                               : renyi(r, c.window, c.alpha, c.base, c.threads);
        const auto path = index_path(c, im.id, tag);
        write_raster(m.values, path);
        res.outputs.push_back(path);
        const auto meta = index_metadata(m, "ndvi/" + source.filename().string());
        write_text(sidecar_path(path), meta.dump(2) + "\n", res);
      } catch (const std::exception& e) {
        res.errors.push_back("index " + im.id + " " + tag + ": " + e.what());
      }
    }
  }
  return res;
}

BatchResult cmd_compare(const PipelineConfig& c) {
  BatchResult res = begin(c);
  ensure_dir(c.out / "reports");
  for (std::size_t k = 0; k < c.ranks.size(); ++k) {
    const auto& rank = c.ranks[k];
    const std::string variant = variant_name(c.method, c.layout, rank);
    std::vector<ErrorRecord> records;
    IndexMap reference;
    for (const auto& im : c.images) {
      const auto base_path = index_path(c, im.id, "raw");
      const auto approx_path = index_path(c, im.id, variant);
      try {
        const IndexMap a = load_index_map(base_path);
        const IndexMap b = load_index_map(approx_path);
        records.push_back(map_error(a, b, im.id, c.denominator));
        if (records.size() == 1) reference = a;
      } catch (const std::exception& e) {
        res.errors.push_back("compare " + base_path.string() + " vs " + approx_path.string() + ": " +
                             e.what());
      }
    }
    if (records.empty()) {
      res.errors.push_back("compare " + variant + ": no comparable images");
      continue;
    }
    const ErrorStats stats = summarize(records);
    if (stats.single_record) {
      res.warnings.push_back("compare " + variant + ": single image, variances reported as 0");
    }
    json extras = {{"variant", variant},
                   {"method", method_name(c.method)},
                   {"layout", layout_name(c.layout)},
                   {"rank", rank_json(rank)},
                   {"index", reference.index},
                   {"window", reference.window.side},
                   {"border", border_name(reference.window.border)},
                   {"denominator", denominator_name(c.denominator)}};
    if (reference.index == "rao") extras["distance"] = reference.distance;
    if (reference.index == "renyi") {
      extras["alpha"] = reference.alpha;
      extras["base"] = reference.base;
    }
    const auto json_path = compare_path(c, variant);
    auto csv_path = json_path;
    csv_path.replace_extension(".csv");
    emit_report(stats, records, json_path, ReportFormat::Json, extras);
    emit_report(stats, records, csv_path, ReportFormat::Csv, extras);
    auto stats_csv_path = csv_path;
    stats_csv_path.replace_filename(csv_path.stem().string() + ".stats.csv");
    res.outputs.insert(res.outputs.end(), {json_path, csv_path, stats_csv_path});
  }
  return res;
}

BatchResult cmd_report(const PipelineConfig& c) {
  BatchResult res = begin(c);
  ensure_dir(c.out / "reports");
  const json schema = report_schema();
  std::string rows_json;
  std::string csv = "variant,r1,r2,r3,n,mean_e,mean_ep,var_e,var_ep,min_ep,max_ep\n";
  for (const auto& rank : c.ranks) {
    const std::string variant = variant_name(c.method, c.layout, rank);
    const auto path = compare_path(c, variant);
    try {
      const json doc = json::parse(read_file(path));
      const auto problems = validate_json(doc, schema);
      if (!problems.empty()) throw std::runtime_error("schema violation: " + problems.front());
      const auto& s = doc.at("stats");
      const auto num = [&](const char* key) { return format_real(s.at(key).get<double>()); };
      const std::string n = std::to_string(s.at("n").get<std::size_t>());
      if (!rows_json.empty()) rows_json += ",\n";
      rows_json += "    {\"variant\": " + json(variant).dump() + ", \"rank\": " + rank_json(rank).dump() +
                   ", \"n\": " + n + ", \"mean_e\": " + num("mean_e") + ", \"mean_ep\": " +
                   num("mean_ep") + ", \"var_e\": " + num("var_e") + ", \"var_ep\": " + num("var_ep") +
                   ", \"min_ep\": " + num("min_ep") + ", \"max_ep\": " + num("max_ep") + "}";
      csv += variant + "," + std::to_string(rank[0]) + "," + std::to_string(rank[1]) + "," +
             std::to_string(rank[2]) + "," + n + "," + num("mean_e") + "," + num("mean_ep") + "," +
             num("var_e") + "," + num("var_ep") + "," + num("min_ep") + "," + num("max_ep") + "\n";
    } catch (const std::exception& e) {
      res.errors.push_back("report " + path.string() + ": " + e.what());
    }
  }
  std::string doc = "{\n  \"format\": " + json(kSummaryTag).dump() + ",\n  \"rows\": [";
  doc += rows_json.empty() ? "]\n}\n" : "\n" + rows_json + "\n  ]\n}\n";
  write_text(c.out / "reports" / "summary.json", doc, res);
  write_text(c.out / "reports" / "summary.csv", csv, res);
  return res;
}

BatchResult cmd_run(const PipelineConfig& c) {
  BatchResult res = cmd_compress(c);
  res.merge(cmd_ndvi(c));
  res.merge(cmd_index(c));
  res.merge(cmd_compare(c));
  res.merge(cmd_report(c));
  return res;
}

}  // namespace tensorbio
