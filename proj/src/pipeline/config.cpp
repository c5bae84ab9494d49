#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <limits>
#include <set>

#include <json.hpp>

#include "tensorbio/file_io.hpp"
#include "tensorbio/pipeline.hpp"

namespace tensorbio {
namespace {

using nlohmann::json;

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

// Drops a '#' comment that is not inside a double-quoted string.
std::string_view strip_comment(std::string_view line) {
  bool in_string = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (in_string) {
      if (c == '\\') {
        ++i;
      } else if (c == '"') {
        in_string = false;
      }
    } else if (c == '"') {
      in_string = true;
    } else if (c == '#') {
      return line.substr(0, i);
    }
  }
  return line;
}

bool valid_id(std::string_view id) {
  return !id.empty() && std::all_of(id.begin(), id.end(), [](char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-';
  });
}

std::string as_string(const json& v, std::string_view key, std::size_t line) {
  if (!v.is_string()) throw ConfigError(std::string(key) + " must be a string", line);
  return v.get<std::string>();
}

double as_number(const json& v, std::string_view key, std::size_t line) {
  if (!v.is_number()) throw ConfigError(std::string(key) + " must be a number", line);
  return v.get<double>();
}

std::size_t as_count(const json& v, std::string_view key, std::size_t line) {
  if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<long long>() >= 0)) {
    throw ConfigError(std::string(key) + " must be a non-negative integer", line);
  }
  return v.get<std::size_t>();
}

MultilinearRank rank_from_json(const json& v, std::size_t line) {
  if (v.is_string()) {
    try {
      return parse_rank(v.get<std::string>());
    } catch (const ConfigError& e) {
      throw ConfigError(e.what(), line);
    }
  }
  if (!v.is_array()) throw ConfigError("rank must be \"r1,r2,r3\" or [r1, r2, r3]", line);
  MultilinearRank r;
  for (const auto& x : v) r.push_back(as_count(x, "rank component", line));
  return r;
}

BandLayout parse_layout(std::string_view s, std::size_t line) {
  if (s == "red-dup") return BandLayout::RedDup;
  if (s == "nir-dup") return BandLayout::NirDup;
  throw ConfigError("layout must be red-dup or nir-dup, got '" + std::string(s) + "'", line);
}

Method parse_method(std::string_view s, std::size_t line) {
  if (s == "t") return Method::THosvd;
  if (s == "st") return Method::StHosvd;
  throw ConfigError("method must be t or st, got '" + std::string(s) + "'", line);
}

Border parse_border(std::string_view s, std::size_t line) {
  if (s == "interior") return Border::InteriorMissing;
  if (s == "shrink") return Border::Shrink;
  throw ConfigError("border must be interior or shrink, got '" + std::string(s) + "'", line);
}

IndexKind parse_index(std::string_view s, std::size_t line) {
  if (s == "rao") return IndexKind::Rao;
  if (s == "renyi") return IndexKind::Renyi;
  throw ConfigError("index must be rao or renyi, got '" + std::string(s) + "'", line);
}

PixelDenominator parse_denominator(std::string_view s, std::size_t line) {
  if (s == "shared-valid") return PixelDenominator::SharedValid;
  if (s == "all-pixels") return PixelDenominator::AllPixels;
  throw ConfigError("denominator must be shared-valid or all-pixels, got '" + std::string(s) + "'",
                    line);
}

}  // namespace

std::vector<MultilinearRank> PipelineConfig::default_ranks() {
  std::vector<MultilinearRank> ranks;
  for (std::size_t i : {10, 50, 100, 500, 1000}) ranks.push_back({i, i, 2});
  return ranks;
}

MultilinearRank parse_rank(std::string_view text) {
  MultilinearRank rank;
  std::size_t pos = 0;
  while (true) {
    const auto comma = text.find(',', pos);
    const auto part = trim(text.substr(pos, comma == std::string_view::npos ? comma : comma - pos));
    std::size_t v = 0;
    const auto [end, ec] = std::from_chars(part.data(), part.data() + part.size(), v);
    if (part.empty() || ec != std::errc{} || end != part.data() + part.size()) {
      throw ConfigError("bad rank '" + std::string(text) + "', expected r1,r2,r3", 0);
    }
    rank.push_back(v);
    if (comma == std::string_view::npos) break;
    pos = comma + 1;
  }
  return rank;
}

PipelineConfig parse_config(std::string_view text, const std::filesystem::path& base_dir) {
  PipelineConfig cfg;
  cfg.out = base_dir / "out";
  bool ranks_set = false;
  std::set<std::string> seen_keys;
  ImageInput* image = nullptr;
  std::set<std::string> image_keys;
  std::size_t image_line = 0;

  auto finish_image = [&] {
    if (image == nullptr) return;
    if (image->red.empty() || image->nir.empty()) {
      throw ConfigError("image '" + image->id + "' needs both red and nir", image_line);
    }
  };

  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto nl = text.find('\n', pos);
    const auto raw = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
    pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
    ++line_no;
    const auto line = trim(strip_comment(raw));
    if (line.empty()) continue;

    if (line.front() == '[') {
      if (line.back() != ']') throw ConfigError("unterminated section header", line_no);
      const auto name = trim(line.substr(1, line.size() - 2));
      constexpr std::string_view prefix = "image.";
      if (!name.starts_with(prefix) || !valid_id(name.substr(prefix.size()))) {
        throw ConfigError("expected [image.<id>] with id of letters, digits, '_' or '-'", line_no);
      }
      finish_image();
      const std::string id(name.substr(prefix.size()));
      for (const auto& im : cfg.images) {
        if (im.id == id) throw ConfigError("duplicate image '" + id + "'", line_no);
      }
      cfg.images.push_back({id, {}, {}});
      image = &cfg.images.back();
      image_keys.clear();
      image_line = line_no;
      continue;
    }

    const auto eq = line.find('=');
    if (eq == std::string_view::npos) throw ConfigError("expected key = value", line_no);
    const std::string key(trim(line.substr(0, eq)));
    const auto value_text = trim(line.substr(eq + 1));
    json value;
    try {
      value = json::parse(value_text);
    } catch (const json::parse_error&) {
      throw ConfigError("cannot parse value of '" + key + "': " + std::string(value_text), line_no);
    }

    if (image != nullptr) {
      if (!image_keys.insert(key).second) throw ConfigError("duplicate key '" + key + "'", line_no);
      if (key == "red") {
        image->red = base_dir / as_string(value, key, line_no);
      } else if (key == "nir") {
        image->nir = base_dir / as_string(value, key, line_no);
      } else {
        throw ConfigError("unknown image key '" + key + "'", line_no);
      }
      continue;
    }

    if (key != "rank" && !seen_keys.insert(key).second) {
      throw ConfigError("duplicate key '" + key + "'", line_no);
    }
    if (key == "out") {
      cfg.out = base_dir / as_string(value, key, line_no);
    } else if (key == "layout") {
      cfg.layout = parse_layout(as_string(value, key, line_no), line_no);
    } else if (key == "method") {
      cfg.method = parse_method(as_string(value, key, line_no), line_no);
    } else if (key == "ranks" || key == "rank") {
      if (key == "ranks" && seen_keys.contains("rank")) {
        throw ConfigError("use either ranks or rank, not both", line_no);
      }
      if (key == "rank" && seen_keys.contains("ranks")) {
        throw ConfigError("use either ranks or rank, not both", line_no);
      }
      if (!ranks_set) cfg.ranks.clear();
      ranks_set = true;
      if (key == "ranks") {
        if (!value.is_array()) throw ConfigError("ranks must be an array of ranks", line_no);
        for (const auto& r : value) cfg.ranks.push_back(rank_from_json(r, line_no));
      } else {
        seen_keys.insert("rank");
        cfg.ranks.push_back(rank_from_json(value, line_no));
      }
    } else if (key == "st_order") {
      if (!value.is_array()) throw ConfigError("st_order must be an array", line_no);
      cfg.st_order.clear();
      for (const auto& m : value) cfg.st_order.push_back(as_count(m, key, line_no));
    } else if (key == "window") {
      cfg.window.side = as_count(value, key, line_no);
    } else if (key == "border") {
      cfg.window.border = parse_border(as_string(value, key, line_no), line_no);
    } else if (key == "index") {
      cfg.index = parse_index(as_string(value, key, line_no), line_no);
    } else if (key == "alpha") {
      cfg.alpha = as_number(value, key, line_no);
    } else if (key == "base") {
      cfg.base = as_number(value, key, line_no);
    } else if (key == "distance") {
      cfg.distance = as_string(value, key, line_no);
    } else if (key == "threads") {
      const auto n = as_count(value, key, line_no);
      if (n > std::numeric_limits<unsigned>::max()) throw ConfigError("threads too large", line_no);
      cfg.threads = static_cast<unsigned>(n);
    } else if (key == "nodata") {
      cfg.nodata = as_number(value, key, line_no);
    } else if (key == "denominator") {
      cfg.denominator = parse_denominator(as_string(value, key, line_no), line_no);
    } else {
      throw ConfigError("unknown key '" + key + "'", line_no);
    }
  }
  finish_image();
  return cfg;
}

PipelineConfig load_config(const std::filesystem::path& path) {
  const std::string text = read_file(path);
  try {
    return parse_config(text, path.parent_path());
  } catch (const ConfigError& e) {
    throw ConfigError(path.string() + ": " + e.what(), e.line());
  }
}

std::vector<std::string> validate_config(const PipelineConfig& cfg) {
  std::vector<std::string> warnings;
  if (cfg.ranks.empty()) throw ConfigError("no ranks configured", 0);
  for (const auto& r : cfg.ranks) {
    if (r.size() != 3) throw ConfigError("rank must have three components", 0);
    if (r[0] == 0 || r[1] == 0 || r[2] == 0 || r[2] > 3) {
      throw ConfigError("rank " + std::to_string(r[0]) + "," + std::to_string(r[1]) + "," +
                            std::to_string(r[2]) +
                            " invalid: components must be >= 1 and the third <= 3",
                        0);
    }
    if (r[2] != 2) {
      warnings.push_back("rank " + std::to_string(r[0]) + "," + std::to_string(r[1]) + "," +
                         std::to_string(r[2]) + ": third component is usually 2");
    }
  }
  if (!cfg.st_order.empty()) {
    auto sorted = cfg.st_order;
    std::sort(sorted.begin(), sorted.end());
    if (sorted != std::vector<std::size_t>{0, 1, 2}) {
      throw ConfigError("st_order must be a permutation of 0, 1, 2", 0);
    }
  }
  try {
    cfg.window.validate();
    if (cfg.index == IndexKind::Renyi) validate_renyi_params(cfg.alpha, cfg.base);
    if (cfg.index == IndexKind::Rao) find_distance(cfg.distance);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what(), 0);
  }
  if (std::isnan(cfg.nodata)) throw ConfigError("nodata must be a number", 0);
  return warnings;
}

}  // namespace tensorbio
