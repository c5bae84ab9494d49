#include "tensorbio/raster.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>
#include <random>
#include <stdexcept>

#include "byte_io.hpp"
#include "tensorbio/file_io.hpp"
#include "tensorbio/kernels.hpp"

namespace tensorbio {
namespace {

constexpr std::string_view kRasterMagic = "RAS1";

void require_same_shape(const Raster& a, const Raster& b, const char* what) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw std::invalid_argument(std::string(what) + ": raster shapes differ (" +
                                std::to_string(a.rows()) + "x" + std::to_string(a.cols()) + " vs " +
                                std::to_string(b.rows()) + "x" + std::to_string(b.cols()) + ")");
  }
}

void copy_slice(const Raster& src, Tensor& t, std::size_t slice) {
  const std::size_t cols = src.cols();
  for (std::size_t r = 0; r < src.rows(); ++r) {
    for (std::size_t c = 0; c < cols; ++c) t(r, c, slice) = src(r, c);
  }
}

Raster read_slice(const Tensor& t, std::size_t slice, double nodata) {
  Raster out(t.dim(0), t.dim(1), nodata);
  for (std::size_t r = 0; r < out.rows(); ++r) {
    for (std::size_t c = 0; c < out.cols(); ++c) out(r, c) = t(r, c, slice);
  }
  return out;
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

double parse_double(std::string_view token, std::size_t offset) {
  std::size_t lead = 0;
  while (lead < token.size() && (token[lead] == ' ' || token[lead] == '\t')) ++lead;
  std::size_t end = token.size();
  while (end > lead && (token[end - 1] == ' ' || token[end - 1] == '\t' || token[end - 1] == '\r')) --end;
  std::string_view t = token.substr(lead, end - lead);
  if (!t.empty() && t.front() == '+') t.remove_prefix(1);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (t.empty() || ec != std::errc() || ptr != t.data() + t.size()) {
    throw ParseError("invalid number '" + std::string(token) + "'", offset + lead);
  }
  return v;
}

double unit_uniform(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

}  // namespace

Raster::Raster(std::size_t rows, std::size_t cols, double nodata, DType dtype)
    : rows_(rows), cols_(cols), values_(rows * cols, 0.0), nodata_(nodata), dtype_(dtype) {
  if (rows == 0 || cols == 0) throw std::invalid_argument("raster dimensions must be positive");
}

Raster::Raster(std::size_t rows, std::size_t cols, std::vector<double> values, double nodata, DType dtype)
    : rows_(rows), cols_(cols), values_(std::move(values)), nodata_(nodata), dtype_(dtype) {
  if (rows == 0 || cols == 0) throw std::invalid_argument("raster dimensions must be positive");
  if (values_.size() != rows * cols) {
    throw std::invalid_argument("raster value count " + std::to_string(values_.size()) +
                                " does not match " + std::to_string(rows) + "x" + std::to_string(cols));
  }
}

Raster ndvi(const Raster& red, const Raster& nir, double missing) {
  require_same_shape(red, nir, "ndvi");
  Raster out(red.rows(), red.cols(), missing);
  kernels::ndvi(red.values(), nir.values(), out.values(), {red.nodata(), nir.nodata(), missing});
  return out;
}

std::string_view layout_name(BandLayout layout) noexcept {
  switch (layout) {
    case BandLayout::RedDup: return "red-dup";
    case BandLayout::NirDup: return "nir-dup";
    case BandLayout::NdviRedNir: return "ndvi-red-nir";
  }
  return "unknown";
}

BandStack stack_bands(const Raster& red, const Raster& nir, BandLayout layout) {
  if (layout == BandLayout::NdviRedNir) return stack_bands(red, nir, ndvi(red, nir, red.nodata()), layout);
  return stack_bands(red, nir, Raster{}, layout);
}

BandStack stack_bands(const Raster& red, const Raster& nir, const Raster& ndvi_raster, BandLayout layout) {
  require_same_shape(red, nir, "stack_bands");
  BandStack s;
  s.layout = layout;
  s.nodata = red.nodata();
  s.tensor = Tensor({red.rows(), red.cols(), 3});
  switch (layout) {
    case BandLayout::RedDup: copy_slice(red, s.tensor, 0); break;
    case BandLayout::NirDup: copy_slice(nir, s.tensor, 0); break;
    case BandLayout::NdviRedNir:
      require_same_shape(red, ndvi_raster, "stack_bands");
      copy_slice(ndvi_raster, s.tensor, 0);
      break;
  }
  copy_slice(red, s.tensor, 1);
  copy_slice(nir, s.tensor, 2);
  return s;
}

std::pair<Raster, Raster> extract_bands(const BandStack& stack) {
  return extract_bands(stack.tensor, stack.nodata);
}

std::pair<Raster, Raster> extract_bands(const Tensor& stack, double nodata) {
  if (stack.order() != 3 || stack.dim(2) != 3) {
    throw std::invalid_argument("extract_bands: expected a (rows, cols, 3) tensor");
  }
  return {read_slice(stack, 1, nodata), read_slice(stack, 2, nodata)};
}

std::string encode_raster(const Raster& r) {
  if (r.rows() > std::numeric_limits<std::uint32_t>::max() ||
      r.cols() > std::numeric_limits<std::uint32_t>::max()) {
    throw std::invalid_argument("raster too large for RAS1");
  }
  detail::ByteWriter w;
  w.bytes(kRasterMagic);
  w.put<std::uint32_t>(static_cast<std::uint32_t>(r.rows()));
  w.put<std::uint32_t>(static_cast<std::uint32_t>(r.cols()));
  w.put<std::uint8_t>(static_cast<std::uint8_t>(r.dtype()));
  w.put<double>(r.nodata());
  if (r.dtype() == DType::Int16) {
    for (double v : r.values()) {
      if (!(v >= -32768.0 && v <= 32767.0) || v != std::trunc(v)) {
        throw std::invalid_argument("value " + format_double(v) + " is not representable as int16");
      }
      w.put<std::int16_t>(static_cast<std::int16_t>(v));
    }
  } else {
    for (double v : r.values()) w.put<double>(v);
  }
  return w.take();
}

Raster decode_raster(std::string_view bytes) {
  detail::ByteReader rd(bytes);
  if (rd.bytes(kRasterMagic.size(), "magic") != kRasterMagic) {
    throw ParseError("bad magic, expected \"RAS1\"", 0);
  }
  const std::size_t rows_at = rd.offset();
  const std::size_t rows = rd.get<std::uint32_t>("rows");
  const std::size_t cols = rd.get<std::uint32_t>("cols");
  if (rows == 0 || cols == 0) throw ParseError("zero raster dimension", rows_at);
  const std::size_t dtype_at = rd.offset();
  const auto code = rd.get<std::uint8_t>("dtype code");
  if (code != 1 && code != 2) throw ParseError("unknown dtype code " + std::to_string(code), dtype_at);
  const DType dtype = static_cast<DType>(code);
  const double nodata = rd.get<double>("nodata");

  const std::size_t width = dtype == DType::Int16 ? 2 : 8;
  const std::uint64_t cells = static_cast<std::uint64_t>(rows) * cols;
  if (cells > rd.remaining() / width) {
    throw ParseError("truncated payload: need " + std::to_string(cells * width) + " bytes, have " +
                         std::to_string(rd.remaining()),
                     bytes.size());
  }
  std::vector<double> values(cells);
  if (dtype == DType::Int16) {
    for (auto& v : values) v = rd.get<std::int16_t>("payload");
  } else {
    for (auto& v : values) v = rd.get<double>("payload");
  }
  rd.expect_end();
  return Raster(rows, cols, std::move(values), nodata, dtype);
}

void write_raster(const Raster& r, const std::filesystem::path& path) {
  write_file_atomic(path, encode_raster(r));
}

Raster read_raster(const std::filesystem::path& path) {
  const std::string bytes = read_file(path);
  try {
    return decode_raster(bytes);
  } catch (const ParseError& e) {
    throw ParseError(path.string() + ": " + e.detail(), e.offset());
  }
}

Raster parse_raster_csv(std::string_view text, double default_nodata) {
  double nodata = default_nodata;
  std::vector<double> values;
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::size_t pos = 0;
  bool first_line = true;
  while (pos < text.size()) {
    std::size_t eol = text.find('\n', pos);
    if (eol == std::string_view::npos) eol = text.size();
    std::string_view line = text.substr(pos, eol - pos);
    const std::size_t line_at = pos;
    pos = eol + 1;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.find_first_not_of(" \t") == std::string_view::npos) continue;

    if (first_line && line.starts_with("#")) {
      first_line = false;
      constexpr std::string_view key = "nodata=";
      const std::size_t k = line.find(key);
      if (k == std::string_view::npos) throw ParseError("malformed header, expected '# nodata=<v>'", line_at);
      nodata = parse_double(line.substr(k + key.size()), line_at + k + key.size());
      continue;
    }
    first_line = false;

    std::size_t count = 0;
    std::size_t start = 0;
    while (true) {
      const std::size_t comma = line.find(',', start);
      const std::string_view token = line.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start);
      values.push_back(parse_double(token, line_at + start));
      ++count;
      if (comma == std::string_view::npos) break;
      start = comma + 1;
    }
    if (rows == 0) {
      cols = count;
    } else if (count != cols) {
      throw ParseError("row " + std::to_string(rows + 1) + " has " + std::to_string(count) +
                           " values, expected " + std::to_string(cols),
                       line_at);
    }
    ++rows;
  }
  if (rows == 0) throw ParseError("no raster rows", text.size());
  return Raster(rows, cols, std::move(values), nodata, DType::Float64);
}

std::string format_raster_csv(const Raster& r) {
  std::string out = "# nodata=" + format_double(r.nodata()) + "\n";
  for (std::size_t i = 0; i < r.rows(); ++i) {
    for (std::size_t j = 0; j < r.cols(); ++j) {
      if (j) out += ',';
      out += format_double(r(i, j));
    }
    out += '\n';
  }
  return out;
}

Raster read_raster_csv(const std::filesystem::path& path, double default_nodata) {
  const std::string text = read_file(path);
  try {
    return parse_raster_csv(text, default_nodata);
  } catch (const ParseError& e) {
    throw ParseError(path.string() + ": " + e.detail(), e.offset());
  }
}

void write_raster_csv(const Raster& r, const std::filesystem::path& path) {
  write_file_atomic(path, format_raster_csv(r));
}

Raster load_raster(const std::filesystem::path& path, double default_nodata) {
  if (path.extension() == ".csv") return read_raster_csv(path, default_nodata);
  return read_raster(path);
}

std::pair<Raster, Raster> synthetic_scene(std::size_t rows, std::size_t cols, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  constexpr double two_pi = 2.0 * std::numbers::pi;
  double phase[6];
  for (double& p : phase) p = two_pi * unit_uniform(rng);

  Raster red(rows, cols);
  Raster nir(rows, cols);
  for (std::size_t r = 0; r < rows; ++r) {
    const double y = static_cast<double>(r) / static_cast<double>(rows);
    for (std::size_t c = 0; c < cols; ++c) {
      const double x = static_cast<double>(c) / static_cast<double>(cols);
      // Vegetation density in [0, 1]: a few smooth patches.
      const double veg = 0.5 + 0.3 * std::sin(two_pi * 1.3 * y + phase[0]) * std::cos(two_pi * 0.9 * x + phase[1]) +
                         0.15 * std::sin(two_pi * 2.7 * (x + y) + phase[2]) +
                         0.05 * std::cos(two_pi * 4.1 * x * y + phase[3]);
      const double soil = 0.5 + 0.5 * std::sin(two_pi * 0.6 * x + phase[4]) * std::sin(two_pi * 0.8 * y + phase[5]);
      red(r, c) = 600.0 + 900.0 * (1.0 - veg) + 250.0 * soil + 40.0 * unit_uniform(rng);
      nir(r, c) = 1800.0 + 2600.0 * veg + 150.0 * soil + 80.0 * unit_uniform(rng);
    }
  }
  return {std::move(red), std::move(nir)};
}

}  // namespace tensorbio
