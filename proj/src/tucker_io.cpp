#include "tensorbio/tucker_io.hpp"

#include <limits>
#include <stdexcept>

#include "byte_io.hpp"
#include "tensorbio/file_io.hpp"

namespace tensorbio {
namespace {

constexpr std::uint32_t kMaxOrder = 64;

std::uint32_t checked_u32(std::size_t v, const char* what) {
  if (v > std::numeric_limits<std::uint32_t>::max()) {
    throw std::invalid_argument(std::string(what) + " does not fit the 32-bit TUCKF001 field");
  }
  return static_cast<std::uint32_t>(v);
}

}  // namespace

std::string encode_tucker(const TuckerFactors& f) {
  const std::size_t d = f.factors.size();
  if (d < 2 || f.core.order() != d || f.processing_order.size() != d) {
    throw std::invalid_argument("encode_tucker: inconsistent decomposition");
  }
  const auto rank = f.rank();
  for (std::size_t i = 0; i < d; ++i) {
    if (f.core.dim(i) != rank[i]) throw std::invalid_argument("encode_tucker: core/factor shape mismatch");
  }
  detail::ByteWriter w;
  w.bytes(kTuckerMagic);
  w.put<std::uint8_t>(static_cast<std::uint8_t>(f.method));
  w.put<std::uint32_t>(checked_u32(d, "order"));
  for (const auto& u : f.factors) w.put<std::uint32_t>(checked_u32(u.rows(), "dimension"));
  for (std::size_t r : rank) w.put<std::uint32_t>(checked_u32(r, "rank"));
  for (std::size_t m : f.processing_order) w.put<std::uint32_t>(checked_u32(m, "mode"));
  for (const auto& u : f.factors) {
    for (double v : u.data()) w.put<double>(v);
  }
  for (double v : f.core.data()) w.put<double>(v);
  return w.take();
}

TuckerFactors decode_tucker(std::string_view bytes) {
  detail::ByteReader r(bytes);
  if (r.bytes(kTuckerMagic.size(), "magic") != kTuckerMagic) {
    throw ParseError("bad magic, expected \"TUCKF001\"", 0);
  }
  TuckerFactors f;
  const std::size_t method_at = r.offset();
  const auto method = r.get<std::uint8_t>("method tag");
  if (method != 1 && method != 2) {
    throw ParseError("unknown method tag " + std::to_string(method), method_at);
  }
  f.method = static_cast<Method>(method);

  const std::size_t order_at = r.offset();
  const std::uint32_t d = r.get<std::uint32_t>("order");
  if (d < 2 || d > kMaxOrder) throw ParseError("unsupported tensor order " + std::to_string(d), order_at);

  std::vector<std::size_t> dims(d);
  std::vector<std::size_t> rank(d);
  for (auto& n : dims) {
    const std::size_t at = r.offset();
    n = r.get<std::uint32_t>("dims");
    if (n == 0) throw ParseError("zero dimension", at);
  }
  for (std::size_t i = 0; i < d; ++i) {
    const std::size_t at = r.offset();
    rank[i] = r.get<std::uint32_t>("rank");
    if (rank[i] == 0 || rank[i] > dims[i]) {
      throw ParseError("rank component " + std::to_string(rank[i]) + " outside [1, " +
                           std::to_string(dims[i]) + "]",
                       at);
    }
  }
  std::vector<bool> seen(d, false);
  f.processing_order.resize(d);
  for (auto& m : f.processing_order) {
    const std::size_t at = r.offset();
    m = r.get<std::uint32_t>("processing order");
    if (m >= d || seen[m]) throw ParseError("processing order is not a permutation", at);
    seen[m] = true;
  }

  // Size check up front so a corrupt header cannot trigger a huge allocation.
  std::uint64_t scalars = 1;
  bool overflow = false;
  for (std::size_t n : rank) overflow |= __builtin_mul_overflow(scalars, n, &scalars);
  for (std::size_t i = 0; i < d; ++i) {
    overflow |= __builtin_add_overflow(scalars, static_cast<std::uint64_t>(dims[i]) * rank[i], &scalars);
  }
  if (overflow || scalars > r.remaining() / sizeof(double)) {
    throw ParseError("truncated payload: need " + std::to_string(scalars * sizeof(double)) +
                         " bytes of factors and core, have " + std::to_string(r.remaining()),
                     bytes.size());
  }
  f.factors.reserve(d);
  for (std::size_t i = 0; i < d; ++i) {
    std::vector<double> data(dims[i] * rank[i]);
    for (auto& v : data) v = r.get<double>("factor");
    f.factors.emplace_back(dims[i], rank[i], std::move(data));
  }
  std::vector<double> core(product(rank));
  for (auto& v : core) v = r.get<double>("core");
  f.core = Tensor(rank, std::move(core));
  r.expect_end();
  return f;
}

void write_tucker(const TuckerFactors& f, const std::filesystem::path& path) {
  write_file_atomic(path, encode_tucker(f));
}

TuckerFactors read_tucker(const std::filesystem::path& path) {
  const std::string bytes = read_file(path);
  try {
    return decode_tucker(bytes);
  } catch (const ParseError& e) {
    throw ParseError(path.string() + ": " + e.detail(), e.offset());
  }
}

}  // namespace tensorbio
