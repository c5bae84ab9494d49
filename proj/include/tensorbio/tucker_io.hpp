#pragma once

// TUCKF001: single-file container for a Tucker decomposition.
//
// All integers unsigned little-endian, all reals IEEE-754 binary64
// little-endian, no padding:
//
//   offset  size        field
//   0       8           magic "TUCKF001"
//   8       1           method (1 = T-HOSVD, 2 = ST-HOSVD)
//   9       4           order d (>= 2)
//   13      4*d         dims n_1..n_d
//   ..      4*d         rank r_1..r_d (1 <= r_i <= n_i)
//   ..      4*d         processing order, zero-based permutation of modes
//   ..      8*n_i*r_i   factor U_i, row-major, for i = 1..d in mode order
//   ..      8*prod r_i  core, row-major (last index fastest)
//
// Nothing may follow the core.

#include <filesystem>
#include <string>
#include <string_view>

#include "tensorbio/hosvd.hpp"

namespace tensorbio {

inline constexpr std::string_view kTuckerMagic = "TUCKF001";

std::string encode_tucker(const TuckerFactors& f);

// Throws ParseError naming the failing byte offset.
TuckerFactors decode_tucker(std::string_view bytes);

void write_tucker(const TuckerFactors& f, const std::filesystem::path& path);
TuckerFactors read_tucker(const std::filesystem::path& path);

}  // namespace tensorbio
