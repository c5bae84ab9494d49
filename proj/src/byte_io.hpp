#pragma once

// Little-endian encoding helpers for the binary file formats.

#include <bit>
#include <cstdint>
#include <cstring>
#include <string>
#include <string_view>
#include <type_traits>
#include <utility>

#include "tensorbio/file_io.hpp"

namespace tensorbio::detail {

template <typename T>
T byteswap_if_needed(T v) noexcept {
  static_assert(std::is_trivially_copyable_v<T>);
  if constexpr (std::endian::native == std::endian::big && sizeof(T) > 1) {
    unsigned char b[sizeof(T)];
    std::memcpy(b, &v, sizeof(T));
    for (std::size_t i = 0; i < sizeof(T) / 2; ++i) std::swap(b[i], b[sizeof(T) - 1 - i]);
    std::memcpy(&v, b, sizeof(T));
  }
  return v;
}

class ByteWriter {
 public:
  void bytes(std::string_view s) { buf_.append(s); }

  template <typename T>
  void put(T v) {
    v = byteswap_if_needed(v);
    char b[sizeof(T)];
    std::memcpy(b, &v, sizeof(T));
    buf_.append(b, sizeof(T));
  }

  const std::string& str() const noexcept { return buf_; }
  std::string take() noexcept { return std::move(buf_); }

 private:
  std::string buf_;
};

class ByteReader {
 public:
  explicit ByteReader(std::string_view data) : data_(data) {}

  std::size_t offset() const noexcept { return pos_; }
  std::size_t remaining() const noexcept { return data_.size() - pos_; }

  std::string_view bytes(std::size_t n, const char* what) {
    require(n, what);
    std::string_view s = data_.substr(pos_, n);
    pos_ += n;
    return s;
  }

  template <typename T>
  T get(const char* what) {
    require(sizeof(T), what);
    T v;
    std::memcpy(&v, data_.data() + pos_, sizeof(T));
    pos_ += sizeof(T);
    return byteswap_if_needed(v);
  }

  void expect_end() const {
    if (pos_ != data_.size()) {
      throw ParseError(std::to_string(data_.size() - pos_) + " unexpected trailing bytes", pos_);
    }
  }

 private:
  void require(std::size_t n, const char* what) const {
    if (remaining() < n) {
      throw ParseError(std::string("truncated payload while reading ") + what, data_.size());
    }
  }

  std::string_view data_;
  std::size_t pos_ = 0;
};

}  // namespace tensorbio::detail
