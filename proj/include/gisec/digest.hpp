#pragma once
#include <cstddef>
#include <cstdint>
#include <string>

namespace gisec {

/// FNV-1a 64-bit digest of a byte range.
inline std::uint64_t fnv1a64(const void *data, std::size_t size) {
  const auto *bytes = static_cast<const unsigned char *>(data);
  std::uint64_t hash = 0xcbf29ce484222325ULL;
  for (std::size_t i = 0; i < size; ++i) {
    hash ^= bytes[i];
    hash *= 0x100000001b3ULL;
  }
  return hash;
}

inline std::uint64_t fnv1a64(const std::string &text) {
  return fnv1a64(text.data(), text.size());
}

/// Digest rendered as 16 lowercase hex digits.
inline std::string digest_hex(std::uint64_t digest) {
  static const char *hex = "0123456789abcdef";
  std::string out(16, '0');
  for (int i = 15; i >= 0; --i) {
    out[std::size_t(i)] = hex[digest & 0xF];
    digest >>= 4;
  }
  return out;
}

} // namespace gisec
