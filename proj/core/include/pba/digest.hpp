#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace pba {

// 64-bit FNV-1a. Used for provenance manifests and prompt-cache keys,
// not for anything adversarial.
inline std::uint64_t fnv1a64(std::string_view data) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : data) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

inline std::string hex_digest(std::string_view data) {
  static const char* hexd = "0123456789abcdef";
  std::uint64_t h = fnv1a64(data);
  std::string out(16, '0');
  for (int i = 15; i >= 0; --i) {
    out[i] = hexd[h & 0xf];
    h >>= 4;
  }
  return out;
}

}  // namespace pba
