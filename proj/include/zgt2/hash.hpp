#pragma once

#include <cstdint>
#include <string_view>

namespace zgt2 {

/// 64-bit FNV-1a; used for dataset fingerprints and model checksums.
constexpr std::uint64_t fnv1a64(std::string_view bytes,
                                std::uint64_t h = 0xcbf29ce484222325ULL) noexcept {
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace zgt2
