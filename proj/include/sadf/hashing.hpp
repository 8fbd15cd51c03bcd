#pragma once

#include <cstdint>
#include <string_view>

namespace sadf {

/// Name recorded in reports and encoder files next to the seed.
inline constexpr std::string_view kFeatureHashName = "fnv1a64-splitmix64";

/// FNV-1a over the bytes with the seed folded into the offset basis, followed
/// by the splitmix64 finalizer so low bits are usable for small bucket counts.
constexpr std::uint64_t hash64(std::string_view bytes, std::uint64_t seed) noexcept {
  std::uint64_t h = 0xcbf29ce484222325ULL ^ (seed * 0x9e3779b97f4a7c15ULL);
  for (const char c : bytes) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ULL;
  }
  h ^= h >> 30;
  h *= 0xbf58476d1ce4e5b9ULL;
  h ^= h >> 27;
  h *= 0x94d049bb133111ebULL;
  h ^= h >> 31;
  return h;
}

/// Bucket index in [0, buckets). buckets must be >= 2.
constexpr std::uint32_t hash_feature(std::string_view value, std::uint32_t buckets,
                                     std::uint64_t seed) noexcept {
  return static_cast<std::uint32_t>(hash64(value, seed) % buckets);
}

}  // namespace sadf
