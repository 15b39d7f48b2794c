#pragma once

#include <cstdint>
#include <cstring>
#include <string_view>

namespace adate {

// FNV-1a, 64 bit. Used for config/grid content hashes; stable across platforms.
inline std::uint64_t fnv1a64(const void* data, std::size_t len,
                             std::uint64_t seed = 0xcbf29ce484222325ull) {
  const auto* p = static_cast<const unsigned char*>(data);
  std::uint64_t h = seed;
  for (std::size_t i = 0; i < len; ++i) {
    h ^= p[i];
    h *= 0x100000001b3ull;
  }
  return h;
}

inline std::uint64_t fnv1a64(std::string_view s,
                             std::uint64_t seed = 0xcbf29ce484222325ull) {
  return fnv1a64(s.data(), s.size(), seed);
}

// Keeps string literals on the text overload: without this, a call like
// fnv1a64("=", seed) binds (const void*, len) and reads `seed` bytes.
inline std::uint64_t fnv1a64(const char* s,
                             std::uint64_t seed = 0xcbf29ce484222325ull) {
  return fnv1a64(std::string_view(s), seed);
}

inline std::uint64_t hash_combine(std::uint64_t h, std::uint64_t v) {
  return fnv1a64(&v, sizeof(v), h);
}

inline std::uint64_t hash_combine(std::uint64_t h, double v) {
  std::uint64_t bits;
  std::memcpy(&bits, &v, sizeof(bits));
  return hash_combine(h, bits);
}

// splitmix64 finalizer; mixes seeds into well-distributed stream seeds.
inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

}  // namespace adate
