#include "sera/rng.hpp"

#include <cmath>
#include <numbers>

namespace sera::rng {

namespace {
constexpr uint64_t kGoldenGamma = 0x9E3779B97F4A7C15ull;
}

uint64_t mix(uint64_t x) {
  x ^= x >> 30;
  x *= 0xBF58476D1CE4E5B9ull;
  x ^= x >> 27;
  x *= 0x94D049BB133111EBull;
  x ^= x >> 31;
  return x;
}

uint64_t hash_str(std::string_view s) {
  uint64_t h = 0xCBF29CE484222325ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001B3ull;
  }
  return h;
}

uint64_t derive(uint64_t base, std::initializer_list<uint64_t> tags) {
  uint64_t k = mix(base + kGoldenGamma);
  for (uint64_t t : tags) k = mix(k ^ mix(t + kGoldenGamma));
  return k;
}

uint64_t Stream::next_u64() { return mix(key_ + (++counter_) * kGoldenGamma); }

double Stream::next_unit() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

double Stream::next_open() {
  return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
}

double Stream::next_gaussian() {
  if (has_cached_) {
    has_cached_ = false;
    return cached_;
  }
  // u1 in (0, 1] keeps the log finite; u2 in [0, 1).
  const double u1 = (static_cast<double>(next_u64() >> 11) + 1.0) * 0x1.0p-53;
  const double u2 = next_unit();
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double a = 2.0 * std::numbers::pi * u2;
  cached_ = r * std::sin(a);
  has_cached_ = true;
  return r * std::cos(a);
}

void fill_gaussian(Stream& s, double* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] = s.next_gaussian();
}

}  // namespace sera::rng
