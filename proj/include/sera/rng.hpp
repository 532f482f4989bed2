#pragma once

#include <cstdint>
#include <initializer_list>
#include <string_view>

namespace sera::rng {

// SplitMix64 finalizer. Full-avalanche 64-bit mix; the basis of every stream here.
uint64_t mix(uint64_t x);

// FNV-1a over the bytes of a string, for turning stage names into tag words.
uint64_t hash_str(std::string_view s);

// Derives a child key from a base key and a list of tag words by chaining the
// mixer. Children with different tags are statistically independent streams.
uint64_t derive(uint64_t base, std::initializer_list<uint64_t> tags);

// Counter-based generator: output k is mix(key + k * golden_gamma). A Stream
// never touches global state, so any (seed, tags...) pair names the same
// sequence on every platform and in any evaluation order.
class Stream {
 public:
  explicit Stream(uint64_t key) : key_(key) {}
  Stream(uint64_t base, std::initializer_list<uint64_t> tags) : key_(derive(base, tags)) {}

  uint64_t next_u64();
  double next_unit();   // [0, 1), 53-bit resolution
  double next_open();   // (0, 1), never returns an endpoint
  // Standard normal via Box-Muller on two counter-based uniforms; the second
  // value of each pair is cached. Documented transform, identical everywhere:
  //   z0 = sqrt(-2 ln u1) cos(2 pi u2), z1 = sqrt(-2 ln u1) sin(2 pi u2).
  double next_gaussian();

  uint64_t key() const { return key_; }

 private:
  uint64_t key_;
  uint64_t counter_ = 0;
  double cached_ = 0.0;
  bool has_cached_ = false;
};

void fill_gaussian(Stream& s, double* out, std::size_t n);

}  // namespace sera::rng
