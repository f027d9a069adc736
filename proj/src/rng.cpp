#include "overlay/rng.hpp"

#include <cmath>
#include <stdexcept>

namespace overlay {

std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t hash_key(std::string_view label) noexcept {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : label) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::uint64_t derive_seed(std::uint64_t parent,
                          std::initializer_list<std::uint64_t> keys) noexcept {
  std::uint64_t h = splitmix64(parent);
  for (std::uint64_t k : keys) h = splitmix64(h ^ k);
  return h;
}

double Rng::uniform_open() {
  // 53 random bits, offset by half an ulp so neither endpoint is reachable.
  return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1p-53;
}

double Rng::uniform(double lo, double hi) {
  double v = lo + (hi - lo) * uniform_open();
  if (v <= lo) v = std::nextafter(lo, hi);
  if (v >= hi) v = std::nextafter(hi, lo);
  return v;
}

std::size_t Rng::below(std::size_t bound) {
  if (bound == 0) throw std::invalid_argument("Rng::below: bound must be positive");
  // Lemire's multiply-and-reject.
  const std::uint64_t range = bound;
  std::uint64_t x = engine_();
  unsigned __int128 m = static_cast<unsigned __int128>(x) * range;
  auto low = static_cast<std::uint64_t>(m);
  if (low < range) {
    const std::uint64_t threshold = (0 - range) % range;
    while (low < threshold) {
      x = engine_();
      m = static_cast<unsigned __int128>(x) * range;
      low = static_cast<std::uint64_t>(m);
    }
  }
  return static_cast<std::size_t>(m >> 64);
}

}  // namespace overlay
