#pragma once

#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <random>
#include <string_view>

namespace overlay {

/// SplitMix64 finalizer. Stable across platforms and releases; seed
/// derivation below is defined in terms of it.
std::uint64_t splitmix64(std::uint64_t x) noexcept;

/// 64-bit FNV-1a of a purpose label ("space", "capacity", "build", ...).
std::uint64_t hash_key(std::string_view label) noexcept;

/// Derives an independent stream seed from a parent seed and a key path:
///
///   h = splitmix64(parent)
///   for k in keys: h = splitmix64(h ^ k)
///
/// Adding a new consumer means adding a new key path; existing
/// streams are unaffected.
std::uint64_t derive_seed(std::uint64_t parent,
                          std::initializer_list<std::uint64_t> keys) noexcept;

/// Seedable generator with portable variate conversion. The engine is
/// mt19937_64, whose output sequence is fixed by the standard; the
/// conversions to reals and bounded integers are done here rather than
/// with <random> distributions, whose algorithms vary by library.
class Rng {
public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }

  /// Uniform on the open interval (0, 1).
  double uniform_open();

  /// Uniform on the open interval (lo, hi).
  double uniform(double lo, double hi);

  /// Uniform integer in [0, bound). bound must be positive.
  std::size_t below(std::size_t bound);

private:
  std::mt19937_64 engine_;
};

}  // namespace overlay
