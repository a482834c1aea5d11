#pragma once

#include <cstdint>
#include <limits>
#include <random>
#include <string>

namespace bnp {

/// Seeded random stream with deterministic child derivation.
///
/// Every replicate, chain or ordering run draws from `child(index)` of a
/// master stream, so results depend only on (master seed, index) and never
/// on thread scheduling. All draws are built from raw 64-bit engine output;
/// no implementation-defined std:: distributions are used, so the streams are
/// bit-reproducible across standard libraries.
class RandomStream {
 public:
  using result_type = std::uint64_t;

  explicit RandomStream(std::uint64_t seed = 0);

  /// Independent stream keyed by (this stream's seed, index). Does not
  /// advance this stream.
  [[nodiscard]] RandomStream child(std::uint64_t index) const;

  [[nodiscard]] std::uint64_t seed() const noexcept { return seed_; }

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform on [0, 1) with 53 random bits.
  double uniform();
  /// Uniform on (0, 1).
  double uniform_open();
  /// Uniform integer on [0, n). Requires n > 0.
  std::uint64_t below(std::uint64_t n);
  double exponential();

  /// Engine state as text, for checkpoints.
  [[nodiscard]] std::string state() const;
  void restore(std::uint64_t seed, const std::string& state);

  // UniformRandomBitGenerator
  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }
  result_type operator()() { return engine_(); }

  friend bool operator==(const RandomStream& a, const RandomStream& b) {
    return a.seed_ == b.seed_ && a.engine_ == b.engine_;
  }

 private:
  std::uint64_t seed_;
  std::mt19937_64 engine_;
};

std::uint64_t splitmix64(std::uint64_t x) noexcept;

}  // namespace bnp
