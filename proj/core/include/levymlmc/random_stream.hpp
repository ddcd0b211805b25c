#pragma once

#include <array>
#include <cstdint>
#include <limits>

namespace levymlmc {

/// Philox4x32-10 block function (Salmon et al., SC'11). Maps a 128-bit
/// counter and a 64-bit key to 128 pseudo-random bits.
using PhiloxCounter = std::array<std::uint32_t, 4>;
using PhiloxKey = std::array<std::uint32_t, 2>;

PhiloxCounter philox4x32_10(PhiloxCounter counter, PhiloxKey key) noexcept;

/// 64-bit finaliser used for key derivation.
std::uint64_t splitmix64(std::uint64_t x) noexcept;

/// Counter-based, splittable random stream.
///
/// A stream is identified by (seed, stream, substream). The triple fixes the
/// Philox key and the upper half of the counter, so any two distinct triples
/// yield independent sequences and a given triple always replays the same
/// numbers, independent of which thread consumes it. `fork(tag)` derives a
/// child stream for a named noise component (Brownian increments, jump times,
/// ...) without consuming anything from the parent.
///
/// Satisfies UniformRandomBitGenerator, but the library never routes it
/// through <random> distributions: those are implementation-defined and
/// would break cross-platform reproducibility.
class RandomStream {
 public:
  using result_type = std::uint64_t;

  explicit RandomStream(std::uint64_t seed, std::uint64_t stream = 0,
                        std::uint64_t substream = 0) noexcept;

  [[nodiscard]] RandomStream fork(std::uint64_t tag) const noexcept;

  result_type operator()() noexcept { return next_u64(); }
  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept {
    return std::numeric_limits<result_type>::max();
  }

  std::uint32_t next_u32() noexcept;
  std::uint64_t next_u64() noexcept;

  /// Uniform on the open interval (0, 1); 53 random bits.
  double uniform() noexcept;
  /// Standard normal via Box-Muller; the second variate of each pair is cached.
  double normal() noexcept;
  /// Exponential with the given rate; +infinity when rate == 0.
  double exponential(double rate) noexcept;

  [[nodiscard]] std::uint64_t key() const noexcept { return key64_; }
  [[nodiscard]] std::uint64_t substream() const noexcept { return substream_; }

 private:
  void refill() noexcept;

  std::uint64_t key64_;
  std::uint64_t substream_;
  std::uint64_t block_ = 0;
  PhiloxCounter buffer_{};
  int used_ = 4;
  double cached_normal_ = 0.0;
  bool has_cached_normal_ = false;
};

}  // namespace levymlmc
