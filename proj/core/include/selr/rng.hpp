#pragma once

#include <array>
#include <cstdint>
#include <limits>

namespace selr {

/// Philox4x32-10 block: 128-bit counter and 64-bit key to 128 random bits.
std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> counter,
                                        std::array<std::uint32_t, 2> key);

/// Counter-based stream keyed by (seed, stream). Draw k of a stream depends
/// only on (seed, stream, k), so replicate r can be generated on any worker
/// in any order with identical results.
class CounterRng {
 public:
  using result_type = std::uint64_t;

  CounterRng(std::uint64_t seed, std::uint64_t stream) noexcept;

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept {
    return std::numeric_limits<result_type>::max();
  }

  result_type operator()() noexcept;

  /// Uniform on the open interval (0, 1) with 53-bit resolution.
  double uniform() noexcept;
  /// Standard normal by inversion of the uniform draw.
  double normal() noexcept;
  /// Uniform integer in [0, n) by rejection; n > 0.
  std::uint64_t below(std::uint64_t n) noexcept;
  /// +1 or -1 with equal probability.
  double rademacher() noexcept;

 private:
  std::array<std::uint32_t, 2> key_;
  std::uint64_t stream_;
  std::uint64_t block_ = 0;
  std::array<std::uint32_t, 4> buffer_{};
  int used_ = 4;  // 32-bit words consumed from buffer_
};

/// Derives a well-mixed 64-bit stream id from two integers (splitmix64).
std::uint64_t mix_stream(std::uint64_t a, std::uint64_t b) noexcept;

}  // namespace selr
