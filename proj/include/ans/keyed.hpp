#pragma once

#include <cstdint>
#include <limits>
#include <span>
#include <string_view>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "ans/quantized_dist.hpp"
#include "ans/stream.hpp"
#include "ans/tans.hpp"

namespace ans {

/// Deterministic bit source derived from a key.
///
/// The key bytes are folded FNV style into a 64-bit seed, which then drives
/// splitmix64. Each output word gives 64 decision bits, most significant
/// first. Encoder and decoder must agree on this bit for bit.
class KeySchedule {
 public:
  static constexpr std::uint64_t kFoldBasis = 0xcbf29ce484222325ULL;
  static constexpr std::uint64_t kFoldPrime = 0x100000001b3ULL;

  explicit KeySchedule(std::span<const std::uint8_t> key);
  /// Starts splitmix64 directly from a seed, skipping the fold.
  static KeySchedule from_seed(std::uint64_t seed);

  std::uint64_t seed() const { return seed_; }
  std::uint64_t next_word();
  bool next_bit();

 private:
  KeySchedule() = default;

  std::uint64_t seed_ = 0;
  std::uint64_t state_ = 0;
  std::uint64_t word_ = 0;
  unsigned bits_left_ = 0;
};

inline constexpr std::uint64_t kUnlimitedStrength = std::numeric_limits<std::uint64_t>::max();

/// precise_init where, while the queue holds at least two candidates, a key
/// bit picks the top one (0) or the runner-up (1). At most `strength` swaps
/// happen in each run of l consecutive states; strength 0 reproduces
/// precise_init exactly.
SpreadFunction keyed_init(const QuantizedDist& d, const StreamConfig& cfg, std::span<const std::uint8_t> key,
                          std::uint64_t strength = kUnlimitedStrength);

/// 2^{l(b-1)}, the number of binary perturbation patterns.
boost::multiprecision::cpp_int keyspace_size(const StreamConfig& cfg);

/// Hex string (even length, no prefix) to bytes. Throws InvalidArgument.
std::vector<std::uint8_t> parse_hex_key(std::string_view hex);

}  // namespace ans
