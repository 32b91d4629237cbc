#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "ans/quantized_dist.hpp"
#include "ans/stream.hpp"

namespace ans {

enum class Variant : std::uint8_t { Tans = 0, Rans = 1, UabsStream = 2 };

std::optional<Variant> parse_variant(std::string_view name);
std::string_view variant_name(Variant v);

inline constexpr unsigned kDefaultTableLog = 12;
inline constexpr unsigned kMaxTableLog = 15;

/// Fixed header of an "ANS1" container. All integers are little-endian.
///
///   magic "ANS1" | version u8 | variant u8 | table_log u8 | key_flag u8 |
///   alphabet_size u16 | freqs u16 x alphabet_size | message_length u64 |
///   final_state u64 | payload_bits u64 | payload
///
/// freqs holds l_s per byte value below alphabet_size; absent bytes get 0.
/// The nonzero entries sum to 2^table_log.
struct ContainerHeader {
  static constexpr std::uint8_t kVersion = 1;

  Variant variant = Variant::Tans;
  std::uint8_t table_log = kDefaultTableLog;
  bool keyed = false;
  std::vector<std::uint32_t> freqs;
  std::uint64_t message_length = 0;
  std::uint64_t final_state = 0;
  std::uint64_t payload_bits = 0;

  std::size_t encoded_size() const { return 4 + 4 + 2 + 2 * freqs.size() + 24; }
  friend bool operator==(const ContainerHeader&, const ContainerHeader&) = default;
};

std::vector<std::uint8_t> serialize_header(const ContainerHeader& h);

struct ParsedContainer {
  ContainerHeader header;
  std::span<const std::uint8_t> payload;
};

/// Checks magic, version, frequency sum, final state and payload length.
/// Throws FormatError.
ParsedContainer parse_container(std::span<const std::uint8_t> bytes);

/// Largest-remainder quantization of counts to a total of l. Every nonzero
/// count gets at least 1; zero counts stay 0. Throws InvalidArgument when
/// there are no symbols or more distinct symbols than l.
std::vector<std::uint32_t> quantize(std::span<const std::uint64_t> counts, std::uint64_t l);

/// Symbol statistics of an input, over the byte values that occur.
struct Model {
  /// counts[byte]
  std::vector<std::uint64_t> counts;
  /// freqs[byte], zero for absent bytes, trimmed after the last present one.
  std::vector<std::uint32_t> freqs;
  /// Byte value of each dense symbol.
  std::vector<std::uint8_t> alphabet;

  QuantizedDist dist() const;
};

Model build_model(std::span<const std::uint8_t> input, std::uint64_t l);
/// Recovers the dense alphabet from header frequencies.
Model model_from_freqs(std::span<const std::uint32_t> freqs);

/// Digit interval of a variant at a given table_log.
StreamConfig container_config(Variant v, unsigned table_log);

/// Static order-0 compression. Symbols are encoded last to first from
/// x = l, so decompression streams forward. A key selects keyed tANS tables.
std::vector<std::uint8_t> compress(std::span<const std::uint8_t> input, Variant variant,
                                   unsigned table_log = kDefaultTableLog,
                                   std::optional<std::span<const std::uint8_t>> key = std::nullopt);

/// Throws FormatError on a malformed container, a missing or unexpected key,
/// or a stream that does not end in state l.
std::vector<std::uint8_t> decompress(std::span<const std::uint8_t> container,
                                     std::optional<std::span<const std::uint8_t>> key = std::nullopt);

}  // namespace ans
