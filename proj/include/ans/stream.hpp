#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <vector>

#include "ans/types.hpp"
#include "ans/uabs.hpp"

namespace ans {

/// Stream interval I = {l, ..., b*l - 1} with digit base b.
class StreamConfig {
 public:
  StreamConfig(State l, State b);

  State l() const { return l_; }
  State b() const { return b_; }
  /// One past the largest state, b*l.
  State upper() const { return upper_; }
  /// |I| = (b-1) * l.
  State state_count() const { return upper_ - l_; }
  bool contains(State x) const { return x >= l_ && x < upper_; }
  /// log2(b) when b is a power of two, 0 otherwise.
  unsigned digit_bits() const { return digit_bits_; }

  friend bool operator==(const StreamConfig& a, const StreamConfig& b) { return a.l_ == b.l_ && a.b_ == b.b_; }

 private:
  State l_;
  State b_;
  State upper_;
  unsigned digit_bits_;
};

/// LIFO buffer of base-b digits, b a power of two up to 2^32.
///
/// Digits are stored as fixed-width bit fields. Multi-digit pushes and pops
/// move a whole block of digits at once: push_digits(v, k) followed by
/// pop_digits(k) returns v.
class DigitStack {
 public:
  explicit DigitStack(State base = 2);

  State base() const { return State{1} << width_; }
  unsigned digit_bits() const { return width_; }
  std::uint64_t size() const { return bits_ / width_; }
  std::uint64_t bit_length() const { return bits_; }
  bool empty() const { return bits_ == 0; }

  void push(State digit) { push_digits(digit, 1); }
  /// Pushes `count` digits of `value`, least significant digit first.
  void push_digits(State value, unsigned count);
  State pop() { return pop_digits(1); }
  /// Pops `count` digits; the first popped digit is the most significant of
  /// the returned value. Throws DigitUnderflow when fewer digits remain.
  State pop_digits(unsigned count);

  /// Payload bytes: digits in reverse push order (last pushed first), the
  /// bits of each digit least-significant first, bytes filled from bit 0.
  /// The tail byte is zero padded.
  std::vector<std::uint8_t> serialize() const;
  /// Inverse of serialize(); the first payload digit ends up on top.
  static DigitStack deserialize(std::span<const std::uint8_t> payload, std::uint64_t bit_length, State base);

  friend bool operator==(const DigitStack& a, const DigitStack& b);

 private:
  bool bit(std::uint64_t i) const { return (words_[i >> 6] >> (i & 63)) & 1U; }

  std::vector<std::uint64_t> words_;
  std::uint64_t bits_ = 0;
  unsigned width_;
};

/// Inclusive interval of reduced states {lower .. upper}.
struct StateRange {
  State lower;
  State upper;

  State size() const { return upper - lower + 1; }
  bool contains(State x) const { return x >= lower && x <= upper; }
  friend bool operator==(const StateRange&, const StateRange&) = default;
};

/// I_s = {x : C(s, x) in I} for every symbol.
using SymbolRanges = std::vector<StateRange>;

/// Computes every I_s by decoding each state of I. Throws InvalidArgument
/// when some I_s is empty or not contiguous.
SymbolRanges compute_symbol_ranges(const Codec& codec, const StreamConfig& cfg);

/// True for s iff I_s = {l_s, ..., b*l_s - 1}.
std::vector<bool> check_b_unique(const SymbolRanges& ranges, State b);

/// b * ceil(l p) == ceil(b l p) (floor analogue for the Floor variant).
bool check_uabs_condition(const BinaryProb& p, const StreamConfig& cfg, UabsVariant v = UabsVariant::Ceiling);

/// Number of digits k = floor(log_b(x / l_s)) removed before encoding s from x.
unsigned digits_to_transfer(State x, State lower, State b);

/// Encodes one symbol: transfers k digits of x, then applies C. Requires
/// x in I and a b-unique I_s; the digit base is out.base().
State stream_encode_step(Symbol s, State x, const Codec& codec, const SymbolRanges& ranges, DigitStack& out);

/// Applies D, then pulls digits until the state is back in I.
Decoded stream_decode_step(State x, const Codec& codec, const StreamConfig& cfg, DigitStack& in);

/// Digit counts of every (s, x in I).
struct BitCountTable {
  StreamConfig cfg;
  /// count[s][x - l]
  std::vector<std::vector<unsigned>> count;
  /// k_s = floor(log_b((b l - 1) / l_s)): digits transferred from the top state.
  std::vector<unsigned> k;
  /// X_s = l_s b^{k_s}: smallest state transferring k_s digits.
  std::vector<State> threshold;

  unsigned at(Symbol s, State x) const { return count[s][x - cfg.l()]; }
};

BitCountTable bit_count_table(const SymbolRanges& ranges, const StreamConfig& cfg);

/// A codec bound to a stream interval with validated b-unique ranges.
class StreamCodec {
 public:
  StreamCodec(std::shared_ptr<const Codec> codec, StreamConfig cfg);
  /// Uses ranges known in closed form instead of enumerating I.
  StreamCodec(std::shared_ptr<const Codec> codec, StreamConfig cfg, SymbolRanges ranges);

  const Codec& codec() const { return *codec_; }
  const StreamConfig& config() const { return cfg_; }
  const SymbolRanges& ranges() const { return ranges_; }

  State encode_step(Symbol s, State x, DigitStack& out) const {
    return stream_encode_step(s, x, *codec_, ranges_, out);
  }
  Decoded decode_step(State x, DigitStack& in) const { return stream_decode_step(x, *codec_, cfg_, in); }

 private:
  std::shared_ptr<const Codec> codec_;
  StreamConfig cfg_;
  SymbolRanges ranges_;
};

/// Called with (symbol, state after C) at every encoding step, or
/// (symbol, state before D) at every decoding step.
using StateObserver = std::function<void(Symbol, State)>;

/// Encodes symbols[i] with tables[i % tables.size()], starting from x = l.
/// All tables must share one StreamConfig.
State encode_multi(std::span<const Symbol> symbols, std::span<const StreamCodec> tables, DigitStack& out,
                   const StateObserver& observer = {});

/// Inverse of encode_multi: walks the table schedule backwards and returns
/// the symbols in their original order. Throws FormatError if the final
/// state is not l.
std::vector<Symbol> decode_multi(State state, DigitStack& in, std::size_t count,
                                 std::span<const StreamCodec> tables, const StateObserver& observer = {});

}  // namespace ans
