#include "ans/stream.hpp"

#include <algorithm>
#include <bit>
#include <limits>
#include <string>

#include "ans/error.hpp"

namespace ans {

namespace {

using u128 = unsigned __int128;

std::uint64_t low_mask(unsigned bits) {
  return bits >= 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << bits) - 1;
}

}  // namespace

StreamConfig::StreamConfig(State l, State b) : l_(l), b_(b) {
  if (l == 0) throw InvalidArgument("stream interval needs l >= 1");
  if (b < 2) throw InvalidArgument("digit base must be at least 2");
  const u128 upper = static_cast<u128>(l) * b;
  if (upper > std::numeric_limits<State>::max()) throw OverflowError("b*l exceeds 64 bits");
  upper_ = static_cast<State>(upper);
  digit_bits_ = std::has_single_bit(b) ? static_cast<unsigned>(std::countr_zero(b)) : 0;
}

// ---------------------------------------------------------------------------
// DigitStack

DigitStack::DigitStack(State base) {
  if (base < 2 || !std::has_single_bit(base) || base > (State{1} << 32)) {
    throw InvalidArgument("digit stack base must be a power of two in [2, 2^32]");
  }
  width_ = static_cast<unsigned>(std::countr_zero(base));
}

void DigitStack::push_digits(State value, unsigned count) {
  const unsigned nb = count * width_;
  if (nb == 0) return;
  if (nb > 64) throw InvalidArgument("at most 64 bits may move in one transfer");
  value &= low_mask(nb);
  const std::uint64_t idx = bits_ >> 6;
  const unsigned off = bits_ & 63;
  const std::uint64_t need = (bits_ + nb + 63) >> 6;
  if (words_.size() < need) words_.resize(need, 0);
  words_[idx] |= value << off;
  if (off + nb > 64) words_[idx + 1] |= value >> (64 - off);
  bits_ += nb;
}

State DigitStack::pop_digits(unsigned count) {
  const unsigned nb = count * width_;
  if (nb == 0) return 0;
  if (nb > 64) throw InvalidArgument("at most 64 bits may move in one transfer");
  if (nb > bits_) throw DigitUnderflow("digit stream exhausted");
  const std::uint64_t start = bits_ - nb;
  const std::uint64_t idx = start >> 6;
  const unsigned off = start & 63;
  std::uint64_t v = words_[idx] >> off;
  if (off + nb > 64) v |= words_[idx + 1] << (64 - off);
  v &= low_mask(nb);
  bits_ = start;
  words_[idx] &= low_mask(off);
  words_.resize(off == 0 ? idx : idx + 1);
  return v;
}

std::vector<std::uint8_t> DigitStack::serialize() const {
  std::vector<std::uint8_t> out((bits_ + 7) / 8, 0);
  const std::uint64_t digits = size();
  std::uint64_t pos = 0;
  for (std::uint64_t j = 0; j < digits; ++j) {
    const std::uint64_t base_bit = (digits - 1 - j) * width_;
    for (unsigned t = 0; t < width_; ++t, ++pos) {
      if (bit(base_bit + t)) out[pos >> 3] |= static_cast<std::uint8_t>(1U << (pos & 7));
    }
  }
  return out;
}

DigitStack DigitStack::deserialize(std::span<const std::uint8_t> payload, std::uint64_t bit_length, State base) {
  DigitStack stack(base);
  const unsigned w = stack.width_;
  if (bit_length % w != 0) throw FormatError("payload length is not a whole number of digits");
  if (payload.size() != (bit_length + 7) / 8) throw FormatError("payload size does not match its bit length");
  const std::uint64_t digits = bit_length / w;
  stack.words_.assign((bit_length + 63) / 64, 0);
  stack.bits_ = bit_length;
  for (std::uint64_t j = 0; j < digits; ++j) {
    const std::uint64_t dst = (digits - 1 - j) * w;
    for (unsigned t = 0; t < w; ++t) {
      const std::uint64_t src = j * w + t;
      if ((payload[src >> 3] >> (src & 7)) & 1U) {
        stack.words_[(dst + t) >> 6] |= std::uint64_t{1} << ((dst + t) & 63);
      }
    }
  }
  return stack;
}

bool operator==(const DigitStack& a, const DigitStack& b) {
  if (a.width_ != b.width_ || a.bits_ != b.bits_) return false;
  const auto n = (a.bits_ + 63) / 64;
  return std::equal(a.words_.begin(), a.words_.begin() + static_cast<std::ptrdiff_t>(n), b.words_.begin());
}

// ---------------------------------------------------------------------------
// Ranges and conditions

SymbolRanges compute_symbol_ranges(const Codec& codec, const StreamConfig& cfg) {
  const auto n = codec.alphabet_size();
  constexpr State kUnset = std::numeric_limits<State>::max();
  std::vector<State> lo(n, kUnset), hi(n, 0), seen(n, 0);
  for (State y = cfg.l(); y < cfg.upper(); ++y) {
    const auto d = codec.decode(y);
    if (d.symbol >= n) throw InvalidArgument("codec decoded a symbol outside its alphabet");
    if (codec.encode(d.symbol, d.state) != y) throw InvalidArgument("codec C and D are not mutually inverse");
    lo[d.symbol] = std::min(lo[d.symbol], d.state);
    hi[d.symbol] = std::max(hi[d.symbol], d.state);
    ++seen[d.symbol];
  }
  SymbolRanges ranges;
  ranges.reserve(n);
  for (std::size_t s = 0; s < n; ++s) {
    if (seen[s] == 0) throw InvalidArgument("symbol " + std::to_string(s) + " never lands in I");
    if (hi[s] - lo[s] + 1 != seen[s]) {
      throw InvalidArgument("I_" + std::to_string(s) + " is not contiguous");
    }
    ranges.push_back({lo[s], hi[s]});
  }
  return ranges;
}

std::vector<bool> check_b_unique(const SymbolRanges& ranges, State b) {
  std::vector<bool> ok;
  ok.reserve(ranges.size());
  for (const auto& r : ranges) {
    ok.push_back(static_cast<u128>(r.lower) * b == static_cast<u128>(r.upper) + 1);
  }
  return ok;
}

bool check_uabs_condition(const BinaryProb& p, const StreamConfig& cfg, UabsVariant v) {
  const u128 lp = static_cast<u128>(cfg.l()) * p.num();
  const u128 blp = lp * cfg.b();
  const u128 den = p.den();
  const u128 ones = v == UabsVariant::Ceiling ? (lp + den - 1) / den : lp / den;
  // both symbols need states in I
  if (ones == 0 || ones >= cfg.l()) return false;
  if (v == UabsVariant::Ceiling) return cfg.b() * ones == (blp + den - 1) / den;
  return cfg.b() * ones == blp / den;
}

// ---------------------------------------------------------------------------
// Steps

unsigned digits_to_transfer(State x, State lower, State b) {
  const u128 top = static_cast<u128>(lower) * b;
  unsigned k = 0;
  for (State t = x; t >= top; t /= b) ++k;
  return k;
}

State stream_encode_step(Symbol s, State x, const Codec& codec, const SymbolRanges& ranges, DigitStack& out) {
  if (s >= ranges.size()) throw InvalidArgument("symbol outside the alphabet");
  const unsigned k = digits_to_transfer(x, ranges[s].lower, out.base());
  const unsigned shift = k * out.digit_bits();
  out.push_digits(x & low_mask(shift), k);
  const State reduced = shift >= 64 ? 0 : x >> shift;
  return codec.encode(s, reduced);
}

Decoded stream_decode_step(State x, const Codec& codec, const StreamConfig& cfg, DigitStack& in) {
  if (!cfg.contains(x)) throw FormatError("decoder state outside I");
  const unsigned w = in.digit_bits();
  if (w == 0 || (State{1} << w) != cfg.b()) throw InvalidArgument("digit stack base differs from the stream base");
  const auto d = codec.decode(x);
  if (d.state == 0) throw FormatError("reduced state 0 cannot return to I");
  // Smallest k with (x_s + 1) b^k > l; one more digit is needed when the
  // popped digits still leave the state below l.
  unsigned k = 0;
  for (u128 reach = static_cast<u128>(d.state) + 1; reach <= cfg.l(); reach <<= w) ++k;
  State y = (k * w >= 64 ? 0 : d.state << (k * w)) | in.pop_digits(k);
  if (y < cfg.l()) y = (y << w) | in.pop();
  if (!cfg.contains(y)) throw FormatError("decoded state left I");
  return {d.symbol, y};
}

BitCountTable bit_count_table(const SymbolRanges& ranges, const StreamConfig& cfg) {
  BitCountTable t{cfg, {}, {}, {}};
  const State b = cfg.b();
  for (const auto& r : ranges) {
    std::vector<unsigned> counts;
    counts.reserve(cfg.state_count());
    for (State x = cfg.l(); x < cfg.upper(); ++x) counts.push_back(digits_to_transfer(x, r.lower, b));
    const unsigned k = digits_to_transfer(cfg.upper() - 1, r.lower, b);
    u128 threshold = r.lower;
    for (unsigned i = 0; i < k; ++i) threshold *= b;
    t.count.push_back(std::move(counts));
    t.k.push_back(k);
    t.threshold.push_back(static_cast<State>(threshold));
  }
  return t;
}

// ---------------------------------------------------------------------------
// StreamCodec and multi-table coding

namespace {

void require_b_unique(const SymbolRanges& ranges, const StreamConfig& cfg) {
  const auto ok = check_b_unique(ranges, cfg.b());
  for (std::size_t s = 0; s < ok.size(); ++s) {
    if (!ok[s]) throw InvalidArgument("I_" + std::to_string(s) + " is not b-unique for this stream interval");
  }
}

}  // namespace

StreamCodec::StreamCodec(std::shared_ptr<const Codec> codec, StreamConfig cfg)
    : codec_(std::move(codec)), cfg_(cfg), ranges_(compute_symbol_ranges(*codec_, cfg_)) {
  require_b_unique(ranges_, cfg_);
}

StreamCodec::StreamCodec(std::shared_ptr<const Codec> codec, StreamConfig cfg, SymbolRanges ranges)
    : codec_(std::move(codec)), cfg_(cfg), ranges_(std::move(ranges)) {
  if (ranges_.size() != codec_->alphabet_size()) throw InvalidArgument("one range per symbol is required");
  require_b_unique(ranges_, cfg_);
}

namespace {

const StreamConfig& shared_config(std::span<const StreamCodec> tables) {
  if (tables.empty()) throw InvalidArgument("at least one coding table is required");
  const auto& cfg = tables.front().config();
  for (const auto& t : tables) {
    if (!(t.config() == cfg)) throw InvalidArgument("coding tables must share one stream interval");
  }
  return cfg;
}

}  // namespace

State encode_multi(std::span<const Symbol> symbols, std::span<const StreamCodec> tables, DigitStack& out,
                   const StateObserver& observer) {
  const auto& cfg = shared_config(tables);
  State x = cfg.l();
  for (std::size_t i = 0; i < symbols.size(); ++i) {
    x = tables[i % tables.size()].encode_step(symbols[i], x, out);
    if (observer) observer(symbols[i], x);
  }
  return x;
}

std::vector<Symbol> decode_multi(State state, DigitStack& in, std::size_t count,
                                 std::span<const StreamCodec> tables, const StateObserver& observer) {
  const auto& cfg = shared_config(tables);
  std::vector<Symbol> symbols(count);
  State x = state;
  for (std::size_t i = count; i-- > 0;) {
    const auto d = tables[i % tables.size()].decode_step(x, in);
    if (observer) observer(d.symbol, x);
    symbols[i] = d.symbol;
    x = d.state;
  }
  if (x != cfg.l()) throw FormatError("terminal state mismatch");
  return symbols;
}

}  // namespace ans
