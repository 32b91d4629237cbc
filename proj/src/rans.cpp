#include "ans/rans.hpp"

#include <algorithm>
#include <limits>

#include "ans/error.hpp"

namespace ans {

namespace {

using u128 = unsigned __int128;

void require_divides(const QuantizedDist& d, const StreamConfig& cfg) {
  if (cfg.l() % d.total() != 0) throw InvalidArgument("stream rANS requires m to divide l");
  if (cfg.digit_bits() == 0) throw InvalidArgument("stream rANS requires a power-of-two digit base");
}

}  // namespace

State rans_encode(Symbol s, State x, const QuantizedDist& d) {
  if (s >= d.size()) throw InvalidArgument("symbol outside the alphabet");
  const State ls = d.freq(s);
  const u128 next = static_cast<u128>(x / ls) * d.total() + d.cumul(s) + x % ls;
  if (next > std::numeric_limits<State>::max()) throw OverflowError("rANS state exceeds 64 bits");
  return static_cast<State>(next);
}

Decoded rans_decode(State x, const QuantizedDist& d) {
  State slot;
  State cycles;
  if (const int log = d.total_log2(); log >= 0) {
    slot = x & (d.total() - 1);
    cycles = x >> log;
  } else {
    slot = x % d.total();
    cycles = x / d.total();
  }
  const Symbol s = d.symbol_of(slot);
  return {s, d.freq(s) * cycles + slot - d.cumul(s)};
}

Rational rans_inaccuracy(State x, const QuantizedDist& d) {
  if (x == 0) throw InvalidArgument("inaccuracy is defined for x >= 1");
  if (x > static_cast<State>(std::numeric_limits<std::int64_t>::max()) / d.total()) {
    throw OverflowError("state too large for exact inaccuracy");
  }
  const auto dec = rans_decode(x, d);
  return Rational(static_cast<std::int64_t>(dec.state), static_cast<std::int64_t>(x)) -
         Rational(d.freq(dec.symbol), static_cast<std::int64_t>(d.total()));
}

InaccuracyBoundReport rans_inaccuracy_report(State x, const QuantizedDist& d) {
  const auto eps = rans_inaccuracy(x, d);
  return {boost::abs(eps), Rational(static_cast<std::int64_t>(d.total()), static_cast<std::int64_t>(x))};
}

SymbolRanges rans_symbol_ranges(const QuantizedDist& d, const StreamConfig& cfg) {
  if (cfg.l() % d.total() != 0) throw InvalidArgument("stream rANS requires m to divide l");
  const State k = cfg.l() / d.total();
  SymbolRanges ranges;
  ranges.reserve(d.size());
  for (Symbol s = 0; s < d.size(); ++s) {
    const State lower = k * d.freq(s);
    ranges.push_back({lower, lower * cfg.b() - 1});
  }
  return ranges;
}

StreamConfig rans_default_config(const QuantizedDist& d) {
  constexpr State kDigit = State{1} << 16;
  if (d.total() > kDigit) throw InvalidArgument("rANS cycle length must not exceed 2^16");
  return StreamConfig(d.total() * kDigit, kDigit);
}

std::pair<State, DigitStack> rans_stream_encode(std::span<const Symbol> symbols, const QuantizedDist& d,
                                                const StreamConfig& cfg, const StateObserver& observer) {
  require_divides(d, cfg);
  const auto ranges = rans_symbol_ranges(d, cfg);
  const unsigned w = cfg.digit_bits();
  DigitStack out(cfg.b());
  State x = cfg.l();
  for (const Symbol s : symbols) {
    if (s >= d.size()) throw InvalidArgument("symbol outside the alphabet");
    const unsigned k = digits_to_transfer(x, ranges[s].lower, cfg.b());
    const unsigned shift = k * w;
    out.push_digits(shift >= 64 ? x : x & ((State{1} << shift) - 1), k);
    x = rans_encode(s, shift >= 64 ? 0 : x >> shift, d);
    if (observer) observer(s, x);
  }
  return {x, std::move(out)};
}

std::vector<Symbol> rans_stream_decode(State state, DigitStack& digits, std::size_t count, const QuantizedDist& d,
                                       const StreamConfig& cfg, const StateObserver& observer) {
  require_divides(d, cfg);
  const RansCodec codec(d);
  std::vector<Symbol> symbols;
  symbols.reserve(std::min<std::size_t>(count, std::size_t{1} << 24));
  State x = state;
  for (std::size_t i = 0; i < count; ++i) {
    const auto step = stream_decode_step(x, codec, cfg, digits);
    if (observer) observer(step.symbol, x);
    symbols.push_back(step.symbol);
    x = step.state;
  }
  if (x != cfg.l()) throw FormatError("terminal state mismatch");
  return symbols;
}

}  // namespace ans
