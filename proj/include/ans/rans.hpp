#pragma once

#include <span>
#include <utility>
#include <vector>

#include "ans/quantized_dist.hpp"
#include "ans/stream.hpp"
#include "ans/types.hpp"

namespace ans {

/// C(s, x) = m floor(x / l_s) + b_s + (x mod l_s).
State rans_encode(Symbol s, State x, const QuantizedDist& d);

/// D(x) = (s, l_s floor(x / m) + (x mod m) - b_s) with s = s(x mod m).
Decoded rans_decode(State x, const QuantizedDist& d);

/// |eps_s(x)| against its bound m/x, where D(x) = (s, x_s).
struct InaccuracyBoundReport {
  Rational max_abs_epsilon;
  Rational bound;
};

/// eps(x) = x_s / x - l_s / m for D(x) = (s, x_s). Requires x >= 1.
Rational rans_inaccuracy(State x, const QuantizedDist& d);
InaccuracyBoundReport rans_inaccuracy_report(State x, const QuantizedDist& d);

class RansCodec final : public Codec {
 public:
  explicit RansCodec(QuantizedDist d) : dist_(std::move(d)) {}

  std::size_t alphabet_size() const override { return dist_.size(); }
  State encode(Symbol s, State x) const override { return rans_encode(s, x, dist_); }
  Decoded decode(State x) const override { return rans_decode(x, dist_); }

  const QuantizedDist& distribution() const { return dist_; }

 private:
  QuantizedDist dist_;
};

/// I_s = {k l_s, ..., b k l_s - 1} for l = k m. Throws InvalidArgument when m
/// does not divide l.
SymbolRanges rans_symbol_ranges(const QuantizedDist& d, const StreamConfig& cfg);

/// Default streaming configuration: b = 2^16, l = m 2^16.
StreamConfig rans_default_config(const QuantizedDist& d);

/// Encodes symbols in the order given, starting from x = l. Requires m | l and
/// a power-of-two base. The observer sees every state produced by C.
std::pair<State, DigitStack> rans_stream_encode(std::span<const Symbol> symbols, const QuantizedDist& d,
                                                const StreamConfig& cfg, const StateObserver& observer = {});

/// Pops `count` symbols (reverse of encoding order). Throws FormatError if
/// the stream does not end in state l, DigitUnderflow if it runs dry.
std::vector<Symbol> rans_stream_decode(State state, DigitStack& digits, std::size_t count, const QuantizedDist& d,
                                       const StreamConfig& cfg, const StateObserver& observer = {});

}  // namespace ans
