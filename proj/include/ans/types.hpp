#pragma once

#include <cstdint>

#include <boost/rational.hpp>

namespace ans {

using State = std::uint64_t;
using Symbol = std::uint32_t;

/// Exact rational used for inaccuracies and probabilities.
using Rational = boost::rational<std::int64_t>;

/// Result of a decoding function D(x) = (s, x_s).
struct Decoded {
  Symbol symbol;
  State state;

  friend bool operator==(const Decoded&, const Decoded&) = default;
};

/// Coding functions C(s, x) and D(x) over natural numbers.
///
/// Implementations may be defined on the whole of N (uABS, rANS) or only
/// on a stream interval and its reduced ranges (tANS tables).
class Codec {
 public:
  virtual ~Codec() = default;

  virtual std::size_t alphabet_size() const = 0;
  virtual State encode(Symbol s, State x) const = 0;
  virtual Decoded decode(State x) const = 0;
};

}  // namespace ans
