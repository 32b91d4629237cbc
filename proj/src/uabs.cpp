#include "ans/uabs.hpp"

#include <limits>
#include <numeric>

#include "ans/error.hpp"

namespace ans {

namespace {

using u128 = unsigned __int128;

u128 floor_div(u128 a, u128 b) { return a / b; }
u128 ceil_div(u128 a, u128 b) { return (a + b - 1) / b; }

// floor or ceil of x * num / den, exact.
u128 scaled(State x, const BinaryProb& p, UabsVariant v) {
  const u128 prod = static_cast<u128>(x) * p.num();
  return v == UabsVariant::Ceiling ? ceil_div(prod, p.den()) : floor_div(prod, p.den());
}

State narrow(u128 value) {
  if (value > std::numeric_limits<State>::max()) {
    throw OverflowError("uABS state exceeds 64 bits; renormalize through a stream coder");
  }
  return static_cast<State>(value);
}

}  // namespace

BinaryProb::BinaryProb(std::uint64_t num, std::uint64_t den) {
  if (num == 0 || den == 0 || num >= den) {
    throw InvalidArgument("binary probability must satisfy 0 < num < den");
  }
  const auto g = std::gcd(num, den);
  num_ = num / g;
  den_ = den / g;
}

Rational BinaryProb::of(Symbol s) const {
  const auto den = static_cast<std::int64_t>(den_);
  const auto num = static_cast<std::int64_t>(num_);
  return s == 1 ? Rational(num, den) : Rational(den - num, den);
}

Symbol uabs_symbol(State x, const BinaryProb& p, UabsVariant v) {
  // (x+1) may wrap only at x = 2^64-1; widen before adding.
  const u128 next = static_cast<u128>(x) + 1;
  const u128 prod = next * p.num();
  const u128 upper = v == UabsVariant::Ceiling ? ceil_div(prod, p.den()) : floor_div(prod, p.den());
  return static_cast<Symbol>(upper - scaled(x, p, v));
}

Decoded uabs_decode(State x, const BinaryProb& p, UabsVariant v) {
  const auto s = uabs_symbol(x, p, v);
  const auto x1 = static_cast<State>(scaled(x, p, v));
  return {s, s == 1 ? x1 : x - x1};
}

State uabs_encode(Symbol s, State x, const BinaryProb& p, UabsVariant v) {
  if (s > 1) throw InvalidArgument("uABS symbol must be 0 or 1");
  if (x == 0) throw InvalidArgument("uABS encoding requires x >= 1");
  const u128 num = p.num();
  const u128 den = p.den();
  const u128 den0 = den - num;  // 1-p = den0/den
  const u128 wide = x;
  if (v == UabsVariant::Ceiling) {
    // C(0,x) = ceil((x+1)/(1-p)) - 1,  C(1,x) = floor(x/p)
    if (s == 0) return narrow(ceil_div((wide + 1) * den, den0) - 1);
    return narrow(floor_div(wide * den, num));
  }
  // C(0,x) = floor(x/(1-p)),  C(1,x) = ceil((x+1)/p) - 1
  if (s == 0) return narrow(floor_div(wide * den, den0));
  return narrow(ceil_div((wide + 1) * den, num) - 1);
}

Rational uabs_inaccuracy(State x, const BinaryProb& p, UabsVariant v) {
  if (x == 0) throw InvalidArgument("inaccuracy is defined for x >= 1");
  if (x > static_cast<State>(std::numeric_limits<std::int64_t>::max() / static_cast<std::int64_t>(p.den()))) {
    throw OverflowError("state too large for exact inaccuracy");
  }
  const auto d = uabs_decode(x, p, v);
  return Rational(static_cast<std::int64_t>(d.state), static_cast<std::int64_t>(x)) - p.of(d.symbol);
}

}  // namespace ans
