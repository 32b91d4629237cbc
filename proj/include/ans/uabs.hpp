#pragma once

#include <cstdint>

#include "ans/types.hpp"

namespace ans {

/// Probability p = num/den of symbol 1, kept in lowest terms.
class BinaryProb {
 public:
  BinaryProb(std::uint64_t num, std::uint64_t den);

  std::uint64_t num() const { return num_; }
  std::uint64_t den() const { return den_; }
  /// Probability of symbol `s` as an exact rational.
  Rational of(Symbol s) const;
  double value() const { return static_cast<double>(num_) / static_cast<double>(den_); }

  friend bool operator==(const BinaryProb&, const BinaryProb&) = default;

 private:
  std::uint64_t num_;
  std::uint64_t den_;
};

/// x_1 = ceil(x p) (the default) or x_1 = floor(x p).
enum class UabsVariant { Ceiling, Floor };

/// Symbol carried by position x, s(x) = ceil((x+1)p) - ceil(xp).
Symbol uabs_symbol(State x, const BinaryProb& p, UabsVariant v = UabsVariant::Ceiling);

/// D(x) = (s, x_s): x_s counts the appearances of s below x.
Decoded uabs_decode(State x, const BinaryProb& p, UabsVariant v = UabsVariant::Ceiling);

/// C(s, x): position of the x-th appearance of s. Requires x >= 1 and throws
/// OverflowError when the result does not fit in a State.
State uabs_encode(Symbol s, State x, const BinaryProb& p, UabsVariant v = UabsVariant::Ceiling);

/// eps(x) = x_s / x - p_s for s = s(x). Requires x >= 1.
Rational uabs_inaccuracy(State x, const BinaryProb& p, UabsVariant v = UabsVariant::Ceiling);

class UabsCodec final : public Codec {
 public:
  explicit UabsCodec(BinaryProb p, UabsVariant v = UabsVariant::Ceiling) : p_(p), variant_(v) {}

  std::size_t alphabet_size() const override { return 2; }
  State encode(Symbol s, State x) const override { return uabs_encode(s, x, p_, variant_); }
  Decoded decode(State x) const override { return uabs_decode(x, p_, variant_); }

  const BinaryProb& probability() const { return p_; }
  UabsVariant variant() const { return variant_; }

 private:
  BinaryProb p_;
  UabsVariant variant_;
};

}  // namespace ans
