#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "ans/types.hpp"

namespace ans {

/// Alphabet with integer frequencies l_s summing to m.
///
/// symbol_of() is tabled over the whole cycle 0..m-1, so m is expected to be
/// modest (tables up to a few million entries).
class QuantizedDist {
 public:
  explicit QuantizedDist(std::vector<std::uint32_t> freqs);

  std::size_t size() const { return freqs_.size(); }
  std::uint32_t freq(Symbol s) const { return freqs_[s]; }
  std::uint32_t cumul(Symbol s) const { return cumul_[s]; }
  std::uint64_t total() const { return total_; }
  Symbol symbol_of(std::uint64_t pos) const { return symbol_of_[pos]; }
  std::span<const std::uint32_t> freqs() const { return freqs_; }
  double probability(Symbol s) const { return static_cast<double>(freqs_[s]) / static_cast<double>(total_); }
  std::vector<double> probabilities() const;

  /// log2(m) when m is a power of two, -1 otherwise.
  int total_log2() const { return total_log2_; }

  friend bool operator==(const QuantizedDist& a, const QuantizedDist& b) { return a.freqs_ == b.freqs_; }

 private:
  std::vector<std::uint32_t> freqs_;
  std::vector<std::uint32_t> cumul_;
  std::vector<Symbol> symbol_of_;
  std::uint64_t total_ = 0;
  int total_log2_ = -1;
};

}  // namespace ans
