#include "ans/quantized_dist.hpp"

#include <algorithm>
#include <bit>

#include "ans/error.hpp"

namespace ans {

namespace {
constexpr std::uint64_t kMaxCycle = std::uint64_t{1} << 28;
}

QuantizedDist::QuantizedDist(std::vector<std::uint32_t> freqs) : freqs_(std::move(freqs)) {
  if (freqs_.empty()) throw InvalidArgument("distribution needs at least one symbol");
  cumul_.reserve(freqs_.size());
  for (const auto f : freqs_) {
    if (f == 0) throw InvalidArgument("every frequency must be at least 1");
    cumul_.push_back(static_cast<std::uint32_t>(total_));
    total_ += f;
    if (total_ > kMaxCycle) throw InvalidArgument("frequency total too large to table");
  }
  symbol_of_.resize(total_);
  for (Symbol s = 0; s < freqs_.size(); ++s) {
    std::fill_n(symbol_of_.begin() + cumul_[s], freqs_[s], s);
  }
  if (std::has_single_bit(total_)) total_log2_ = std::countr_zero(total_);
}

std::vector<double> QuantizedDist::probabilities() const {
  std::vector<double> p(freqs_.size());
  for (Symbol s = 0; s < p.size(); ++s) p[s] = probability(s);
  return p;
}

}  // namespace ans
