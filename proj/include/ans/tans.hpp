#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <queue>
#include <span>
#include <string>
#include <vector>

#include "ans/analysis.hpp"
#include "ans/quantized_dist.hpp"
#include "ans/stream.hpp"
#include "ans/types.hpp"

namespace ans {

/// Assignment of a symbol to every state of I = {l, ..., b l - 1}.
///
/// Symbol s must appear exactly (b-1) l_s times, where sum l_s = l. Its
/// appearances, enumerated from x_s = l_s upward, give C(s, .) on
/// I_s = {l_s, ..., b l_s - 1}.
class SpreadFunction {
 public:
  /// Throws InvalidArgument unless the counts match the frequencies.
  SpreadFunction(StreamConfig cfg, std::vector<std::uint32_t> freqs, std::vector<Symbol> assignment);

  const StreamConfig& config() const { return cfg_; }
  std::span<const std::uint32_t> freqs() const { return freqs_; }
  std::span<const Symbol> assignment() const { return assignment_; }
  std::size_t alphabet_size() const { return freqs_.size(); }
  Symbol at(State x) const { return assignment_[x - cfg_.l()]; }

  friend bool operator==(const SpreadFunction&, const SpreadFunction&) = default;

 private:
  StreamConfig cfg_;
  std::vector<std::uint32_t> freqs_;
  std::vector<Symbol> assignment_;
};

/// Checks the count invariant of an arbitrary assignment.
bool is_valid_spread(const StreamConfig& cfg, std::span<const std::uint32_t> freqs,
                     std::span<const Symbol> assignment);

struct EncodingTable {
  StreamConfig cfg;
  std::vector<std::uint32_t> freqs;
  /// Digits moved from the top state, k_s.
  std::vector<unsigned> k;
  /// X_s = l_s b^{k_s}; states below it move k_s - 1 digits.
  std::vector<State> threshold;
  /// next_state[s][x_s - l_s] for x_s in I_s.
  std::vector<std::vector<State>> next_state;

  unsigned digit_count(Symbol s, State x) const { return x >= threshold[s] ? k[s] : k[s] - 1; }
};

struct DecodingEntry {
  Symbol symbol;
  /// Digits always read; one more is read when the state is still below l.
  std::uint8_t digit_count;
  /// x_s; the new state is x_s b^{digit_count} + digits.
  State new_base;

  friend bool operator==(const DecodingEntry&, const DecodingEntry&) = default;
};

struct DecodingTable {
  StreamConfig cfg;
  /// entries[x - l]
  std::vector<DecodingEntry> entries;
};

struct TansTables {
  EncodingTable encoding;
  DecodingTable decoding;
};

TansTables build_tables(const SpreadFunction& spread);

/// One pending appearance of a symbol: target position
/// v = (2 i + 1) l / (2 l_s).
struct Candidate {
  std::uint64_t index;
  Symbol symbol;
  std::uint32_t freq;
};

/// Min-ordering on v; equal v prefers the smaller l_s, then the larger
/// symbol index. Values are compared exactly by cross multiplication.
struct CandidateAfter {
  bool operator()(const Candidate& a, const Candidate& b) const;
};

class CandidateQueue {
 public:
  void put(Candidate c) { heap_.push(c); }
  const Candidate& top() const { return heap_.top(); }
  Candidate getmin() {
    auto c = heap_.top();
    heap_.pop();
    return c;
  }
  std::size_t size() const { return heap_.size(); }
  bool empty() const { return heap_.empty(); }

 private:
  std::priority_queue<Candidate, std::vector<Candidate>, CandidateAfter> heap_;
};

/// Spreads symbols by repeatedly taking the pending appearance with the
/// smallest target position. Requires sum l_s = l.
SpreadFunction precise_init(const QuantizedDist& d, const StreamConfig& cfg);

/// C and D restricted to I_s and I.
class TansCodec final : public Codec {
 public:
  explicit TansCodec(const SpreadFunction& spread);

  std::size_t alphabet_size() const override { return tables_.encoding.freqs.size(); }
  State encode(Symbol s, State x) const override;
  Decoded decode(State x) const override;

  const TansTables& tables() const { return tables_; }

 private:
  TansTables tables_;
};

/// Table-driven stream encoding from x = l, symbols in the order given.
State tans_encode(std::span<const Symbol> symbols, const EncodingTable& table, DigitStack& out);

/// Pops `count` symbols in reverse encoding order. Throws FormatError when
/// the stream does not end in state l.
std::vector<Symbol> tans_decode(State state, DigitStack& in, std::size_t count, const DecodingTable& table);

/// Automaton of a tANS table driven by the given source probabilities.
AutomatonSpec automaton_from_tables(const TansTables& tables, std::span<const double> probs);

struct ExhaustiveResult {
  SpreadFunction best;
  double delta_h;
  std::uint64_t optima_count;
  std::uint64_t enumerated;
};

/// Scores every spread with the given counts and reports the minimum ΔH and
/// how many spreads attain it (within 1e-12). Throws BudgetExceeded when the
/// multinomial count exceeds `budget`.
ExhaustiveResult exhaustive_search(const QuantizedDist& d, const StreamConfig& cfg,
                                   std::span<const double> source_probs, std::uint64_t budget = 1'000'000);

/// Number of distinct spreads, the multinomial ((b-1) l)! / prod ((b-1) l_s)!,
/// or nullopt when it exceeds `cap`.
std::optional<std::uint64_t> spread_count(const QuantizedDist& d, const StreamConfig& cfg, std::uint64_t cap);

struct QabsFamily {
  std::uint32_t state_count;
  std::vector<double> p_grid;
  /// Bit i of spreads[j] is the symbol at state l + i.
  std::vector<std::uint32_t> spreads;
  /// curves[j][g] = ΔH of spread j at p_grid[g] (p is the probability of 1).
  std::vector<std::vector<double>> curves;
  /// One index per distinct curve (equal within 1e-9 over the grid) that is
  /// lowest at some grid point, ascending.
  std::vector<std::size_t> envelope;
};

/// Evaluates every binary spread on l = state_count states (b = 2) with at
/// least one appearance of each symbol.
QabsFamily qabs_family(std::uint32_t state_count, std::span<const double> p_grid, std::uint64_t budget = 1u << 16);

struct LowProbCoder {
  SpreadFunction spread;
  StreamConfig cfg;
};

/// The (00..01) automaton on l = round(0.5/p) states: symbol 0 is the
/// frequent one, symbol 1 (probability p) sits only at state 2l - 1.
/// Requires 0 < p < 0.05.
LowProbCoder low_prob_coder(double p);

/// Header "l b n l_0 .. l_{n-1}" then one "x symbol" line per state.
std::string dump_spread(const SpreadFunction& spread);
SpreadFunction parse_spread(const std::string& text);

}  // namespace ans
