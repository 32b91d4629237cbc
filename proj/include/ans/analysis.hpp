#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "ans/quantized_dist.hpp"
#include "ans/stream.hpp"
#include "ans/types.hpp"
#include "ans/uabs.hpp"

namespace ans {

/// A stream coder seen as a Markov chain over I driven by an i.i.d. source.
struct AutomatonSpec {
  StreamConfig cfg;
  std::size_t alphabet = 0;
  /// Source probabilities p_s.
  std::vector<double> probs;
  /// Transition (x, s) lives at index (x - l) * alphabet + s.
  std::vector<std::uint32_t> next;
  std::vector<std::uint8_t> digits;
  /// D(x) for every state, when known; used for the inaccuracy audit.
  std::vector<Decoded> decoded;

  std::size_t state_count() const { return static_cast<std::size_t>(cfg.state_count()); }
  std::uint32_t next_index(std::size_t x_index, Symbol s) const { return next[x_index * alphabet + s]; }
  unsigned digit_count(std::size_t x_index, Symbol s) const { return digits[x_index * alphabet + s]; }

  /// Throws InvalidArgument on inconsistent sizes or probabilities.
  void validate() const;
};

/// Builds the automaton of a stream codec by running every (s, x) step.
AutomatonSpec automaton_from_codec(const StreamCodec& codec, std::span<const double> probs);

struct StationaryOptions {
  double tolerance = 1e-12;
  std::size_t max_iterations = 100000;
  double damping = 0.99;
  /// Start vector; uniform when empty. Ignored for reducible chains.
  std::span<const double> initial = {};
};

struct StationaryDist {
  /// prob[x - l]
  std::vector<double> prob;
  double residual = 0.0;
  std::size_t iterations = 0;
  bool damped = false;
  /// The chain is reducible; prob is restricted to the states reachable from l.
  bool reducible = false;

  double at(const StreamConfig& cfg, State x) const { return prob[x - cfg.l()]; }
};

/// Fixed point of Pr(x) = sum over (s, y) with C(s, y) = x of Pr(y) p_s,
/// by power iteration. Damping kicks in only when the residual stalls.
/// Throws Error when the iteration does not converge.
StationaryDist stationary_distribution(const AutomatonSpec& a, const StationaryOptions& opts = {});

struct EntropyReport {
  double expected_bits_per_symbol = 0.0;
  double shannon_entropy = 0.0;
  double delta_h = 0.0;
  /// eps_s(x) = x_s / x - p_s per state (empty if the automaton has no D).
  std::vector<double> inaccuracies;
  StationaryDist stationary;
};

double shannon_entropy(std::span<const double> probs);

/// Expected bits per symbol of the automaton minus the source entropy.
EntropyReport delta_H(const AutomatonSpec& a, const StationaryOptions& opts = {});

struct KlDivergence {
  double exact = 0.0;
  /// sum_s (q_s - p_s)^2 / (p_s ln 4)
  double quadratic = 0.0;
};

/// sum_s p_s lg(p_s / q_s). Throws InvalidArgument when q_s = 0 < p_s.
KlDivergence kl_distance(std::span<const double> p, std::span<const double> q);

/// 1/(l^2 ln 4) * (1/p + 1/(1-p)).
double uabs_bound(const BinaryProb& p, State l);
/// The uABS-style bound summed over all symbols and multiplied by m.
double rans_bound(const QuantizedDist& d, State l);
/// 1/(l^2 ln 4) * sum_s (1/p_s) (p_s / (2 min p) + 1/2)^2 with p_s = l_s/m.
double tans_bound(std::span<const double> probs, State l);
double tans_bound(const QuantizedDist& d, State l);

struct InverseFit {
  /// c = 1 / sum_{x in I} 1/x
  double scale = 0.0;
  double max_deviation = 0.0;
  /// c / x per state
  std::vector<double> fitted;
};

InverseFit inverse_x_fit(const StationaryDist& dist, const StreamConfig& cfg);

// ---------------------------------------------------------------------------
// CSV output

using CsvCell = std::variant<std::int64_t, double, std::string>;

class CsvTable {
 public:
  explicit CsvTable(std::vector<std::string> header) : header_(std::move(header)) {}

  void add_row(std::vector<CsvCell> row);
  const std::vector<std::string>& header() const { return header_; }
  const std::vector<std::vector<CsvCell>>& rows() const { return rows_; }

 private:
  std::vector<std::string> header_;
  std::vector<std::vector<CsvCell>> rows_;
};

/// Header line plus rows sorted ascending; doubles use 12 significant digits.
std::string to_csv(const CsvTable& table);
void emit_csv(const CsvTable& table, const std::filesystem::path& path);

struct SweepRow {
  std::vector<double> params;
  double delta_h = 0.0;
  double bound = 0.0;
  double expected_bits = 0.0;
  double entropy = 0.0;
};

/// Columns: params..., delta_H, bound, expected_bits, entropy.
CsvTable sweep_csv(std::vector<std::string> param_names, std::span<const SweepRow> rows);
/// Columns: state, prob, c_over_x.
CsvTable stationary_csv(const StationaryDist& dist, const StreamConfig& cfg);

}  // namespace ans
