#include "ans/tans.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "ans/error.hpp"

namespace ans {

namespace {

using u128 = unsigned __int128;

State pow_b(State b, unsigned k) {
  u128 r = 1;
  for (unsigned i = 0; i < k; ++i) r *= b;
  return static_cast<State>(r);
}

// Smallest k with (x_s + 1) b^k > l.
std::uint8_t min_decode_digits(State xs, const StreamConfig& cfg) {
  std::uint8_t k = 0;
  for (u128 reach = static_cast<u128>(xs) + 1; reach <= cfg.l(); reach *= cfg.b()) ++k;
  return k;
}

std::vector<std::uint64_t> appearance_counts(const StreamConfig& cfg, std::span<const std::uint32_t> freqs) {
  std::vector<std::uint64_t> counts;
  counts.reserve(freqs.size());
  for (const auto f : freqs) counts.push_back((cfg.b() - 1) * static_cast<std::uint64_t>(f));
  return counts;
}

void require_binary_digits(const StreamConfig& cfg) {
  if (cfg.digit_bits() == 0) throw InvalidArgument("table coding requires a power-of-two digit base");
}

}  // namespace

// ---------------------------------------------------------------------------
// SpreadFunction

bool is_valid_spread(const StreamConfig& cfg, std::span<const std::uint32_t> freqs,
                     std::span<const Symbol> assignment) {
  if (freqs.empty() || assignment.size() != cfg.state_count()) return false;
  std::uint64_t sum = 0;
  for (const auto f : freqs) {
    if (f == 0) return false;
    sum += f;
  }
  if (sum != cfg.l()) return false;
  std::vector<std::uint64_t> seen(freqs.size(), 0);
  for (const auto s : assignment) {
    if (s >= freqs.size()) return false;
    ++seen[s];
  }
  return seen == appearance_counts(cfg, freqs);
}

SpreadFunction::SpreadFunction(StreamConfig cfg, std::vector<std::uint32_t> freqs, std::vector<Symbol> assignment)
    : cfg_(cfg), freqs_(std::move(freqs)), assignment_(std::move(assignment)) {
  if (!is_valid_spread(cfg_, freqs_, assignment_)) {
    throw InvalidArgument("spread must hold (b-1) l_s appearances of each symbol with sum l_s = l");
  }
}

// ---------------------------------------------------------------------------
// Tables

TansTables build_tables(const SpreadFunction& spread) {
  const auto& cfg = spread.config();
  const auto n = spread.alphabet_size();
  EncodingTable enc{cfg, {spread.freqs().begin(), spread.freqs().end()}, {}, {}, {}};
  DecodingTable dec{cfg, {}};
  std::vector<State> next_xs(n);
  for (Symbol s = 0; s < n; ++s) {
    const State ls = enc.freqs[s];
    const unsigned k = digits_to_transfer(cfg.upper() - 1, ls, cfg.b());
    enc.k.push_back(k);
    enc.threshold.push_back(ls * pow_b(cfg.b(), k));
    enc.next_state.emplace_back((cfg.b() - 1) * ls);
    next_xs[s] = ls;
  }
  dec.entries.reserve(cfg.state_count());
  for (State x = cfg.l(); x < cfg.upper(); ++x) {
    const Symbol s = spread.at(x);
    const State xs = next_xs[s]++;
    enc.next_state[s][xs - enc.freqs[s]] = x;
    dec.entries.push_back({s, min_decode_digits(xs, cfg), xs});
  }
  return {std::move(enc), std::move(dec)};
}

bool CandidateAfter::operator()(const Candidate& a, const Candidate& b) const {
  // v_a < v_b  <=>  (2 i_a + 1) l_b < (2 i_b + 1) l_a
  const u128 lhs = static_cast<u128>(2 * a.index + 1) * b.freq;
  const u128 rhs = static_cast<u128>(2 * b.index + 1) * a.freq;
  if (lhs != rhs) return lhs > rhs;
  if (a.freq != b.freq) return a.freq > b.freq;
  return a.symbol < b.symbol;
}

SpreadFunction precise_init(const QuantizedDist& d, const StreamConfig& cfg) {
  if (d.total() != cfg.l()) throw InvalidArgument("precise initialization requires sum l_s = l");
  std::vector<std::uint32_t> freqs(d.freqs().begin(), d.freqs().end());
  const auto remaining = appearance_counts(cfg, freqs);
  CandidateQueue queue;
  for (Symbol s = 0; s < freqs.size(); ++s) queue.put({0, s, freqs[s]});
  std::vector<Symbol> assignment;
  assignment.reserve(cfg.state_count());
  while (!queue.empty()) {
    const auto c = queue.getmin();
    assignment.push_back(c.symbol);
    if (c.index + 1 < remaining[c.symbol]) queue.put({c.index + 1, c.symbol, c.freq});
  }
  return SpreadFunction(cfg, std::move(freqs), std::move(assignment));
}

TansCodec::TansCodec(const SpreadFunction& spread) : tables_(build_tables(spread)) {}

State TansCodec::encode(Symbol s, State x) const {
  const auto& enc = tables_.encoding;
  if (s >= enc.freqs.size()) throw InvalidArgument("symbol outside the alphabet");
  const State ls = enc.freqs[s];
  if (x < ls || x - ls >= enc.next_state[s].size()) throw InvalidArgument("tANS encoding is defined on I_s only");
  return enc.next_state[s][x - ls];
}

Decoded TansCodec::decode(State x) const {
  const auto& dec = tables_.decoding;
  if (!dec.cfg.contains(x)) throw InvalidArgument("tANS decoding is defined on I only");
  const auto& e = dec.entries[x - dec.cfg.l()];
  return {e.symbol, e.new_base};
}

State tans_encode(std::span<const Symbol> symbols, const EncodingTable& table, DigitStack& out) {
  require_binary_digits(table.cfg);
  const unsigned w = table.cfg.digit_bits();
  if (out.digit_bits() != w) throw InvalidArgument("digit stack base differs from the table base");
  const auto n = table.freqs.size();
  State x = table.cfg.l();
  for (const Symbol s : symbols) {
    if (s >= n) throw InvalidArgument("symbol outside the alphabet");
    const unsigned shift = table.digit_count(s, x) * w;
    out.push_digits(x & ((State{1} << shift) - 1), shift / w);
    x = table.next_state[s][(x >> shift) - table.freqs[s]];
  }
  return x;
}

std::vector<Symbol> tans_decode(State state, DigitStack& in, std::size_t count, const DecodingTable& table) {
  require_binary_digits(table.cfg);
  const auto& cfg = table.cfg;
  const unsigned w = cfg.digit_bits();
  if (in.digit_bits() != w) throw InvalidArgument("digit stack base differs from the table base");
  if (!cfg.contains(state)) throw FormatError("initial decoder state outside I");
  std::vector<Symbol> symbols;
  symbols.reserve(std::min<std::size_t>(count, std::size_t{1} << 24));
  State x = state;
  for (std::size_t i = 0; i < count; ++i) {
    const auto& e = table.entries[x - cfg.l()];
    symbols.push_back(e.symbol);
    x = (e.new_base << (e.digit_count * w)) | in.pop_digits(e.digit_count);
    if (x < cfg.l()) x = (x << w) | in.pop();
  }
  if (x != cfg.l()) throw FormatError("terminal state mismatch");
  return symbols;
}

AutomatonSpec automaton_from_tables(const TansTables& tables, std::span<const double> probs) {
  const auto& enc = tables.encoding;
  const auto& cfg = enc.cfg;
  const auto n = enc.freqs.size();
  AutomatonSpec a{cfg, n, {probs.begin(), probs.end()}, {}, {}, {}};
  const auto states = a.state_count();
  a.next.resize(states * n);
  a.digits.resize(states * n);
  a.decoded.reserve(states);
  for (State x = cfg.l(); x < cfg.upper(); ++x) {
    const auto xi = static_cast<std::size_t>(x - cfg.l());
    for (Symbol s = 0; s < n; ++s) {
      const unsigned k = enc.digit_count(s, x);
      const State reduced = x / pow_b(cfg.b(), k);
      a.next[xi * n + s] = static_cast<std::uint32_t>(enc.next_state[s][reduced - enc.freqs[s]] - cfg.l());
      a.digits[xi * n + s] = static_cast<std::uint8_t>(k);
    }
    const auto& e = tables.decoding.entries[xi];
    a.decoded.push_back({e.symbol, e.new_base});
  }
  a.validate();
  return a;
}

// ---------------------------------------------------------------------------
// Searches

std::optional<std::uint64_t> spread_count(const QuantizedDist& d, const StreamConfig& cfg, std::uint64_t cap) {
  u128 result = 1;
  std::uint64_t placed = 0;
  for (const auto c : appearance_counts(cfg, d.freqs())) {
    for (std::uint64_t j = 1; j <= c; ++j) {
      ++placed;
      result = result * placed / j;
      if (result > cap) return std::nullopt;
    }
  }
  return static_cast<std::uint64_t>(result);
}

ExhaustiveResult exhaustive_search(const QuantizedDist& d, const StreamConfig& cfg,
                                   std::span<const double> source_probs, std::uint64_t budget) {
  if (d.total() != cfg.l()) throw InvalidArgument("spread search requires sum l_s = l");
  if (source_probs.size() != d.size()) throw InvalidArgument("one source probability per symbol");
  const auto total = spread_count(d, cfg, budget);
  if (!total) throw BudgetExceeded("spread enumeration exceeds the budget");

  std::vector<std::uint32_t> freqs(d.freqs().begin(), d.freqs().end());
  std::vector<Symbol> assignment;
  assignment.reserve(cfg.state_count());
  const auto counts = appearance_counts(cfg, freqs);
  for (Symbol s = 0; s < counts.size(); ++s) assignment.insert(assignment.end(), counts[s], s);

  std::vector<double> scores;
  scores.reserve(*total);
  std::vector<Symbol> best_assignment;
  double best = std::numeric_limits<double>::infinity();
  do {
    const SpreadFunction spread(cfg, freqs, assignment);
    const double dh = delta_H(automaton_from_tables(build_tables(spread), source_probs)).delta_h;
    scores.push_back(dh);
    if (dh < best) {
      best = dh;
      best_assignment = assignment;
    }
  } while (std::next_permutation(assignment.begin(), assignment.end()));

  constexpr double kTie = 1e-12;
  const auto optima =
      static_cast<std::uint64_t>(std::count_if(scores.begin(), scores.end(), [&](double v) { return v <= best + kTie; }));
  return {SpreadFunction(cfg, std::move(freqs), std::move(best_assignment)), best, optima, scores.size()};
}

QabsFamily qabs_family(std::uint32_t state_count, std::span<const double> p_grid, std::uint64_t budget) {
  if (state_count < 2 || state_count > 31) throw InvalidArgument("qABS families need 2..31 states");
  for (const double p : p_grid) {
    if (!(p > 0.0 && p < 1.0)) throw InvalidArgument("grid probabilities must lie in (0, 1)");
  }
  const std::uint64_t spreads = (std::uint64_t{1} << state_count) - 2;
  if (spreads > budget) throw BudgetExceeded("qABS family exceeds the budget");

  QabsFamily fam{state_count, {p_grid.begin(), p_grid.end()}, {}, {}, {}};
  fam.spreads.reserve(spreads);
  fam.curves.reserve(spreads);
  const StreamConfig cfg(state_count, 2);
  std::vector<Symbol> assignment(state_count);
  for (std::uint32_t mask = 1; mask + 1 < (std::uint32_t{1} << state_count); ++mask) {
    std::uint32_t ones = 0;
    for (std::uint32_t i = 0; i < state_count; ++i) {
      assignment[i] = (mask >> i) & 1U;
      ones += assignment[i];
    }
    const SpreadFunction spread(cfg, {state_count - ones, ones}, assignment);
    const std::vector<double> seed{0.5, 0.5};
    auto a = automaton_from_tables(build_tables(spread), seed);
    std::vector<double> curve;
    curve.reserve(p_grid.size());
    std::vector<double> warm;
    for (const double p : p_grid) {
      a.probs = {1.0 - p, p};
      StationaryOptions opts;
      opts.initial = warm;
      // a rare symbol mixes slowly: some chains need ~1.3e5 steps at p = 0.01
      opts.max_iterations = 1'000'000;
      auto report = delta_H(a, opts);
      curve.push_back(report.delta_h);
      warm = std::move(report.stationary.prob);
    }
    fam.spreads.push_back(mask);
    fam.curves.push_back(std::move(curve));
  }
  // Spreads with equal curves count once; the lowest index represents them.
  constexpr double kSameCurve = 1e-9;
  auto same_curve = [&](std::size_t a, std::size_t b) {
    for (std::size_t g = 0; g < p_grid.size(); ++g) {
      if (std::abs(fam.curves[a][g] - fam.curves[b][g]) > kSameCurve) return false;
    }
    return true;
  };
  for (std::size_t g = 0; g < p_grid.size(); ++g) {
    std::size_t arg = 0;
    for (std::size_t j = 1; j < fam.curves.size(); ++j) {
      if (fam.curves[j][g] < fam.curves[arg][g]) arg = j;
    }
    const bool known = std::any_of(fam.envelope.begin(), fam.envelope.end(), [&](std::size_t e) { return same_curve(e, arg); });
    if (!known) fam.envelope.push_back(arg);
  }
  std::sort(fam.envelope.begin(), fam.envelope.end());
  return fam;
}

LowProbCoder low_prob_coder(double p) {
  if (!(p > 0.0 && p < 0.05)) throw InvalidArgument("low-probability coder needs 0 < p < 0.05");
  const auto l = static_cast<std::uint32_t>(std::llround(0.5 / p));
  const StreamConfig cfg(l, 2);
  std::vector<Symbol> assignment(l, 0);
  assignment.back() = 1;
  return {SpreadFunction(cfg, {l - 1, 1}, std::move(assignment)), cfg};
}

// ---------------------------------------------------------------------------
// Text dump

std::string dump_spread(const SpreadFunction& spread) {
  std::ostringstream out;
  const auto& cfg = spread.config();
  out << cfg.l() << ' ' << cfg.b() << ' ' << spread.alphabet_size();
  for (const auto f : spread.freqs()) out << ' ' << f;
  out << '\n';
  for (State x = cfg.l(); x < cfg.upper(); ++x) out << x << ' ' << spread.at(x) << '\n';
  return out.str();
}

SpreadFunction parse_spread(const std::string& text) {
  std::istringstream in(text);
  State l = 0, b = 0;
  std::size_t n = 0;
  if (!(in >> l >> b >> n) || n == 0) throw FormatError("bad spread header");
  std::vector<std::uint32_t> freqs(n);
  for (auto& f : freqs) {
    if (!(in >> f)) throw FormatError("bad spread header");
  }
  const StreamConfig cfg(l, b);
  std::vector<Symbol> assignment;
  assignment.reserve(cfg.state_count());
  for (State expect = cfg.l(); expect < cfg.upper(); ++expect) {
    State x = 0;
    Symbol s = 0;
    if (!(in >> x >> s) || x != expect) throw FormatError("spread lines must list every state in order");
    assignment.push_back(s);
  }
  if (!is_valid_spread(cfg, freqs, assignment)) throw FormatError("spread counts do not match the header");
  return SpreadFunction(cfg, std::move(freqs), std::move(assignment));
}

}  // namespace ans
