#include "ans/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <numeric>

#include "ans/error.hpp"

namespace ans {

namespace {

constexpr std::size_t kStallWindow = 64;

}  // namespace

void AutomatonSpec::validate() const {
  const auto n = state_count();
  if (alphabet == 0 || probs.size() != alphabet) throw InvalidArgument("one source probability per symbol");
  if (next.size() != n * alphabet || digits.size() != n * alphabet) {
    throw InvalidArgument("transition table size mismatch");
  }
  if (!decoded.empty() && decoded.size() != n) throw InvalidArgument("decoded table size mismatch");
  double sum = 0.0;
  for (const double p : probs) {
    if (!(p >= 0.0)) throw InvalidArgument("source probabilities must be nonnegative");
    sum += p;
  }
  if (std::abs(sum - 1.0) > 1e-9) throw InvalidArgument("source probabilities must sum to 1");
  for (const auto t : next) {
    if (t >= n) throw InvalidArgument("transition leaves I");
  }
}

AutomatonSpec automaton_from_codec(const StreamCodec& codec, std::span<const double> probs) {
  const auto& cfg = codec.config();
  const auto n = codec.codec().alphabet_size();
  AutomatonSpec a{cfg, n, {probs.begin(), probs.end()}, {}, {}, {}};
  const auto states = a.state_count();
  a.next.resize(states * n);
  a.digits.resize(states * n);
  a.decoded.reserve(states);
  for (State x = cfg.l(); x < cfg.upper(); ++x) {
    const auto xi = static_cast<std::size_t>(x - cfg.l());
    for (Symbol s = 0; s < n; ++s) {
      const auto k = digits_to_transfer(x, codec.ranges()[s].lower, cfg.b());
      State reduced = x;
      for (unsigned i = 0; i < k; ++i) reduced /= cfg.b();
      const State target = codec.codec().encode(s, reduced);
      if (!cfg.contains(target)) throw InvalidArgument("codec step leaves I");
      a.next[xi * n + s] = static_cast<std::uint32_t>(target - cfg.l());
      a.digits[xi * n + s] = static_cast<std::uint8_t>(k);
    }
    a.decoded.push_back(codec.codec().decode(x));
  }
  a.validate();
  return a;
}

StationaryDist stationary_distribution(const AutomatonSpec& a, const StationaryOptions& opts) {
  const auto n = a.state_count();
  const auto alpha = a.alphabet;
  StationaryDist out;

  // Reachability from state l, forward and backward, over positive-weight edges.
  std::vector<char> fwd(n, 0), bwd(n, 0);
  std::vector<std::uint32_t> stack{0};
  fwd[0] = 1;
  while (!stack.empty()) {
    const auto x = stack.back();
    stack.pop_back();
    for (Symbol s = 0; s < alpha; ++s) {
      if (a.probs[s] <= 0.0) continue;
      const auto y = a.next_index(x, s);
      if (!fwd[y]) {
        fwd[y] = 1;
        stack.push_back(y);
      }
    }
  }
  const auto reach = static_cast<std::size_t>(std::count(fwd.begin(), fwd.end(), 1));
  if (reach == n) {
    std::vector<std::vector<std::uint32_t>> preds(n);
    for (std::uint32_t x = 0; x < n; ++x) {
      for (Symbol s = 0; s < alpha; ++s) {
        if (a.probs[s] > 0.0) preds[a.next_index(x, s)].push_back(x);
      }
    }
    bwd[0] = 1;
    stack.push_back(0);
    while (!stack.empty()) {
      const auto x = stack.back();
      stack.pop_back();
      for (const auto y : preds[x]) {
        if (!bwd[y]) {
          bwd[y] = 1;
          stack.push_back(y);
        }
      }
    }
    out.reducible = std::count(bwd.begin(), bwd.end(), 1) != static_cast<std::ptrdiff_t>(n);
  } else {
    out.reducible = true;
  }

  std::vector<double> cur(n, 0.0), nxt(n, 0.0);
  if (!out.reducible && opts.initial.size() == n) {
    std::copy(opts.initial.begin(), opts.initial.end(), cur.begin());
  } else {
    for (std::size_t x = 0; x < n; ++x) cur[x] = fwd[x] ? 1.0 / static_cast<double>(reach) : 0.0;
  }

  double window_residual = std::numeric_limits<double>::infinity();
  double mix = 1.0;
  for (std::size_t it = 1; it <= opts.max_iterations; ++it) {
    std::fill(nxt.begin(), nxt.end(), 0.0);
    for (std::size_t x = 0; x < n; ++x) {
      const double px = cur[x];
      if (px == 0.0) continue;
      const auto* row = &a.next[x * alpha];
      for (Symbol s = 0; s < alpha; ++s) nxt[row[s]] += px * a.probs[s];
    }
    double total = 0.0;
    for (std::size_t x = 0; x < n; ++x) {
      nxt[x] = mix * nxt[x] + (1.0 - mix) * cur[x];
      total += nxt[x];
    }
    double residual = 0.0;
    for (std::size_t x = 0; x < n; ++x) {
      nxt[x] /= total;
      residual += std::abs(nxt[x] - cur[x]);
    }
    cur.swap(nxt);
    out.residual = residual;
    out.iterations = it;
    if (residual < opts.tolerance) {
      out.prob = std::move(cur);
      return out;
    }
    if (it % kStallWindow == 0) {
      if (!out.damped && residual > 0.5 * window_residual) {
        out.damped = true;
        mix = opts.damping;
      }
      window_residual = residual;
    }
  }
  throw Error("stationary distribution did not converge");
}

double shannon_entropy(std::span<const double> probs) {
  double h = 0.0;
  for (const double p : probs) {
    if (p > 0.0) h -= p * std::log2(p);
  }
  return h;
}

EntropyReport delta_H(const AutomatonSpec& a, const StationaryOptions& opts) {
  EntropyReport r;
  r.stationary = stationary_distribution(a, opts);
  const auto n = a.state_count();
  const double digit_bits = std::log2(static_cast<double>(a.cfg.b()));
  double bits = 0.0;
  for (std::size_t x = 0; x < n; ++x) {
    double per_state = 0.0;
    for (Symbol s = 0; s < a.alphabet; ++s) per_state += a.probs[s] * a.digit_count(x, s);
    bits += r.stationary.prob[x] * per_state;
  }
  r.expected_bits_per_symbol = bits * digit_bits;
  r.shannon_entropy = shannon_entropy(a.probs);
  r.delta_h = r.expected_bits_per_symbol - r.shannon_entropy;
  if (!a.decoded.empty()) {
    r.inaccuracies.reserve(n);
    for (std::size_t x = 0; x < n; ++x) {
      const double state = static_cast<double>(a.cfg.l() + x);
      const auto& d = a.decoded[x];
      r.inaccuracies.push_back(static_cast<double>(d.state) / state - a.probs[d.symbol]);
    }
  }
  return r;
}

KlDivergence kl_distance(std::span<const double> p, std::span<const double> q) {
  if (p.size() != q.size()) throw InvalidArgument("distributions must have the same support size");
  KlDivergence kl;
  const double ln4 = std::log(4.0);
  for (std::size_t s = 0; s < p.size(); ++s) {
    if (p[s] == 0.0) continue;
    if (q[s] <= 0.0) throw InvalidArgument("q_s = 0 where p_s > 0");
    kl.exact += p[s] * std::log2(p[s] / q[s]);
    const double eps = q[s] - p[s];
    kl.quadratic += eps * eps / (p[s] * ln4);
  }
  return kl;
}

double uabs_bound(const BinaryProb& p, State l) {
  const double v = p.value();
  const double ld = static_cast<double>(l);
  return (1.0 / v + 1.0 / (1.0 - v)) / (ld * ld * std::log(4.0));
}

double rans_bound(const QuantizedDist& d, State l) {
  double sum = 0.0;
  for (Symbol s = 0; s < d.size(); ++s) sum += 1.0 / d.probability(s);
  const double ld = static_cast<double>(l);
  return static_cast<double>(d.total()) * sum / (ld * ld * std::log(4.0));
}

double tans_bound(std::span<const double> probs, State l) {
  if (probs.empty()) throw InvalidArgument("empty distribution");
  const double pmin = *std::min_element(probs.begin(), probs.end());
  if (!(pmin > 0.0)) throw InvalidArgument("tANS bound needs every p_s > 0");
  double sum = 0.0;
  for (const double p : probs) {
    const double f = p / (2.0 * pmin) + 0.5;
    sum += f * f / p;
  }
  const double ld = static_cast<double>(l);
  return sum / (ld * ld * std::log(4.0));
}

double tans_bound(const QuantizedDist& d, State l) { return tans_bound(d.probabilities(), l); }

InverseFit inverse_x_fit(const StationaryDist& dist, const StreamConfig& cfg) {
  if (dist.prob.size() != cfg.state_count()) throw InvalidArgument("distribution does not match the interval");
  InverseFit fit;
  double harmonic = 0.0;
  for (State x = cfg.l(); x < cfg.upper(); ++x) harmonic += 1.0 / static_cast<double>(x);
  fit.scale = 1.0 / harmonic;
  fit.fitted.reserve(dist.prob.size());
  for (State x = cfg.l(); x < cfg.upper(); ++x) {
    const double f = fit.scale / static_cast<double>(x);
    fit.fitted.push_back(f);
    fit.max_deviation = std::max(fit.max_deviation, std::abs(dist.prob[x - cfg.l()] - f));
  }
  return fit;
}

// ---------------------------------------------------------------------------
// CSV

void CsvTable::add_row(std::vector<CsvCell> row) {
  if (row.size() != header_.size()) throw InvalidArgument("CSV row width differs from the header");
  rows_.push_back(std::move(row));
}

namespace {

std::string format_cell(const CsvCell& cell) {
  if (const auto* i = std::get_if<std::int64_t>(&cell)) return std::to_string(*i);
  if (const auto* d = std::get_if<double>(&cell)) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", *d);
    return buf;
  }
  return std::get<std::string>(cell);
}

// Numbers before strings; numbers compared by value.
bool cell_less(const CsvCell& a, const CsvCell& b) {
  const bool as = std::holds_alternative<std::string>(a);
  const bool bs = std::holds_alternative<std::string>(b);
  if (as || bs) {
    if (as && bs) return std::get<std::string>(a) < std::get<std::string>(b);
    return bs;
  }
  const auto num = [](const CsvCell& c) {
    if (const auto* i = std::get_if<std::int64_t>(&c)) return static_cast<long double>(*i);
    return static_cast<long double>(std::get<double>(c));
  };
  return num(a) < num(b);
}

}  // namespace

std::string to_csv(const CsvTable& table) {
  auto rows = table.rows();
  std::stable_sort(rows.begin(), rows.end(), [](const auto& a, const auto& b) {
    return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end(), cell_less);
  });
  std::string text;
  for (std::size_t i = 0; i < table.header().size(); ++i) {
    if (i) text += ',';
    text += table.header()[i];
  }
  text += '\n';
  for (const auto& row : rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) text += ',';
      text += format_cell(row[i]);
    }
    text += '\n';
  }
  return text;
}

void emit_csv(const CsvTable& table, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot open " + path.string() + " for writing");
  out << to_csv(table);
  if (!out) throw Error("failed writing " + path.string());
}

CsvTable sweep_csv(std::vector<std::string> param_names, std::span<const SweepRow> rows) {
  auto header = param_names;
  for (const char* col : {"delta_H", "bound", "expected_bits", "entropy"}) header.emplace_back(col);
  CsvTable table(std::move(header));
  for (const auto& r : rows) {
    if (r.params.size() != param_names.size()) throw InvalidArgument("sweep row parameter count mismatch");
    std::vector<CsvCell> cells(r.params.begin(), r.params.end());
    for (const double v : {r.delta_h, r.bound, r.expected_bits, r.entropy}) cells.emplace_back(v);
    table.add_row(std::move(cells));
  }
  return table;
}

CsvTable stationary_csv(const StationaryDist& dist, const StreamConfig& cfg) {
  const auto fit = inverse_x_fit(dist, cfg);
  CsvTable table({"state", "prob", "c_over_x"});
  for (State x = cfg.l(); x < cfg.upper(); ++x) {
    const auto i = x - cfg.l();
    table.add_row({static_cast<std::int64_t>(x), dist.prob[i], fit.fitted[i]});
  }
  return table;
}

}  // namespace ans
