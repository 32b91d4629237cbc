// Acceptance gate: one PASS/FAIL line per criterion, exit status 1 if any fail.
// Usage: acceptance [criterion...] [--out DIR]

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <memory>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "ans/analysis.hpp"
#include "ans/container.hpp"
#include "ans/error.hpp"
#include "ans/keyed.hpp"
#include "ans/rans.hpp"
#include "ans/stream.hpp"
#include "ans/tans.hpp"
#include "ans/uabs.hpp"

using namespace ans;

namespace {

struct Outcome {
  bool pass;
  std::string detail;
};

std::filesystem::path g_out = "acceptance_out";

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

bool near(double v, double want, double tol) { return std::abs(v - want) <= tol; }

StreamCodec uabs_stream(const BinaryProb& p, State l) {
  return StreamCodec(std::make_shared<UabsCodec>(p), StreamConfig(l, 2));
}

EntropyReport tans_report(const QuantizedDist& d, State l, std::span<const double> source) {
  return delta_H(automaton_from_tables(build_tables(precise_init(d, StreamConfig(l, 2))), source));
}

// ---------------------------------------------------------------------------

Outcome golden_table() {
  const State next0[] = {14, 15, 17, 9, 9, 11, 11, 12, 12};
  const State next1[] = {13, 16, 16, 10, 10, 10, 10, 13, 13};
  const std::vector<std::vector<State>> bits0{{}, {}, {}, {0}, {1}, {0}, {1}, {0}, {1}};
  const std::vector<std::vector<State>> bits1{{1}, {0}, {1}, {0, 0}, {1, 0}, {0, 1}, {1, 1}, {0, 0}, {1, 0}};
  const BinaryProb p(3, 10);
  const auto codec = uabs_stream(p, 9);
  // second route: the same table read off a spread built from s(x)
  std::vector<Symbol> assignment;
  for (State x = 9; x < 18; ++x) assignment.push_back(uabs_symbol(x, p));
  const auto tables = build_tables(SpreadFunction(StreamConfig(9, 2), {6, 3}, assignment));
  int matched = 0;
  for (State x = 9; x <= 17; ++x) {
    for (Symbol s = 0; s < 2; ++s) {
      DigitStack st(2);
      const State y = codec.encode_step(s, x, st);
      std::vector<State> bits;
      while (!st.empty()) bits.push_back(st.pop());
      std::reverse(bits.begin(), bits.end());
      const auto& enc = tables.encoding;
      const unsigned k = enc.digit_count(s, x);
      const State via_table = enc.next_state[s][(x >> k) - enc.freqs[s]];
      const bool ok = y == (s ? next1 : next0)[x - 9] && bits == (s ? bits1 : bits0)[x - 9] && via_table == y &&
                      k == bits.size();
      matched += ok;
    }
  }
  return {matched == 18, fmt("%d/18 entries match (bits and next state, two construction routes)", matched)};
}

Outcome worked_stationary() {
  const BinaryProb p(3, 10);
  const std::vector<double> probs{0.7, 0.3};
  const auto r = delta_H(automaton_from_codec(uabs_stream(p, 9), probs));
  const double table[] = {0.1534, 0.1240, 0.1360, 0.1212, 0.0980, 0.1074, 0.0868, 0.0780, 0.0952};
  double worst = 0.0;
  for (std::size_t i = 0; i < 9; ++i) worst = std::max(worst, std::abs(r.stationary.prob[i] - table[i]));
  emit_csv(stationary_csv(r.stationary, StreamConfig(9, 2)), g_out / "stationary_uabs_3_10_l9.csv");
  const bool ok = worst <= 0.0005 && near(r.expected_bits_per_symbol, 0.88658, 0.0005) && near(r.delta_h, 0.00529, 0.0005);
  return {ok, fmt("max |Pr - table| = %.5f, bits/symbol = %.5f, dH = %.5f", worst, r.expected_bits_per_symbol, r.delta_h)};
}

Outcome four_state_automaton() {
  const std::vector<double> src{0.75, 0.25};
  const auto r4 = tans_report(QuantizedDist({3, 1}), 4, src);
  const double pr6 = r4.stationary.prob[2], pr7 = r4.stationary.prob[3];
  // Eight states: the value quoted for this automaton is reached by the best
  // of the 28 spreads; precise initialization is shown alongside.
  const QuantizedDist d8({6, 2});
  const auto best = exhaustive_search(d8, StreamConfig(8, 2), src);
  const double precise8 = tans_report(d8, 8, src).delta_h;
  const bool ok = near(pr6, 0.241, 0.002) && near(pr7, 0.188, 0.002) && near(r4.expected_bits_per_symbol, 0.82, 0.01) &&
                  near(r4.delta_h, 0.01, 0.003) && near(best.delta_h, 0.0018, 0.0008);
  return {ok, fmt("Pr(6)=%.4f Pr(7)=%.4f bits=%.4f dH=%.5f; l=8 best spread dH=%.5f (precise_init %.5f)", pr6, pr7,
                  r4.expected_bits_per_symbol, r4.delta_h, best.delta_h, precise8)};
}

Outcome exhaustive() {
  const QuantizedDist d({10, 5, 2});
  const StreamConfig cfg(17, 2);
  const auto src = d.probabilities();
  const auto r = exhaustive_search(d, cfg, src);
  const double precise = tans_report(d, 17, src).delta_h;
  const bool ok = r.enumerated == 408408 && near(r.delta_h, 0.00121, 0.0001) && r.optima_count == 32 &&
                  std::abs(precise - r.delta_h) <= 1e-12;
  return {ok, fmt("enumerated=%llu min dH=%.6f optima=%llu precise_init dH=%.6f",
                  static_cast<unsigned long long>(r.enumerated), r.delta_h,
                  static_cast<unsigned long long>(r.optima_count), precise)};
}

Outcome stream_conditions() {
  const BinaryProb p(3, 10);
  const bool c9 = check_uabs_condition(p, StreamConfig(9, 2));
  const bool c8 = check_uabs_condition(p, StreamConfig(8, 2));
  const QuantizedDist d({10, 5, 2});
  int rejected = 0, tried = 0;
  for (State l = 17; l <= 17 * 8; ++l) {
    if (l % 17 == 0) continue;
    ++tried;
    try {
      rans_stream_encode(std::vector<Symbol>{0, 1, 2}, d, StreamConfig(l, 2));
    } catch (const InvalidArgument&) {
      ++rejected;
    }
  }
  int accepted = 0;
  for (State k = 1; k <= 8; ++k) {
    const auto [x, digits] = rans_stream_encode(std::vector<Symbol>{0, 1, 2}, d, StreamConfig(17 * k, 2));
    accepted += StreamConfig(17 * k, 2).contains(x);
  }
  const bool ok = c9 && !c8 && rejected == tried && accepted == 8;
  return {ok, fmt("uABS l=9 %s, l=8 %s; rANS m∤l rejected %d/%d, m|l accepted %d/8", c9 ? "valid" : "invalid",
                  c8 ? "valid" : "invalid", rejected, tried, accepted)};
}

Outcome bound_dominance() {
  int violations = 0, cases = 0;
  std::vector<SweepRow> uabs_rows, tans_rows;
  for (std::uint64_t num = 1; num <= 9; ++num) {
    const BinaryProb p(num, 10);
    const std::vector<double> probs{1.0 - p.value(), p.value()};
    for (State l = 10; l <= 100; l += 10) {
      const auto r = delta_H(automaton_from_codec(uabs_stream(p, l), probs));
      const double bound = uabs_bound(p, l);
      violations += r.delta_h > bound;
      ++cases;
      uabs_rows.push_back({{p.value(), static_cast<double>(l)}, r.delta_h, bound, r.expected_bits_per_symbol,
                           r.shannon_entropy});
    }
  }
  const std::vector<double> src{0.1, 0.4, 0.5};
  for (State l = 10; l <= 200; l += 10) {
    const QuantizedDist d({static_cast<std::uint32_t>(l / 10), static_cast<std::uint32_t>(4 * l / 10),
                           static_cast<std::uint32_t>(l / 2)});
    const auto r = tans_report(d, l, src);
    const double bound = tans_bound(src, l);
    violations += r.delta_h > bound;
    ++cases;
    tans_rows.push_back({{static_cast<double>(l)}, r.delta_h, bound, r.expected_bits_per_symbol, r.shannon_entropy});
  }
  emit_csv(sweep_csv({"p", "l"}, uabs_rows), g_out / "uabs_sweep.csv");
  emit_csv(sweep_csv({"l"}, tans_rows), g_out / "tans_0.1_0.4_0.5.csv");
  return {violations == 0, fmt("%d violations over %d cases", violations, cases)};
}

// l_s = 1 for every symbol, then l - n random increments.
std::vector<std::uint32_t> random_counts(std::mt19937_64& rng, std::size_t n, State l) {
  std::vector<std::uint32_t> f(n, 1);
  for (State i = n; i < l; ++i) ++f[rng() % n];
  return f;
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const auto m = v.size() / 2;
  return v.size() % 2 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

Outcome scaling() {
  std::mt19937_64 rng(7);
  CsvTable table({"n", "k", "trial", "delta_H"});
  std::string detail;
  bool ok = true;
  for (const std::size_t n : {4, 8, 16}) {
    double med[2];
    for (int ki = 0; ki < 2; ++ki) {
      const State k = ki == 0 ? 8 : 16;
      std::vector<double> values;
      for (int t = 0; t < 30; ++t) {
        const QuantizedDist d(random_counts(rng, n, k * n));
        const double dh = tans_report(d, k * n, d.probabilities()).delta_h;
        values.push_back(dh);
        table.add_row({static_cast<std::int64_t>(n), static_cast<std::int64_t>(k), std::int64_t{t}, dh});
      }
      med[ki] = median(values);
    }
    const double ratio = med[1] / med[0];
    ok = ok && ratio >= 1.0 / 6 && ratio <= 1.0 / 2.5;
    detail += fmt("n=%zu ratio=%.3f (1/%.2f) ", n, ratio, 1.0 / ratio);
  }
  emit_csv(table, g_out / "scaling.csv");
  return {ok, detail};
}

Outcome round_trip_fuzz() {
  std::mt19937_64 rng(8);
  const Variant variants[] = {Variant::Tans, Variant::Rans, Variant::UabsStream};
  int failures = 0;
  std::uint64_t total_symbols = 0;
  std::vector<std::vector<std::uint8_t>> keep;
  std::vector<std::vector<std::uint8_t>> inputs;
  for (int i = 0; i < 10000; ++i) {
    const std::size_t n_sym = 1 + rng() % 256;
    std::vector<double> weights(n_sym);
    const int shape = static_cast<int>(rng() % 3);
    for (std::size_t s = 0; s < n_sym; ++s) {
      const double u = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
      weights[s] = shape == 0 ? 1.0 : shape == 1 ? 1.0 / double(s + 1) : -std::log(u + 1e-300);
    }
    std::discrete_distribution<int> pick(weights.begin(), weights.end());
    // log-uniform length in [1, 1e5]
    const auto len = static_cast<std::size_t>(std::exp(std::uniform_real_distribution<double>(0.0, std::log(1e5))(rng)));
    std::vector<std::uint8_t> input(len);
    for (auto& b : input) b = static_cast<std::uint8_t>(pick(rng));
    const Variant v = variants[rng() % 3];
    const unsigned log = 8 + static_cast<unsigned>(rng() % 5);
    total_symbols += len;
    try {
      const auto c = compress(input, v, log);
      if (decompress(c) != input) ++failures;
      if (keep.size() < 200) {
        keep.push_back(c);
        inputs.push_back(input);
      }
    } catch (const std::exception&) {
      ++failures;
    }
  }
  int detected = 0, differed = 0, crashed = 0, flips = 0;
  for (int f = 0; f < 1000; ++f) {
    const auto idx = rng() % keep.size();
    auto bad = keep[idx];
    const auto parsed = parse_container(bad);
    if (parsed.header.payload_bits == 0) {
      --f;
      continue;
    }
    const std::size_t header = parsed.header.encoded_size();
    const auto bit = rng() % parsed.header.payload_bits;
    bad[header + bit / 8] ^= static_cast<std::uint8_t>(1U << (bit % 8));
    ++flips;
    try {
      differed += decompress(bad) != inputs[idx];
    } catch (const FormatError&) {
      ++detected;
    } catch (...) {
      ++crashed;
    }
  }
  const bool ok = failures == 0 && crashed == 0 && detected + differed == flips;
  return {ok, fmt("10000 cases (%llu symbols), %d failures; %d flips: %d detected, %d decoded differently, %d crashes",
                  static_cast<unsigned long long>(total_symbols), failures, flips, detected, differed, crashed)};
}

Outcome compression_rate() {
  std::mt19937_64 rng(1);
  std::discrete_distribution<int> pick({2, 1, 1});
  std::vector<std::uint8_t> input(1'000'000);
  for (auto& b : input) b = static_cast<std::uint8_t>(pick(rng));
  const auto c = compress(input, Variant::Tans);
  const auto parsed = parse_container(c);
  const auto model = model_from_freqs(parsed.header.freqs);
  const std::vector<double> src{0.5, 0.25, 0.25};
  // the quantized table (2047, 1025, 1024) is nearly reducible and mixes slowly
  StationaryOptions slow;
  slow.max_iterations = 5'000'000;
  const auto d = model.dist();
  const auto tables = build_tables(precise_init(d, StreamConfig(State{1} << parsed.header.table_log, 2)));
  const double predicted = delta_H(automaton_from_tables(tables, src), slow).delta_h;
  const double rate = static_cast<double>(parsed.header.payload_bits) / 1e6;
  const std::size_t overhead = c.size() - (parsed.header.payload_bits + 7) / 8;
  const bool ok = decompress(c) == input && rate >= 1.5 && rate <= 1.5 + predicted + 0.001 && overhead <= 64;
  return {ok, fmt("payload %.6f bits/symbol, table dH=%.6f, window [1.5, %.6f], overhead %zu bytes", rate, predicted,
                  1.5 + predicted + 0.001, overhead)};
}

Outcome inaccuracy_audit() {
  std::mt19937_64 rng(10);
  std::uint64_t visited = 0, bad = 0;
  for (const auto& [num, den, l] : std::vector<std::tuple<std::uint64_t, std::uint64_t, State>>{
           {3, 10, 9}, {3, 10, 1000}, {1, 7, 7 * 64}, {61, 64, 4096}}) {
    const BinaryProb p(num, den);
    std::vector<StreamCodec> table{uabs_stream(p, l)};
    std::bernoulli_distribution one(p.value());
    std::vector<Symbol> msg(100000);
    for (auto& s : msg) s = one(rng) ? 1 : 0;
    auto audit = [&](Symbol, State x) {
      ++visited;
      bad += !(boost::abs(uabs_inaccuracy(x, p)) < Rational(1, static_cast<std::int64_t>(x)));
    };
    DigitStack st(2);
    const State x = encode_multi(msg, table, st, audit);
    decode_multi(x, st, msg.size(), table, audit);
  }
  for (const auto& [freqs, cfg] : std::vector<std::pair<std::vector<std::uint32_t>, StreamConfig>>{
           {{10, 5, 2}, StreamConfig(17 << 10, 2)}, {{4000, 60, 20, 16}, StreamConfig(4096u << 16, 1u << 16)}}) {
    const QuantizedDist d(freqs);
    std::vector<Symbol> msg(100000);
    for (auto& s : msg) s = d.symbol_of(rng() % d.total());
    auto audit = [&](Symbol, State x) {
      ++visited;
      const auto r = rans_inaccuracy_report(x, d);
      bad += !(r.max_abs_epsilon < r.bound);
    };
    auto [x, digits] = rans_stream_encode(msg, d, cfg, audit);
    rans_stream_decode(x, digits, msg.size(), d, cfg, audit);
  }
  return {bad == 0, fmt("%llu visited states, %llu violations", static_cast<unsigned long long>(visited),
                        static_cast<unsigned long long>(bad))};
}

Outcome qabs_envelope() {
  std::vector<double> grid;
  for (int i = 1; i <= 50; ++i) grid.push_back(i / 100.0);
  const auto fam = qabs_family(16, grid);
  CsvTable table({"spread", "p", "delta_H"});
  for (const auto j : fam.envelope) {
    for (std::size_t g = 0; g < grid.size(); ++g) {
      table.add_row({static_cast<std::int64_t>(fam.spreads[j]), grid[g], fam.curves[j][g]});
    }
  }
  emit_csv(table, g_out / "qabs16_envelope.csv");
  const auto count = static_cast<long>(fam.envelope.size());
  return {std::abs(count - 43) <= 2, fmt("%ld distinct envelope curves over p = 0.01..0.50 (%zu spreads)", count,
                                         fam.spreads.size())};
}

Outcome keyed() {
  const QuantizedDist d({10, 5, 2});
  const StreamConfig cfg(17, 2);
  const auto src = d.probabilities();
  const auto baseline_spread = precise_init(d, cfg);
  const double baseline = tans_report(d, 17, src).delta_h;
  std::mt19937_64 rng(12);
  bool zero_same = true, all_valid = true, all_round_trip = true;
  std::set<std::vector<Symbol>> distinct;
  double worst = 0.0;
  for (int k = 0; k < 100; ++k) {
    std::vector<std::uint8_t> key(16);
    for (auto& b : key) b = static_cast<std::uint8_t>(rng());
    zero_same = zero_same && keyed_init(d, cfg, key, 0) == baseline_spread;
    const auto spread = keyed_init(d, cfg, key);
    all_valid = all_valid && is_valid_spread(cfg, spread.freqs(), spread.assignment());
    distinct.emplace(spread.assignment().begin(), spread.assignment().end());
    const auto tables = build_tables(spread);
    worst = std::max(worst, delta_H(automaton_from_tables(tables, src)).delta_h);
    std::vector<Symbol> msg(10000);
    for (auto& s : msg) s = d.symbol_of(rng() % 17);
    DigitStack st(2);
    const State x = tans_encode(msg, tables.encoding, st);
    auto back = tans_decode(x, st, msg.size(), tables.decoding);
    std::reverse(back.begin(), back.end());
    all_round_trip = all_round_trip && back == msg;
  }
  // Trade-off over every finite strength: the most distinct spreads any strength
  // reaches while keeping all 100 within 2x baseline.
  std::size_t best_within = 0;
  std::uint64_t best_strength = 0;
  for (std::uint64_t strength = 1; strength <= 17; ++strength) {
    std::mt19937_64 again(12);
    std::set<std::vector<Symbol>> seen;
    double w = 0.0;
    for (int k = 0; k < 100; ++k) {
      std::vector<std::uint8_t> key(16);
      for (auto& b : key) b = static_cast<std::uint8_t>(again());
      const auto spread = keyed_init(d, cfg, key, strength);
      seen.emplace(spread.assignment().begin(), spread.assignment().end());
      w = std::max(w, delta_H(automaton_from_tables(build_tables(spread), src)).delta_h);
      for (int skip = 0; skip < 10000; ++skip) again();  // stay aligned with the main loop's message draws
    }
    if (w <= 2 * baseline && seen.size() > best_within) {
      best_within = seen.size();
      best_strength = strength;
    }
  }
  const bool ok = zero_same && all_valid && all_round_trip && distinct.size() >= 90 && worst <= 2 * baseline;
  return {ok, fmt("strength 0 %s precise_init; unlimited strength: %zu distinct spreads, worst dH=%.6f vs 2x baseline "
                  "%.6f, round trips %s; best strength within 2x baseline is %llu with %zu distinct",
                  zero_same ? "equals" : "differs from", distinct.size(), worst, 2 * baseline,
                  all_round_trip ? "ok" : "FAILED", static_cast<unsigned long long>(best_strength), best_within)};
}

struct Criterion {
  int id;
  const char* name;
  std::function<Outcome()> run;
};

}  // namespace

int main(int argc, char** argv) {
  const std::vector<Criterion> criteria{
      {1, "stream uABS table p=3/10 l=9", golden_table},
      {2, "stationary probabilities and redundancy p=3/10 l=9", worked_stationary},
      {3, "four-state automaton (3,1)", four_state_automaton},
      {4, "exhaustive spread search (10,5,2)/17", exhaustive},
      {5, "stream validity conditions", stream_conditions},
      {6, "redundancy bound dominance", bound_dominance},
      {7, "dH scaling from l=8n to l=16n", scaling},
      {8, "round trip and corruption fuzz", round_trip_fuzz},
      {9, "compression rate on (1/2,1/4,1/4)", compression_rate},
      {10, "inaccuracy audits", inaccuracy_audit},
      {11, "qABS 16-state envelope", qabs_envelope},
      {12, "keyed table generation", keyed},
  };
  std::set<int> only;
  for (int i = 1; i < argc; ++i) {
    const std::string arg = argv[i];
    if (arg == "--out" && i + 1 < argc) {
      g_out = argv[++i];
    } else {
      only.insert(std::stoi(arg));
    }
  }
  std::filesystem::create_directories(g_out);

  int failed = 0;
  for (const auto& c : criteria) {
    if (!only.empty() && !only.count(c.id)) continue;
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("%s %2d %s: %s [%.1f s]\n", o.pass ? "PASS" : "FAIL", c.id, c.name, o.detail.c_str(), secs);
    std::fflush(stdout);
    failed += !o.pass;
  }
  return failed == 0 ? 0 : 1;
}
