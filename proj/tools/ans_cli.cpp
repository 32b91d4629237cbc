// ans-cli: static order-0 compressor and analysis front end.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <iterator>
#include <memory>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "ans/analysis.hpp"
#include "ans/container.hpp"
#include "ans/error.hpp"
#include "ans/keyed.hpp"
#include "ans/rans.hpp"
#include "ans/tans.hpp"
#include "ans/uabs.hpp"

namespace {

enum Exit { kOk = 0, kUsage = 1, kFormat = 2, kBudget = 3 };

struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::vector<std::uint8_t> read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_file(const std::string& path, const std::vector<std::uint8_t>& bytes) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot create " + path);
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("write failed: " + path);
}

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> parts;
  std::stringstream ss(text);
  for (std::string part; std::getline(ss, part, sep);) parts.push_back(part);
  return parts;
}

std::uint64_t to_u64(const std::string& s) {
  std::size_t used = 0;
  const auto v = std::stoull(s, &used);
  if (used != s.size()) throw ans::InvalidArgument("not an integer: " + s);
  return v;
}

std::vector<std::uint32_t> parse_freqs(const std::string& csv) {
  std::vector<std::uint32_t> freqs;
  for (const auto& f : split(csv, ',')) freqs.push_back(static_cast<std::uint32_t>(to_u64(f)));
  if (freqs.empty()) throw ans::InvalidArgument("--freqs needs at least one value");
  return freqs;
}

// "3/10" or a comma list of them.
std::vector<ans::BinaryProb> parse_probs(const std::string& text) {
  std::vector<ans::BinaryProb> probs;
  for (const auto& item : split(text, ',')) {
    const auto parts = split(item, '/');
    if (parts.size() != 2) throw ans::InvalidArgument("probability must be NUM/DEN: " + item);
    probs.emplace_back(to_u64(parts[0]), to_u64(parts[1]));
  }
  return probs;
}

// "9", "10,20" or "10:100:10".
std::vector<std::uint64_t> parse_range(const std::string& text) {
  std::vector<std::uint64_t> values;
  const auto colon = split(text, ':');
  if (colon.size() == 3) {
    const auto lo = to_u64(colon[0]), hi = to_u64(colon[1]), step = to_u64(colon[2]);
    if (step == 0) throw ans::InvalidArgument("range step must be positive");
    for (auto v = lo; v <= hi; v += step) values.push_back(v);
    return values;
  }
  for (const auto& v : split(text, ',')) values.push_back(to_u64(v));
  return values;
}

std::optional<std::vector<std::uint8_t>> key_bytes(const std::string& hex) {
  if (hex.empty()) return std::nullopt;
  return ans::parse_hex_key(hex);
}

std::vector<double> normalized(std::span<const std::uint32_t> freqs) {
  double total = 0;
  for (const auto f : freqs) total += f;
  std::vector<double> p;
  for (const auto f : freqs) p.push_back(f / total);
  return p;
}

ans::SweepRow row_of(std::vector<double> params, const ans::EntropyReport& r, double bound) {
  return {std::move(params), r.delta_h, bound, r.expected_bits_per_symbol, r.shannon_entropy};
}

void print_row(const std::vector<std::string>& names, const ans::SweepRow& row) {
  for (std::size_t i = 0; i < names.size(); ++i) std::printf("%s=%g ", names[i].c_str(), row.params[i]);
  std::printf("delta_H=%.8f bound=%.8f expected_bits=%.8f entropy=%.8f\n", row.delta_h, row.bound,
              row.expected_bits, row.entropy);
}

struct AnalyzeArgs {
  bool uabs = false, tans = false, rans = false, qabs = false, exhaustive = false;
  std::string p, l, freqs, csv;
  std::uint64_t base = 2;
  std::uint32_t states = 16;
  double p_max = 0.5;
  std::uint64_t budget = 1'000'000;
};

void finish_csv(const AnalyzeArgs& a, const ans::CsvTable& table) {
  if (!a.csv.empty()) ans::emit_csv(table, a.csv);
}

int analyze_uabs(const AnalyzeArgs& a) {
  if (a.p.empty() || a.l.empty()) throw ans::InvalidArgument("--uabs needs -p and -l");
  const std::vector<std::string> names{"p", "l"};
  std::vector<ans::SweepRow> rows;
  for (const auto& p : parse_probs(a.p)) {
    for (const auto l : parse_range(a.l)) {
      const ans::StreamConfig cfg(l, a.base);
      if (!ans::check_uabs_condition(p, cfg)) {
        std::printf("p=%llu/%llu l=%llu rejected: b ceil(l p) != ceil(b l p)\n", static_cast<unsigned long long>(p.num()),
                    static_cast<unsigned long long>(p.den()), static_cast<unsigned long long>(l));
        continue;
      }
      const ans::StreamCodec codec(std::make_shared<ans::UabsCodec>(p), cfg);
      const std::vector<double> probs{1.0 - p.value(), p.value()};
      const auto report = ans::delta_H(ans::automaton_from_codec(codec, probs));
      rows.push_back(row_of({p.value(), static_cast<double>(l)}, report, ans::uabs_bound(p, l)));
      print_row(names, rows.back());
    }
  }
  finish_csv(a, ans::sweep_csv(names, rows));
  return kOk;
}

int analyze_tans(const AnalyzeArgs& a) {
  if (a.freqs.empty()) throw ans::InvalidArgument("--tans needs --freqs");
  const auto raw = parse_freqs(a.freqs);
  const auto source = normalized(raw);
  std::vector<std::uint32_t> freqs = raw;
  std::uint64_t total = 0;
  for (const auto f : raw) total += f;
  std::vector<std::uint64_t> ls = a.l.empty() ? std::vector<std::uint64_t>{total} : parse_range(a.l);
  const std::vector<std::string> names{"l"};
  std::vector<ans::SweepRow> rows;
  for (const auto l : ls) {
    if (l != total) {
      const std::vector<std::uint64_t> counts(raw.begin(), raw.end());
      freqs = ans::quantize(counts, l);
    }
    const ans::QuantizedDist d(freqs);
    const ans::StreamConfig cfg(l, a.base);
    if (a.exhaustive) {
      const auto r = ans::exhaustive_search(d, cfg, source, a.budget);
      const auto precise = ans::delta_H(ans::automaton_from_tables(ans::build_tables(ans::precise_init(d, cfg)), source));
      std::printf("l=%llu spreads=%llu min_delta_H=%.8f optima=%llu precise_init_delta_H=%.8f\n",
                  static_cast<unsigned long long>(l), static_cast<unsigned long long>(r.enumerated), r.delta_h,
                  static_cast<unsigned long long>(r.optima_count), precise.delta_h);
      ans::CsvTable t({"l", "spreads", "min_delta_H", "optima", "precise_delta_H"});
      t.add_row({static_cast<std::int64_t>(l), static_cast<std::int64_t>(r.enumerated), r.delta_h,
                 static_cast<std::int64_t>(r.optima_count), precise.delta_h});
      finish_csv(a, t);
      return kOk;
    }
    const auto report = ans::delta_H(ans::automaton_from_tables(ans::build_tables(ans::precise_init(d, cfg)), source));
    rows.push_back(row_of({static_cast<double>(l)}, report, ans::tans_bound(source, l)));
    print_row(names, rows.back());
  }
  finish_csv(a, ans::sweep_csv(names, rows));
  return kOk;
}

int analyze_rans(const AnalyzeArgs& a) {
  if (a.freqs.empty()) throw ans::InvalidArgument("--rans needs --freqs");
  const ans::QuantizedDist d(parse_freqs(a.freqs));
  const auto probs = d.probabilities();
  const std::vector<std::string> names{"l"};
  std::vector<ans::SweepRow> rows;
  for (const auto l : a.l.empty() ? std::vector<std::uint64_t>{d.total() * 16} : parse_range(a.l)) {
    const ans::StreamConfig cfg(l, a.base);
    const ans::StreamCodec codec(std::make_shared<ans::RansCodec>(d), cfg, ans::rans_symbol_ranges(d, cfg));
    const auto report = ans::delta_H(ans::automaton_from_codec(codec, probs));
    rows.push_back(row_of({static_cast<double>(l)}, report, ans::rans_bound(d, l)));
    print_row(names, rows.back());
  }
  finish_csv(a, ans::sweep_csv(names, rows));
  return kOk;
}

int analyze_qabs(const AnalyzeArgs& a) {
  std::vector<double> grid;
  for (int i = 1; i * 0.01 <= a.p_max + 1e-9 && i < 100; ++i) grid.push_back(i * 0.01);
  const auto fam = ans::qabs_family(a.states, grid, a.budget);
  std::printf("states=%u spreads=%zu envelope=%zu\n", a.states, fam.spreads.size(), fam.envelope.size());
  ans::CsvTable t({"spread", "p", "delta_H"});
  for (const auto j : fam.envelope) {
    std::string bits;
    for (std::uint32_t i = 0; i < a.states; ++i) bits += ((fam.spreads[j] >> i) & 1U) ? '1' : '0';
    std::printf("%s\n", bits.c_str());
    for (std::size_t g = 0; g < grid.size(); ++g) t.add_row({bits, grid[g], fam.curves[j][g]});
  }
  finish_csv(a, t);
  return kOk;
}

int run_analyze(const AnalyzeArgs& a) {
  if (a.uabs + a.tans + a.rans + a.qabs != 1) throw ans::InvalidArgument("pick one of --uabs, --tans, --rans, --qabs");
  if (a.uabs) return analyze_uabs(a);
  if (a.tans) return analyze_tans(a);
  if (a.rans) return analyze_rans(a);
  return analyze_qabs(a);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Asymmetric numeral systems coder and analyzer"};
  app.require_subcommand(1);

  std::string input, output, variant = "tans", key_hex;
  unsigned table_log = ans::kDefaultTableLog;

  auto* compress = app.add_subcommand("compress", "Compress a file into an ANS1 container");
  compress->add_option("input", input)->required();
  compress->add_option("output", output)->required();
  compress->add_option("--variant", variant)->check(CLI::IsMember({"tans", "rans", "uabs"}));
  compress->add_option("--table-log", table_log)->check(CLI::Range(1u, ans::kMaxTableLog));
  compress->add_option("--key", key_hex, "Hex key for keyed tANS tables");

  auto* decompress = app.add_subcommand("decompress", "Restore a file from an ANS1 container");
  decompress->add_option("input", input)->required();
  decompress->add_option("output", output)->required();
  decompress->add_option("--key", key_hex);

  AnalyzeArgs aa;
  auto* analyze = app.add_subcommand("analyze", "Stationary analysis and redundancy sweeps");
  analyze->add_flag("--uabs", aa.uabs);
  analyze->add_flag("--tans", aa.tans);
  analyze->add_flag("--rans", aa.rans);
  analyze->add_flag("--qabs", aa.qabs);
  analyze->add_option("-p", aa.p, "NUM/DEN, comma separated");
  analyze->add_option("-l", aa.l, "N, a comma list or LO:HI:STEP");
  analyze->add_option("-b", aa.base, "Digit base");
  analyze->add_option("--freqs", aa.freqs, "Comma separated frequencies");
  analyze->add_flag("--exhaustive", aa.exhaustive);
  analyze->add_option("--states", aa.states);
  analyze->add_option("--p-max", aa.p_max, "Largest grid probability for --qabs");
  analyze->add_option("--budget", aa.budget);
  analyze->add_option("--csv", aa.csv);

  std::string freqs;
  std::uint64_t l = 0;
  auto* table_gen = app.add_subcommand("table-gen", "Print a tANS spread");
  table_gen->add_option("--freqs", freqs)->required();
  table_gen->add_option("-l", l, "Number of states (defaults to the sum of --freqs)");
  table_gen->add_option("--key", key_hex);
  table_gen->add_option("-o", output);

  std::uint64_t count = 1'000'000, seed = 1;
  std::string bench_freqs = "2,1,1";
  auto* bench = app.add_subcommand("bench", "Throughput on i.i.d. generated data");
  bench->add_option("--variant", variant)->check(CLI::IsMember({"tans", "rans", "uabs"}));
  bench->add_option("--table-log", table_log)->check(CLI::Range(1u, ans::kMaxTableLog));
  bench->add_option("--freqs", bench_freqs, "Source weights of byte values 0, 1, ...");
  bench->add_option("-n", count);
  bench->add_option("--seed", seed);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kOk : kUsage;
  }

  try {
    if (*compress) {
      const auto key = key_bytes(key_hex);
      const auto v = *ans::parse_variant(variant);
      std::optional<std::span<const std::uint8_t>> k;
      if (key) k = *key;
      write_file(output, ans::compress(read_file(input), v, table_log, k));
    } else if (*decompress) {
      const auto key = key_bytes(key_hex);
      std::optional<std::span<const std::uint8_t>> k;
      if (key) k = *key;
      write_file(output, ans::decompress(read_file(input), k));
    } else if (*analyze) {
      return run_analyze(aa);
    } else if (*table_gen) {
      const auto raw = parse_freqs(freqs);
      std::uint64_t total = 0;
      for (const auto f : raw) total += f;
      if (l == 0) l = total;
      const std::vector<std::uint64_t> counts(raw.begin(), raw.end());
      const ans::QuantizedDist d(l == total ? raw : ans::quantize(counts, l));
      const ans::StreamConfig cfg(l, 2);
      const auto key = key_bytes(key_hex);
      const auto spread = key ? ans::keyed_init(d, cfg, *key) : ans::precise_init(d, cfg);
      const auto text = ans::dump_spread(spread);
      if (output.empty()) {
        std::cout << text;
      } else {
        write_file(output, {text.begin(), text.end()});
      }
    } else if (*bench) {
      const auto weights = parse_freqs(bench_freqs);
      if (weights.size() > 256) throw ans::InvalidArgument("at most 256 byte values");
      std::mt19937_64 rng(seed);
      std::discrete_distribution<int> pick(weights.begin(), weights.end());
      std::vector<std::uint8_t> data(count);
      for (auto& byte : data) byte = static_cast<std::uint8_t>(pick(rng));
      const auto v = *ans::parse_variant(variant);
      using clock = std::chrono::steady_clock;
      const auto t0 = clock::now();
      const auto packed = ans::compress(data, v, table_log);
      const auto t1 = clock::now();
      const auto restored = ans::decompress(packed);
      const auto t2 = clock::now();
      if (restored != data) throw ans::FormatError("bench round trip failed");
      const double mb = static_cast<double>(count) / 1e6;
      const double enc = std::chrono::duration<double>(t1 - t0).count();
      const double dec = std::chrono::duration<double>(t2 - t1).count();
      std::printf("variant=%s symbols=%llu bytes=%zu bits_per_symbol=%.5f encode_MBps=%.2f decode_MBps=%.2f\n",
                  variant.c_str(), static_cast<unsigned long long>(count), packed.size(),
                  8.0 * static_cast<double>(packed.size()) / static_cast<double>(std::max<std::uint64_t>(count, 1)),
                  mb / enc, mb / dec);
    }
  } catch (const ans::BudgetExceeded& e) {
    std::cerr << "budget exceeded: " << e.what() << '\n';
    return kBudget;
  } catch (const ans::FormatError& e) {
    std::cerr << "format error: " << e.what() << '\n';
    return kFormat;
  } catch (const ans::InvalidArgument& e) {
    std::cerr << "invalid argument: " << e.what() << '\n';
    return kUsage;
  } catch (const IoError& e) {
    std::cerr << e.what() << '\n';
    return kUsage;
  } catch (const std::invalid_argument& e) {
    std::cerr << "invalid argument: " << e.what() << '\n';
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kFormat;
  }
  return kOk;
}
