#include "ans/keyed.hpp"

#include <cctype>

#include "ans/error.hpp"

namespace ans {

KeySchedule::KeySchedule(std::span<const std::uint8_t> key) : seed_(kFoldBasis) {
  for (const auto byte : key) seed_ = (seed_ * kFoldPrime) ^ byte;
  state_ = seed_;
}

KeySchedule KeySchedule::from_seed(std::uint64_t seed) {
  KeySchedule k;
  k.seed_ = seed;
  k.state_ = seed;
  return k;
}

std::uint64_t KeySchedule::next_word() {
  std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

bool KeySchedule::next_bit() {
  if (bits_left_ == 0) {
    word_ = next_word();
    bits_left_ = 64;
  }
  --bits_left_;
  return (word_ >> bits_left_) & 1U;
}

SpreadFunction keyed_init(const QuantizedDist& d, const StreamConfig& cfg, std::span<const std::uint8_t> key,
                          std::uint64_t strength) {
  if (d.total() != cfg.l()) throw InvalidArgument("keyed initialization requires sum l_s = l");
  if (strength == 0) return precise_init(d, cfg);

  KeySchedule schedule(key);
  std::vector<std::uint32_t> freqs(d.freqs().begin(), d.freqs().end());
  std::vector<std::uint64_t> remaining;
  CandidateQueue queue;
  for (Symbol s = 0; s < freqs.size(); ++s) {
    remaining.push_back((cfg.b() - 1) * static_cast<std::uint64_t>(freqs[s]));
    queue.put({0, s, freqs[s]});
  }
  std::vector<Symbol> assignment;
  assignment.reserve(cfg.state_count());
  std::uint64_t swaps = 0;
  while (!queue.empty()) {
    if (assignment.size() % cfg.l() == 0) swaps = 0;
    auto c = queue.getmin();
    if (!queue.empty() && swaps < strength && schedule.next_bit()) {
      const auto runner_up = queue.getmin();
      queue.put(c);
      c = runner_up;
      ++swaps;
    }
    assignment.push_back(c.symbol);
    if (c.index + 1 < remaining[c.symbol]) queue.put({c.index + 1, c.symbol, c.freq});
  }
  return SpreadFunction(cfg, std::move(freqs), std::move(assignment));
}

boost::multiprecision::cpp_int keyspace_size(const StreamConfig& cfg) {
  boost::multiprecision::cpp_int one = 1;
  return one << static_cast<unsigned>(cfg.l() * (cfg.b() - 1));
}

std::vector<std::uint8_t> parse_hex_key(std::string_view hex) {
  if (hex.empty() || hex.size() % 2 != 0) throw InvalidArgument("key must be an even number of hex digits");
  auto nibble = [](char c) -> std::uint8_t {
    if (c >= '0' && c <= '9') return static_cast<std::uint8_t>(c - '0');
    const char lower = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    if (lower >= 'a' && lower <= 'f') return static_cast<std::uint8_t>(lower - 'a' + 10);
    throw InvalidArgument("key must be hex");
  };
  std::vector<std::uint8_t> bytes;
  bytes.reserve(hex.size() / 2);
  for (std::size_t i = 0; i < hex.size(); i += 2) {
    bytes.push_back(static_cast<std::uint8_t>(nibble(hex[i]) << 4 | nibble(hex[i + 1])));
  }
  return bytes;
}

}  // namespace ans
