#include "ans/container.hpp"

#include <algorithm>
#include <array>
#include <map>
#include <memory>
#include <numeric>

#include "ans/error.hpp"
#include "ans/keyed.hpp"
#include "ans/rans.hpp"
#include "ans/tans.hpp"
#include "ans/uabs.hpp"

namespace ans {

namespace {

constexpr std::array<std::uint8_t, 4> kMagic{'A', 'N', 'S', '1'};
// Refuse absurd symbol counts before allocating anything for them.
constexpr std::uint64_t kMaxMessageLength = std::uint64_t{1} << 40;
constexpr std::size_t kReserveCap = std::size_t{1} << 26;

void put_le(std::vector<std::uint8_t>& out, std::uint64_t v, unsigned bytes) {
  for (unsigned i = 0; i < bytes; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

class Reader {
 public:
  explicit Reader(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}

  std::uint64_t le(unsigned n) {
    if (bytes_.size() - pos_ < n) throw FormatError("truncated header");
    std::uint64_t v = 0;
    for (unsigned i = 0; i < n; ++i) v |= std::uint64_t{bytes_[pos_ + i]} << (8 * i);
    pos_ += n;
    return v;
  }
  std::span<const std::uint8_t> rest() const { return bytes_.subspan(pos_); }

 private:
  std::span<const std::uint8_t> bytes_;
  std::size_t pos_ = 0;
};

std::size_t reserve_hint(std::uint64_t n) { return static_cast<std::size_t>(std::min<std::uint64_t>(n, kReserveCap)); }

// Binary decision tree over bytes for the uABS-stream variant: node 1 is the
// root, node n has children 2n and 2n+1, leaves 256..511 are the bytes.
class ByteTree {
 public:
  ByteTree(std::span<const std::uint32_t> freqs, StreamConfig cfg) : cfg_(cfg) {
    weight_.fill(0);
    for (std::size_t b = 0; b < freqs.size(); ++b) weight_[256 + b] = freqs[b];
    for (std::size_t n = 255; n >= 1; --n) weight_[n] = weight_[2 * n] + weight_[2 * n + 1];
    std::map<std::uint64_t, std::size_t> by_q;
    for (std::size_t n = 1; n < 256; ++n) {
      if (!branching(n)) continue;
      const auto tot = weight_[n];
      const auto l = cfg.l();
      auto q = (2 * l * weight_[2 * n + 1] + tot) / (2 * tot);
      q = std::clamp<std::uint64_t>(q, 1, l - 1);
      auto [it, fresh] = by_q.try_emplace(q, codecs_.size());
      if (fresh) codecs_.emplace_back(std::make_shared<UabsCodec>(BinaryProb(q, l)), cfg);
      codec_of_[n] = it->second;
    }
  }

  bool branching(std::size_t n) const { return weight_[2 * n] > 0 && weight_[2 * n + 1] > 0; }

  State encode(std::uint8_t byte, State x, DigitStack& out) const {
    const std::size_t leaf = 256 + std::size_t{byte};
    for (int depth = 7; depth >= 0; --depth) {
      const std::size_t node = leaf >> (8 - depth);
      if (branching(node)) x = codecs_[codec_of_[node]].encode_step((leaf >> (7 - depth)) & 1U, x, out);
    }
    return x;
  }

  std::uint8_t decode(State& x, DigitStack& in) const {
    std::size_t node = 1;
    while (node < 256) {
      Symbol bit;
      if (branching(node)) {
        const auto step = codecs_[codec_of_[node]].decode_step(x, in);
        bit = step.symbol;
        x = step.state;
      } else {
        bit = weight_[2 * node + 1] > 0 ? 1 : 0;
      }
      node = 2 * node + bit;
    }
    return static_cast<std::uint8_t>(node - 256);
  }

 private:
  StreamConfig cfg_;
  std::array<std::uint64_t, 512> weight_;
  std::array<std::size_t, 256> codec_of_{};
  std::vector<StreamCodec> codecs_;
};

SpreadFunction tans_spread(const Model& model, const StreamConfig& cfg,
                           std::optional<std::span<const std::uint8_t>> key) {
  return key ? keyed_init(model.dist(), cfg, *key) : precise_init(model.dist(), cfg);
}

}  // namespace

std::optional<Variant> parse_variant(std::string_view name) {
  if (name == "tans") return Variant::Tans;
  if (name == "rans") return Variant::Rans;
  if (name == "uabs") return Variant::UabsStream;
  return std::nullopt;
}

std::string_view variant_name(Variant v) {
  switch (v) {
    case Variant::Tans: return "tans";
    case Variant::Rans: return "rans";
    case Variant::UabsStream: return "uabs";
  }
  return "?";
}

std::vector<std::uint8_t> serialize_header(const ContainerHeader& h) {
  std::vector<std::uint8_t> out(kMagic.begin(), kMagic.end());
  out.push_back(ContainerHeader::kVersion);
  out.push_back(static_cast<std::uint8_t>(h.variant));
  out.push_back(h.table_log);
  out.push_back(h.keyed ? 1 : 0);
  put_le(out, h.freqs.size(), 2);
  for (const auto f : h.freqs) put_le(out, f, 2);
  put_le(out, h.message_length, 8);
  put_le(out, h.final_state, 8);
  put_le(out, h.payload_bits, 8);
  return out;
}

StreamConfig container_config(Variant v, unsigned table_log) {
  if (table_log < 1 || table_log > kMaxTableLog) throw InvalidArgument("table_log must be in 1..15");
  const State size = State{1} << table_log;
  if (v == Variant::Rans) return StreamConfig(size << 16, State{1} << 16);
  return StreamConfig(size, 2);
}

ParsedContainer parse_container(std::span<const std::uint8_t> bytes) {
  Reader r(bytes);
  for (const auto m : kMagic) {
    if (r.le(1) != m) throw FormatError("not an ANS1 container");
  }
  if (r.le(1) != ContainerHeader::kVersion) throw FormatError("unsupported container version");
  ContainerHeader h;
  const auto variant = r.le(1);
  if (variant > 2) throw FormatError("unknown variant");
  h.variant = static_cast<Variant>(variant);
  h.table_log = static_cast<std::uint8_t>(r.le(1));
  if (h.table_log < 1 || h.table_log > kMaxTableLog) throw FormatError("table_log out of range");
  const auto key_flag = r.le(1);
  if (key_flag > 1) throw FormatError("bad key flag");
  h.keyed = key_flag == 1;
  const auto alphabet = r.le(2);
  if (alphabet > 256) throw FormatError("alphabet larger than a byte");
  std::uint64_t sum = 0;
  std::size_t present = 0;
  for (std::uint64_t i = 0; i < alphabet; ++i) {
    h.freqs.push_back(static_cast<std::uint32_t>(r.le(2)));
    sum += h.freqs.back();
    present += h.freqs.back() > 0;
  }
  h.message_length = r.le(8);
  h.final_state = r.le(8);
  h.payload_bits = r.le(8);
  const auto payload = r.rest();

  const auto cfg = container_config(h.variant, h.table_log);
  if (present == 0) {
    if (h.message_length != 0 || h.payload_bits != 0 || h.final_state != cfg.l()) {
      throw FormatError("empty alphabet with a nonempty message");
    }
  } else if (sum != (std::uint64_t{1} << h.table_log)) {
    throw FormatError("frequencies do not sum to 2^table_log");
  }
  if (!cfg.contains(h.final_state)) throw FormatError("final state outside I");
  if (h.message_length > kMaxMessageLength) throw FormatError("message length out of range");
  if (present > 1) {
    // Every symbol carries at least lg(m/(m-1)) > 1/m bits on average, so
    // far longer messages cannot fit in the payload.
    const std::uint64_t states = std::uint64_t{1} << h.table_log;
    if (h.message_length / (4 * states) > h.payload_bits + 64) throw FormatError("message length exceeds payload");
  } else if (h.payload_bits != 0) {
    throw FormatError("single-symbol message with a payload");
  }
  if (payload.size() != (h.payload_bits + 7) / 8) throw FormatError("payload length mismatch");
  return {std::move(h), payload};
}

std::vector<std::uint32_t> quantize(std::span<const std::uint64_t> counts, std::uint64_t l) {
  const std::uint64_t total = std::accumulate(counts.begin(), counts.end(), std::uint64_t{0});
  const auto present = static_cast<std::uint64_t>(std::count_if(counts.begin(), counts.end(), [](auto c) { return c > 0; }));
  if (present == 0) throw InvalidArgument("nothing to quantize");
  if (present > l) throw InvalidArgument("more distinct symbols than states");

  using u128 = unsigned __int128;
  std::vector<std::uint32_t> freqs(counts.size(), 0);
  std::vector<std::uint64_t> rem(counts.size(), 0);
  std::uint64_t sum = 0;
  for (std::size_t s = 0; s < counts.size(); ++s) {
    if (counts[s] == 0) continue;
    const u128 scaled = static_cast<u128>(l) * counts[s];
    freqs[s] = static_cast<std::uint32_t>(std::max<u128>(1, scaled / total));
    rem[s] = static_cast<std::uint64_t>(scaled % total);
    sum += freqs[s];
  }
  std::vector<std::size_t> order;
  for (std::size_t s = 0; s < counts.size(); ++s) {
    if (counts[s] > 0) order.push_back(s);
  }
  if (sum < l) {
    std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return rem[a] > rem[b]; });
    for (std::size_t i = 0; sum < l; i = (i + 1) % order.size(), ++sum) ++freqs[order[i]];
  }
  std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return rem[a] < rem[b]; });
  while (sum > l) {
    for (const auto s : order) {
      if (sum == l) break;
      if (freqs[s] > 1) {
        --freqs[s];
        --sum;
      }
    }
  }
  return freqs;
}

QuantizedDist Model::dist() const {
  std::vector<std::uint32_t> dense;
  for (const auto b : alphabet) dense.push_back(freqs[b]);
  return QuantizedDist(std::move(dense));
}

Model model_from_freqs(std::span<const std::uint32_t> freqs) {
  Model m;
  m.freqs.assign(freqs.begin(), freqs.end());
  for (std::size_t b = 0; b < freqs.size(); ++b) {
    if (freqs[b] > 0) m.alphabet.push_back(static_cast<std::uint8_t>(b));
  }
  return m;
}

Model build_model(std::span<const std::uint8_t> input, std::uint64_t l) {
  std::vector<std::uint64_t> counts(256, 0);
  for (const auto byte : input) ++counts[byte];
  auto freqs = quantize(counts, l);
  while (!freqs.empty() && freqs.back() == 0) freqs.pop_back();
  auto m = model_from_freqs(freqs);
  m.counts = std::move(counts);
  return m;
}

std::vector<std::uint8_t> compress(std::span<const std::uint8_t> input, Variant variant, unsigned table_log,
                                   std::optional<std::span<const std::uint8_t>> key) {
  if (key && variant != Variant::Tans) throw InvalidArgument("keys apply to tANS tables only");
  const auto cfg = container_config(variant, table_log);
  ContainerHeader h;
  h.variant = variant;
  h.table_log = static_cast<std::uint8_t>(table_log);
  h.keyed = key.has_value();
  h.message_length = input.size();
  if (input.empty()) {
    h.final_state = cfg.l();
    return serialize_header(h);
  }
  const Model model = build_model(input, std::uint64_t{1} << table_log);
  h.freqs = model.freqs;

  std::array<Symbol, 256> dense{};
  for (std::size_t i = 0; i < model.alphabet.size(); ++i) dense[model.alphabet[i]] = static_cast<Symbol>(i);
  std::vector<Symbol> reversed;
  if (variant != Variant::UabsStream) {
    reversed.reserve(input.size());
    for (auto it = input.rbegin(); it != input.rend(); ++it) reversed.push_back(dense[*it]);
  }

  DigitStack digits(cfg.b());
  switch (variant) {
    case Variant::Tans: {
      const auto tables = build_tables(tans_spread(model, cfg, key));
      h.final_state = tans_encode(reversed, tables.encoding, digits);
      break;
    }
    case Variant::Rans: {
      auto [state, out] = rans_stream_encode(reversed, model.dist(), cfg);
      h.final_state = state;
      digits = std::move(out);
      break;
    }
    case Variant::UabsStream: {
      const ByteTree tree(model.freqs, cfg);
      State x = cfg.l();
      for (auto it = input.rbegin(); it != input.rend(); ++it) x = tree.encode(*it, x, digits);
      h.final_state = x;
      break;
    }
  }
  h.payload_bits = digits.bit_length();
  auto out = serialize_header(h);
  const auto payload = digits.serialize();
  out.insert(out.end(), payload.begin(), payload.end());
  return out;
}

std::vector<std::uint8_t> decompress(std::span<const std::uint8_t> container,
                                     std::optional<std::span<const std::uint8_t>> key) {
  const auto [h, payload] = parse_container(container);
  if (h.keyed && !key) throw FormatError("container is keyed; a key is required");
  if (!h.keyed && key) throw FormatError("container is not keyed");
  if (h.keyed && h.variant != Variant::Tans) throw FormatError("keyed containers must use tANS");
  const auto cfg = container_config(h.variant, h.table_log);
  std::vector<std::uint8_t> out;
  if (h.message_length == 0) return out;

  const Model model = model_from_freqs(h.freqs);
  auto digits = DigitStack::deserialize(payload, h.payload_bits, cfg.b());
  out.reserve(reserve_hint(h.message_length));
  auto to_bytes = [&](const std::vector<Symbol>& symbols) {
    for (const auto s : symbols) out.push_back(model.alphabet[s]);
  };
  switch (h.variant) {
    case Variant::Tans: {
      const auto tables = build_tables(tans_spread(model, cfg, key));
      to_bytes(tans_decode(h.final_state, digits, h.message_length, tables.decoding));
      break;
    }
    case Variant::Rans:
      to_bytes(rans_stream_decode(h.final_state, digits, h.message_length, model.dist(), cfg));
      break;
    case Variant::UabsStream: {
      const ByteTree tree(model.freqs, cfg);
      State x = h.final_state;
      for (std::uint64_t i = 0; i < h.message_length; ++i) out.push_back(tree.decode(x, digits));
      if (x != cfg.l()) throw FormatError("terminal state mismatch");
      break;
    }
  }
  if (!digits.empty()) throw FormatError("unread payload digits");
  return out;
}

}  // namespace ans
