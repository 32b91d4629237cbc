#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <vector>

#include "ans/error.hpp"
#include "ans/uabs.hpp"

using namespace ans;

namespace {

std::uint64_t ceil_div(std::uint64_t a, std::uint64_t b) { return (a + b - 1) / b; }

// Symbol sequence straight from x_1 = ceil(x p) (or floor), by counting.
std::vector<Symbol> symbol_sequence(std::uint64_t num, std::uint64_t den, std::uint64_t n, UabsVariant v) {
  auto ones_below = [&](std::uint64_t x) { return v == UabsVariant::Ceiling ? ceil_div(x * num, den) : x * num / den; };
  std::vector<Symbol> seq;
  for (std::uint64_t x = 0; x < n; ++x) seq.push_back(static_cast<Symbol>(ones_below(x + 1) - ones_below(x)));
  return seq;
}

}  // namespace

TEST_CASE("BinaryProb validates and reduces") {
  CHECK(BinaryProb(6, 20) == BinaryProb(3, 10));
  CHECK_THROWS_AS(BinaryProb(0, 10), InvalidArgument);
  CHECK_THROWS_AS(BinaryProb(10, 10), InvalidArgument);
  CHECK(BinaryProb(3, 10).of(0) == Rational(7, 10));
}

TEST_CASE("symbol at x") {
  const BinaryProb p(3, 10);
  CHECK(uabs_symbol(3, p) == 1);
  CHECK(uabs_symbol(4, p) == 0);
  for (State x = 0; x < 40; x += 2) CHECK(uabs_symbol(x, BinaryProb(1, 2)) == 1);
}

TEST_CASE("decode and encode on the worked sequence 1 3 5 8 26 38") {
  const BinaryProb p(3, 10);
  CHECK(uabs_decode(3, p) == Decoded{1, 1});
  CHECK(uabs_decode(8, p) == Decoded{0, 5});
  CHECK(uabs_decode(10, BinaryProb(1, 2)) == Decoded{1, 5});
  CHECK(uabs_encode(1, 1, p) == 3);
  CHECK(uabs_encode(0, 5, p) == 8);
  CHECK(uabs_encode(1, 38, p) == 126);
  const std::vector<std::pair<Symbol, State>> path{{1, 3}, {0, 5}, {0, 8}, {1, 26}, {0, 38}, {1, 126}};
  State x = 1;
  for (const auto& [s, expect] : path) {
    x = uabs_encode(s, x, p);
    CHECK(x == expect);
  }
  CHECK(x == 126);
}

TEST_CASE("coding matches a counting oracle") {
  const std::vector<std::pair<std::uint64_t, std::uint64_t>> probs{{3, 10}, {1, 2}, {1, 7}, {5, 6}, {13, 64}, {99, 100}};
  for (const auto v : {UabsVariant::Ceiling, UabsVariant::Floor}) {
    for (const auto& [num, den] : probs) {
      const BinaryProb p(num, den);
      const std::uint64_t n = 3000;
      const auto seq = symbol_sequence(num, den, n, v);
      std::uint64_t seen[2] = {0, 0};
      for (State x = 0; x < n; ++x) {
        const Symbol s = seq[x];
        REQUIRE(uabs_symbol(x, p, v) == s);
        REQUIRE(uabs_decode(x, p, v) == Decoded{s, seen[s]});
        if (seen[s] >= 1) REQUIRE(uabs_encode(s, seen[s], p, v) == x);
        ++seen[s];
      }
    }
  }
}

TEST_CASE("encode rejects x = 0 and overflow") {
  const BinaryProb p(3, 10);
  CHECK_THROWS_AS(uabs_encode(1, 0, p), InvalidArgument);
  CHECK_THROWS_AS(uabs_encode(2, 5, p), InvalidArgument);
  CHECK_THROWS_AS(uabs_encode(1, ~State{0} / 2, p), OverflowError);
}

TEST_CASE("inaccuracy") {
  const BinaryProb p(3, 10);
  CHECK(uabs_inaccuracy(3, p) == Rational(1, 30));
  for (State x = 2; x < 200; x += 2) CHECK(uabs_inaccuracy(x, BinaryProb(1, 2)) == Rational(0));
  for (const auto v : {UabsVariant::Ceiling, UabsVariant::Floor}) {
    for (State x = 1; x < 5000; ++x) {
      const auto e = uabs_inaccuracy(x, BinaryProb(7, 23), v);
      REQUIRE(boost::abs(e) < Rational(1, static_cast<std::int64_t>(x)));
    }
  }
  CHECK(boost::abs(uabs_inaccuracy(10, p)) < Rational(1, 10));
}
