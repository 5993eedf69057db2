#include <doctest.h>

#include <cmath>
#include <map>
#include <random>
#include <set>

#include "fixslope/count_model.hpp"
#include "fixslope/errors.hpp"
#include "fixslope/lossless_codec.hpp"
#include "support.hpp"

using namespace fixslope;
using testing::seq;

namespace {

using Bytes = std::vector<std::uint8_t>;

// Ideal code length in bits of the add-one adaptive model: order-0 counts for
// the first k symbols, then one set of counts per order-k context.
double adaptive_ideal_bits(const oracle::Word& y, int k, int a) {
  std::map<oracle::Word, std::vector<double>> counts;
  double bits = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    oracle::Word key{-1};
    if (i >= static_cast<std::size_t>(k)) key.assign(y.begin() + static_cast<long>(i) - k, y.begin() + static_cast<long>(i));
    auto& c = counts.try_emplace(key, std::vector<double>(static_cast<std::size_t>(a), 1.0)).first->second;
    double total = 0.0;
    for (double v : c) total += v;
    bits -= std::log2(c[static_cast<std::size_t>(y[i])] / total);
    c[static_cast<std::size_t>(y[i])] += 1.0;
  }
  return bits;
}

std::size_t decode_error_position(const Bytes& bytes) {
  try {
    entropy_decode(bytes);
  } catch (const DecodeError& e) {
    return e.position();
  }
  FAIL("expected a decode error");
  return 0;
}

}  // namespace

TEST_CASE("lz78 codelength examples") {
  CHECK(lz78_codelength(seq("0"), 0).bits_total == 1.0);
  const Lz78Parse p = lz78_parse(seq("000000"));
  CHECK(p.complete_phrases() == 3);
  CHECK_FALSE(p.has_partial());
  CHECK(lz78_codelength(seq("000000"), 0).bits_total == 6.0);

  double last = 1.0;
  for (std::size_t n : {1000u, 10000u, 100000u}) {
    const double bps = lz78_codelength(Sequence(std::vector<Symbol>(n, 0), Alphabet(2)), 1).bits_per_symbol;
    CHECK(bps < last);
    last = bps;
  }
}

TEST_CASE("lz78 parse validity") {
  std::mt19937_64 rng(61);
  for (int t = 0; t < 200; ++t) {
    const int a = 2 + static_cast<int>(rng() % 3);
    const Sequence y = testing::random_sequence(rng, 1 + rng() % 300, a);
    const Lz78Parse p = lz78_parse(y);
    std::vector<oracle::Word> phrases{{}};
    std::set<oracle::Word> seen;
    for (std::size_t j = 0; j < p.complete_phrases(); ++j) {
      REQUIRE(p.parent[j] < phrases.size());
      oracle::Word w = phrases[p.parent[j]];
      w.push_back(p.innovation[j]);
      CHECK(seen.insert(w).second);
      phrases.push_back(w);
    }
    oracle::Word joined;
    for (std::size_t j = 1; j < phrases.size(); ++j) joined.insert(joined.end(), phrases[j].begin(), phrases[j].end());
    if (p.has_partial()) joined.insert(joined.end(), phrases[p.partial_parent].begin(), phrases[p.partial_parent].end());
    CHECK(joined == testing::word(y));
    const auto expanded = lz78_expand(p);
    CHECK(oracle::Word(expanded.begin(), expanded.end()) == testing::word(y));
  }
}

TEST_CASE("entropy coder rates") {
  const Sequence constant(std::vector<Symbol>(1000, 0), Alphabet(2));
  CHECK(entropy_codelength(constant, 2).bits_per_symbol <= 0.2);

  std::mt19937_64 rng(62);
  const Sequence iid = testing::random_sequence(rng, 10000, 2);
  const double bps = entropy_codelength(iid, 0).bits_per_symbol;
  CHECK(bps >= 1.0);
  CHECK(bps <= 1.01);
}

TEST_CASE("payload tracks the ideal adaptive code length") {
  std::mt19937_64 rng(63);
  for (int t = 0; t < 60; ++t) {
    const int a = 2 + static_cast<int>(rng() % 3);
    const int k = static_cast<int>(rng() % 3);
    const Sequence y = testing::random_sequence(rng, 1 + rng() % 5000, a);
    const double ideal = adaptive_ideal_bits(testing::word(y), k, a);
    const double bits = static_cast<double>(entropy_encode(y, k).payload_bits());
    CHECK(bits >= ideal - 1e-6);
    CHECK(bits <= ideal + 48.0);
  }
}

TEST_CASE("round trips") {
  for (int n = 1; n <= 12; ++n) {
    for (std::uint32_t code = 0; code < (1u << n); ++code) {
      std::vector<Symbol> v(static_cast<std::size_t>(n));
      for (int i = 0; i < n; ++i) v[static_cast<std::size_t>(i)] = (code >> i) & 1;
      const Sequence y(v, Alphabet(2));
      const int k = static_cast<int>(code % 3);
      REQUIRE(entropy_decode(entropy_encode(y, k).serialize()) == y);
    }
  }
  std::mt19937_64 rng(64);
  for (int a : {2, 3, 4, 256}) {
    for (int t = 0; t < 20; ++t) {
      const int k = a == 256 ? static_cast<int>(rng() % 2) : static_cast<int>(rng() % 4);
      const Sequence y = testing::random_sequence(rng, 1 + rng() % 3000, a);
      const Bitstream b = entropy_encode(y, k);
      CHECK(entropy_decode(b.serialize()) == y);
      CHECK(static_cast<double>(b.payload_bits()) <= two_part_bound_bits(y, k));
    }
  }
}

TEST_CASE("golden streams") {
  CHECK(entropy_encode(Sequence(std::vector<Symbol>(16, 0), Alphabet(2)), 2).serialize() ==
        Bytes{0x4d, 0x4c, 0x5a, 0x43, 0x01, 0x10, 0x02, 0x02, 0x01, 0x00, 0x00, 0x00, 0x00, 0x00});
  CHECK(entropy_encode(seq("0110100110"), 1).serialize() ==
        Bytes{0x4d, 0x4c, 0x5a, 0x43, 0x01, 0x0a, 0x01, 0x02, 0x01, 0x00, 0x64, 0x3b, 0x2a, 0x16, 0xcc});
  CHECK(entropy_encode(seq("012210012021", 3), 0).serialize() ==
        Bytes{0x4d, 0x4c, 0x5a, 0x43, 0x01, 0x0c, 0x00, 0x03, 0x01, 0x00, 0x3f, 0x01, 0x7c, 0x2a, 0x31, 0xb2});
  CHECK(entropy_encode(seq("0"), 0).serialize() ==
        Bytes{0x4d, 0x4c, 0x5a, 0x43, 0x01, 0x01, 0x00, 0x02, 0x01, 0x00, 0x00, 0x00, 0x00, 0x00});
}

TEST_CASE("header layout") {
  Bitstream b = entropy_encode(Sequence(std::vector<Symbol>(300, 1), Alphabet(256)), 1);
  const Bytes bytes = b.serialize();
  // 300 = 0b10'0101100 as LEB128: 0xac 0x02.
  CHECK(bytes[5] == 0xac);
  CHECK(bytes[6] == 0x02);
  CHECK(bytes[7] == 1);
  CHECK(bytes[8] == 0);  // 256 stored as 0
  CHECK(b.header_bytes() == 10);
  const Bitstream back = Bitstream::parse(bytes);
  CHECK(back.alphabet == 256);
  CHECK(back.n == 300);
}

TEST_CASE("decode errors carry the byte position") {
  const Bytes good = entropy_encode(seq("0110100110"), 1).serialize();
  Bytes bad = good;
  bad[2] = 'X';
  CHECK(decode_error_position(bad) == 2);
  bad = good;
  bad[4] = 9;
  CHECK(decode_error_position(bad) == 4);
  bad = good;
  bad[8] = 7;
  CHECK(decode_error_position(bad) == 8);
  CHECK(decode_error_position(Bytes(good.begin(), good.begin() + 6)) == 6);
  bad = good;
  bad[5] = 0;
  CHECK(decode_error_position(bad) == 5);
  bad = good;
  bad[9] = 1;  // payload must open with a zero byte
  CHECK(decode_error_position(bad) == 9);
  bad = good;
  bad.push_back(0);
  CHECK(decode_error_position(bad) >= 10);
  CHECK_THROWS_AS(entropy_decode(Bytes(good.begin(), good.end() - 2)), DecodeError);
}

TEST_CASE("ziv order and scan") {
  CHECK(loglog_order(2) == 0);
  CHECK(loglog_order(16) == 2);
  CHECK(loglog_order(1u << 16) == 4);
  const std::vector<std::size_t> ns{1024, 4096, 16384};
  const auto rows = ziv_gap_scan(loglog_order, ns, default_ziv_families(), 2, 7);
  REQUIRE(rows.size() == 3);
  for (std::size_t i = 1; i < rows.size(); ++i) CHECK(rows[i].max_excess < rows[i - 1].max_excess);
  for (const auto& r : rows) CHECK(r.max_excess >= 0.0);
}
