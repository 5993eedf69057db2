#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "fixslope/count_model.hpp"
#include "fixslope/errors.hpp"
#include "fixslope/sources_bench.hpp"
#include "support.hpp"

using namespace fixslope;

namespace {

double flip_rate(const Sequence& s) {
  double flips = 0.0;
  for (std::size_t i = 1; i < s.size(); ++i) flips += s[i] != s[i - 1];
  return flips / static_cast<double>(s.size() - 1);
}

}  // namespace

TEST_CASE("binary symmetric source flip rates") {
  CHECK(flip_rate(generate(MarkovSource::binary_symmetric(0.0), 5000, 1)) == 0.0);

  const std::size_t n = 100000;
  const double sigma = std::sqrt(0.25 / static_cast<double>(n));
  CHECK(std::abs(flip_rate(generate(MarkovSource::binary_symmetric(0.5), n, 2)) - 0.5) <= 3 * sigma);

  CHECK(std::abs(flip_rate(generate(MarkovSource::binary_symmetric(0.2), 1000000, 3)) - 0.2) <= 0.002);
}

TEST_CASE("sources are reproducible from their seed") {
  const MarkovSource s = MarkovSource::binary_symmetric(0.3, 99);
  CHECK(generate(s, 500) == generate(s, 500, 99));
  CHECK_FALSE(generate(s, 500, 1) == generate(s, 500, 2));
  CHECK(derive_seed(1, 2) == derive_seed(1, 2));
  CHECK(derive_seed(1, 2) != derive_seed(1, 3));
  CHECK(derive_seed(1, 2) != derive_seed(2, 2));
}

TEST_CASE("stationary law and block distribution") {
  const MarkovSource s = MarkovSource::binary_symmetric(0.2);
  CHECK(s.stationary()[0] == doctest::Approx(0.5));
  const auto p2 = s.block_distribution(2);
  CHECK(p2[0b00] == doctest::Approx(0.4));
  CHECK(p2[0b01] == doctest::Approx(0.1));
  CHECK(p2[0b10] == doctest::Approx(0.1));
  CHECK(p2[0b11] == doctest::Approx(0.4));

  // Order 2 over a ternary alphabet with a lopsided kernel.
  std::mt19937_64 rng(81);
  std::vector<double> kernel;
  for (int c = 0; c < 9; ++c) {
    const auto row = testing::random_positive(rng, 3);
    kernel.insert(kernel.end(), row.begin(), row.end());
  }
  const MarkovSource t(2, Alphabet(3), kernel);
  const auto p3 = t.block_distribution(3);
  CHECK(stationarity_defect(p3, 3, 2) < 1e-12);
  const auto p1 = t.block_distribution(1);
  const CountMatrix low = marginalize(CountMatrix(2, Alphabet(3), p3, true), 0);
  for (std::size_t i = 0; i < 3; ++i) CHECK(low[i] == doctest::Approx(p1[i]));

  CHECK_THROWS_AS(MarkovSource(1, Alphabet(2), {0.5, 0.4, 0.5, 0.5}), ConfigError);
}

TEST_CASE("empirical blocks converge to the source law") {
  const MarkovSource s = MarkovSource::binary_symmetric(0.2);
  const Sequence x = generate(s, 1000000, 4);
  const CountMatrix m = count_matrix(x, 3);
  CHECK(total_variation(m.values(), s.block_distribution(4)) <= 0.01);
}

TEST_CASE("reference rate-distortion values") {
  CHECK(binary_entropy(0.2) == doctest::Approx(0.7219).epsilon(1e-4));
  CHECK(binary_entropy(0.2) == doctest::Approx(oracle::binary_entropy(0.2)));
  CHECK(binary_markov_rd(0.2, 0.0) == doctest::Approx(0.7219).epsilon(1e-4));
  CHECK(binary_markov_rd(0.2, 0.2) == 0.0);
  CHECK(binary_markov_rd(0.2, 0.05) == doctest::Approx(0.4355).epsilon(1e-3));
  CHECK_THROWS_AS(binary_markov_rd(0.2, 0.6), ConfigError);
  CHECK_THROWS_AS(binary_markov_rd(0.0, 0.1), ConfigError);
  // Closed form of the critical distortion against its defining equation.
  const double q = 0.2, dc = critical_distortion(q);
  CHECK(dc > 0.0);
  CHECK(dc < q);
  const double r = q / (1 - q);
  CHECK((dc / (1 - dc)) == doctest::Approx(r * r / std::pow(1 + std::sqrt(1 - r * r), 2)));
}

TEST_CASE("lagrangian envelope") {
  for (double alpha : {0.5, 1.0, 2.0, 4.0, 8.0}) {
    const Envelope e = lagrangian_envelope(0.2, alpha);
    CHECK(e.value == doctest::Approx(oracle::envelope_grid(0.2, alpha)).epsilon(1e-6));
    if (e.stationary_point) CHECK(e.d_star == doctest::Approx(*e.stationary_point).epsilon(1e-6));
  }
  const Envelope steep = lagrangian_envelope(0.2, 60.0);
  CHECK(steep.d_star < 1e-6);
  CHECK(steep.value == doctest::Approx(binary_entropy(0.2)).epsilon(1e-4));
  const Envelope flat = lagrangian_envelope(0.2, 1e-4);
  CHECK(flat.d_star == doctest::Approx(0.2));
  CHECK(flat.value == doctest::Approx(1e-4 * 0.2).epsilon(1e-3));
}

TEST_CASE("reference curve shape") {
  const RDCurve c = rd_curve(0.2, 101);
  CHECK(c.rate.front() == doctest::Approx(binary_entropy(0.2)));
  for (std::size_t i = 1; i < c.rate.size(); ++i) CHECK(c.rate[i] <= c.rate[i - 1] + 1e-15);
  for (std::size_t i = 1; i + 1 < c.rate.size(); ++i) {
    CHECK(c.rate[i - 1] + c.rate[i + 1] - 2 * c.rate[i] >= -1e-12);
  }
  std::ostringstream os;
  write_rd_csv(os, c);
  CHECK(os.str().find("D,R,exact") != std::string::npos);
}
