#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "fixslope/coefficients.hpp"
#include "fixslope/count_model.hpp"
#include "fixslope/errors.hpp"
#include "fixslope/trellis_encoder.hpp"
#include "support.hpp"

using namespace fixslope;
using testing::seq;

namespace {

double linear_value(const CoefficientMatrix& lambda, std::span<const double> m) {
  double s = 0.0;
  for (std::size_t i = 0; i < m.size(); ++i) s += lambda[i] * m[i];
  return s;
}

}  // namespace

TEST_CASE("gradient coefficient examples") {
  const CoefficientMatrix flat = gradient_coefficients(CountMatrix(0, Alphabet(2), {0.5, 0.5}, true), 10.0);
  CHECK(flat[0] == doctest::Approx(1.0));
  CHECK(flat[1] == doctest::Approx(1.0));

  const CoefficientMatrix skew = gradient_coefficients(CountMatrix(0, Alphabet(2), {0.25, 0.75}, true), 10.0);
  CHECK(skew[0] == doctest::Approx(2.0).epsilon(1e-3));
  CHECK(skew[1] == doctest::Approx(0.415).epsilon(1e-3));

  // Column b = 0 is (s, 0); column 1 is never visited.
  const CoefficientMatrix clamp = gradient_coefficients(CountMatrix(1, Alphabet(2), {1.0, 0.0, 0.0, 0.0}, true), 7.5);
  CHECK(clamp(0, 0) == 0.0);
  CHECK(clamp(1, 0) == 7.5);
  CHECK(clamp(0, 1) == 7.5);
  CHECK(clamp(1, 1) == 7.5);

  CHECK_THROWS_AS(gradient_coefficients(CountMatrix(0, Alphabet(2), {0.5, 0.5}, true), 0.0), ConfigError);
}

TEST_CASE("default clamp") {
  CHECK(default_lambda_max(1024, Alphabet(4)) == doctest::Approx(12.0));
}

TEST_CASE("gradient matches central differences") {
  std::mt19937_64 rng(21);
  for (int t = 0; t < 100; ++t) {
    const int a = 2 + static_cast<int>(rng() % 2);
    const int k = static_cast<int>(rng() % 3);
    const std::size_t size = checked_pow(static_cast<std::size_t>(a), k + 1);
    const auto m = testing::random_positive(rng, size);
    const CoefficientMatrix lambda = gradient_coefficients(CountMatrix(k, Alphabet(a), m, true), 100.0);
    const std::size_t i = rng() % size;
    const double h = 1e-6;
    auto plus = m, minus = m;
    plus[i] += h;
    minus[i] -= h;
    const double fd = (oracle::matrix_entropy(plus, a) - oracle::matrix_entropy(minus, a)) / (2 * h);
    CHECK(lambda[i] == doctest::Approx(fd).epsilon(1e-5));
  }
}

TEST_CASE("tangent plane majorizes the entropy") {
  std::mt19937_64 rng(22);
  for (int t = 0; t < 1000; ++t) {
    const int a = 2 + static_cast<int>(rng() % 3);
    const int k = static_cast<int>(rng() % 3);
    const std::size_t size = checked_pow(static_cast<std::size_t>(a), k + 1);
    const auto m0 = testing::random_positive(rng, size);
    auto m = testing::random_positive(rng, size);
    if (t % 3 == 0) m[rng() % size] = 0.0;  // boundary points too
    double s = 0.0;
    for (double v : m) s += v;
    for (double& v : m) v /= s;
    const CountMatrix at(k, Alphabet(a), m0, true);
    const CoefficientMatrix lambda = gradient_coefficients(at, 1e3);
    const double h0 = conditional_entropy(at);
    const double bound = h0 + linear_value(lambda, m) - linear_value(lambda, m0);
    CHECK(oracle::matrix_entropy(m, a) <= bound + 1e-9);
    // The tangent is exact at its own point.
    CHECK(linear_value(lambda, m0) == doctest::Approx(h0).epsilon(1e-9));
  }
}

TEST_CASE("cost at the expansion point equals the empirical entropy") {
  std::mt19937_64 rng(23);
  int checked = 0;
  for (int t = 0; t < 400 && checked < 100; ++t) {
    const Sequence y = testing::random_sequence(rng, 60 + rng() % 60, 2);
    const int k = 1 + static_cast<int>(rng() % 2);
    const CountMatrix m = count_matrix(y, k);
    bool positive = true;
    for (double v : m.values()) positive = positive && v > 0.0;
    if (!positive) continue;
    ++checked;
    const CoefficientMatrix lambda = gradient_coefficients(m, default_lambda_max(y.size(), y.alphabet()));
    const DistortionMatrix d = DistortionMatrix::hamming(Alphabet(2));
    const LinearizedCost c = linearized_cost(y, y, lambda, 0.7, d);
    CHECK(c.entropy_part == doctest::Approx(conditional_entropy(y, k)).epsilon(1e-9));
  }
  CHECK(checked == 100);
}

TEST_CASE("linearized cost examples") {
  const DistortionMatrix d = DistortionMatrix::hamming(Alphabet(2));
  const Sequence x = seq("0101");
  const CoefficientMatrix lambda = gradient_coefficients(count_matrix(x, 1), 5.0);
  const LinearizedCost same = linearized_cost(x, x, lambda, 3.0, d);
  CHECK(same.distortion_part == 0.0);
  CHECK(same.entropy_part == doctest::Approx(0.0));

  const CoefficientMatrix zero(1, Alphabet(2), std::vector<double>(4, 0.0), 1.0);
  const LinearizedCost pure = linearized_cost(seq("0000000000"), seq("1110000000"), zero, 1.0, d);
  CHECK(pure.total == doctest::Approx(0.3));

  CHECK_THROWS_AS(linearized_cost(seq("000"), seq("0000"), zero, 1.0, d), ContractViolation);
}

TEST_CASE("true cost examples") {
  const DistortionMatrix d = DistortionMatrix::hamming(Alphabet(2));
  const Sequence x = seq("0110100110");
  const LinearizedCost constant = true_cost(x, seq("0000000000"), 2.0, 1, d);
  CHECK(constant.entropy_part == 0.0);
  CHECK(constant.total == doctest::Approx(2.0 * 5 / 10));
  const LinearizedCost self = true_cost(x, x, 2.0, 1, d);
  CHECK(self.total == doctest::Approx(conditional_entropy(x, 1)));
}

TEST_CASE("coefficients survive a csv round trip") {
  std::mt19937_64 rng(24);
  const auto m = testing::random_positive(rng, 27);
  const CoefficientMatrix lambda = gradient_coefficients(CountMatrix(2, Alphabet(3), m, true), 9.25);
  std::stringstream ss;
  write_coefficients_csv(ss, lambda);
  const CoefficientMatrix back = read_coefficients_csv(ss);
  CHECK(back.order() == 2);
  CHECK(back.alphabet().size == 3);
  CHECK(back.lambda_max() == 9.25);
  for (std::size_t i = 0; i < lambda.size(); ++i) CHECK(back[i] == lambda[i]);
}

TEST_CASE("linearizing at a minimizer keeps the minimum") {
  // Exhaustive check on small binary instances: re-expanding at a minimizer of
  // the exact cost, the linearized minimum equals the exact minimum and every
  // linearized minimizer is an exact minimizer.
  std::mt19937_64 rng(25);
  const DistortionMatrix d = DistortionMatrix::hamming(Alphabet(2));
  for (int t = 0; t < 12; ++t) {
    const int n = 6 + static_cast<int>(rng() % 5);
    const double alpha = 0.25 + 0.25 * static_cast<double>(rng() % 12);
    const Sequence x = testing::random_sequence(rng, static_cast<std::size_t>(n), 2);
    const oracle::Word xw = testing::word(x);
    const auto exact = oracle::minimize(n, 2, [&](const oracle::Word& y) { return oracle::exact_cost(xw, y, 1, alpha); });
    const CoefficientMatrix lambda = gradient_coefficients(
        count_matrix(Sequence(std::vector<Symbol>(exact.second.begin(), exact.second.end()), Alphabet(2)), 1),
        default_lambda_max(static_cast<std::size_t>(n), Alphabet(2)));
    std::vector<double> lam(lambda.values().begin(), lambda.values().end());
    const auto linear = oracle::minimize(n, 2, [&](const oracle::Word& y) { return oracle::cyclic_linear(xw, y, lam, 1, 2, alpha); });
    CHECK(linear.first == doctest::Approx(exact.first).epsilon(1e-9));
    oracle::minimize(n, 2, [&](const oracle::Word& y) {
      if (std::abs(oracle::cyclic_linear(xw, y, lam, 1, 2, alpha) - linear.first) < 1e-9) {
        CHECK(oracle::exact_cost(xw, y, 1, alpha) == doctest::Approx(exact.first).epsilon(1e-9));
      }
      return 0.0;
    });
  }
}
