#include <doctest.h>

#include <random>

#include "fixslope/simplex.hpp"
#include "oracles.hpp"

using namespace fixslope;

TEST_CASE("simplex matches vertex enumeration on random bounded programs") {
  std::mt19937_64 rng(41);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  int feasible = 0, infeasible = 0;
  for (int t = 0; t < 300; ++t) {
    const std::size_t n = 3 + rng() % 10;
    const std::size_t m = 1 + rng() % std::min<std::size_t>(8, n - 1);
    std::vector<std::vector<double>> a(m, std::vector<double>(n));
    std::vector<double> b(m), c(n);
    // Row 0 is sum x = s > 0, which keeps the feasible set bounded.
    for (std::size_t j = 0; j < n; ++j) a[0][j] = 1.0;
    b[0] = 1.0 + u(rng) * 0.5;
    for (std::size_t i = 1; i < m; ++i) {
      for (auto& v : a[i]) v = u(rng);
      b[i] = u(rng) * 0.3;
    }
    for (auto& v : c) v = u(rng);

    LinearProgram lp(n);
    lp.set_objective(c);
    for (std::size_t i = 0; i < m; ++i) lp.add_equality(a[i], b[i]);
    const LpSolution sol = solve_lp(lp);
    const auto expect = oracle::lp_by_vertices(a, b, c);
    if (expect) {
      ++feasible;
      REQUIRE(sol.status == LpStatus::optimal);
      CHECK(sol.objective == doctest::Approx(*expect).epsilon(1e-8));
      for (std::size_t i = 0; i < m; ++i) {
        double lhs = 0.0;
        for (std::size_t j = 0; j < n; ++j) lhs += a[i][j] * sol.x[j];
        CHECK(lhs == doctest::Approx(b[i]).epsilon(1e-8));
      }
      for (double v : sol.x) CHECK(v >= -1e-9);
    } else {
      ++infeasible;
      CHECK(sol.status == LpStatus::infeasible);
    }
  }
  CHECK(feasible >= 100);
  CHECK(infeasible >= 1);
}

TEST_CASE("redundant rows are tolerated") {
  LinearProgram lp(3);
  const std::vector<double> c{1, 2, 3}, r{1, 1, 1}, r2{2, 2, 2};
  lp.set_objective(c);
  lp.add_equality(r, 1.0);
  lp.add_equality(r2, 2.0);
  const LpSolution sol = solve_lp(lp);
  REQUIRE(sol.status == LpStatus::optimal);
  CHECK(sol.objective == doctest::Approx(1.0));
}

TEST_CASE("infeasible and unbounded programs") {
  LinearProgram bad(2);
  const std::vector<double> ones{1, 1}, c{1, 1};
  bad.set_objective(c);
  bad.add_equality(ones, -1.0);
  CHECK(solve_lp(bad).status == LpStatus::infeasible);

  LinearProgram open(2);
  const std::vector<double> down{-1, 0}, diff{1, -1};
  open.set_objective(down);
  open.add_equality(diff, 0.0);
  CHECK(solve_lp(open).status == LpStatus::unbounded);
}
