#include <doctest.h>

#include <atomic>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "fixslope/coefficients.hpp"
#include "fixslope/count_model.hpp"
#include "fixslope/errors.hpp"
#include "fixslope/experiments.hpp"
#include "fixslope/mcmc_baseline.hpp"
#include "fixslope/sources_bench.hpp"
#include "support.hpp"

using namespace fixslope;

namespace {

std::string fig1_csv(unsigned workers) {
  Fig1Config cfg;
  cfg.n = 800;
  cfg.k = 3;
  cfg.reps = 3;
  cfg.alphas = {1.0, 4.0};
  cfg.workers = workers;
  std::ostringstream os;
  write_fig1_csv(os, cfg, run_fig1(cfg));
  return os.str();
}

}  // namespace

TEST_CASE("mode names") {
  for (CoefficientMode m : {CoefficientMode::shortcut, CoefficientMode::iterative, CoefficientMode::program}) {
    CHECK(parse_mode(mode_name(m)) == m);
  }
  CHECK_THROWS_AS(parse_mode("fast"), ConfigError);
}

TEST_CASE("worker pool covers every cell once and rethrows") {
  std::vector<std::atomic<int>> hits(97);
  run_cells(hits.size(), 4, [&](std::size_t i) { ++hits[i]; });
  for (const auto& h : hits) CHECK(h.load() == 1);
  CHECK_THROWS_AS(run_cells(10, 3, [](std::size_t i) {
                    if (i == 7) throw std::runtime_error("cell failed");
                  }),
                  std::runtime_error);
}

TEST_CASE("experiment output does not depend on the worker count") {
  const std::string one = fig1_csv(1);
  CHECK(one == fig1_csv(4));
  CHECK(one.rfind("# fig1", 0) == 0);
}

TEST_CASE("rows are recomputable from their seeds") {
  Fig1Config cfg;
  cfg.n = 600;
  cfg.k = 2;
  cfg.reps = 2;
  cfg.alphas = {2.0};
  const Fig1Result result = run_fig1(cfg);
  const DistortionMatrix d = DistortionMatrix::hamming(Alphabet(2));
  for (const Fig1Row& row : result.rows) {
    const Sequence x = generate(MarkovSource::binary_symmetric(cfg.q), cfg.n, row.source_seed);
    EncodeSettings s;
    s.alpha = row.alpha;
    s.k = cfg.k;
    const EncodeResult r = encode_with_mode(x, s, d);
    CHECK(r.true_cost.distortion_part == row.distortion);
    CHECK(r.true_cost.entropy_part == row.h_k);
  }

  Fig3Config f3;
  f3.n = 400;
  f3.k = 2;
  f3.reps = 1;
  f3.alphas = {2.0};
  f3.sweeps = 3;
  const Fig3Result r3 = run_fig3(f3);
  for (const Fig3Row& row : r3.rows) {
    const Sequence x = generate(MarkovSource::binary_symmetric(f3.q), f3.n, row.source_seed);
    AnnealConfig ac;
    ac.iterations = f3.sweeps * f3.n;
    ac.beta = log_schedule(f3.n);
    ac.seed = row.chain_seed;
    ac.k = f3.k;
    ac.alpha = row.alpha;
    CHECK(gibbs_anneal(x, ac, d).true_cost.total == row.mcmc.total);
  }
}

TEST_CASE("encode modes") {
  const DistortionMatrix d = DistortionMatrix::hamming(Alphabet(2));
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const Sequence x = generate(MarkovSource::binary_symmetric(0.2), 1500, seed);
    EncodeSettings s;
    s.alpha = 2.0;
    s.k = 3;
    const EncodeResult shortcut = encode_with_mode(x, s, d);
    s.mode = CoefficientMode::iterative;
    const EncodeResult iterative = encode_with_mode(x, s, d);
    CHECK(iterative.true_cost.total <= shortcut.true_cost.total + 1e-12);
    s.mode = CoefficientMode::program;
    s.k1 = 2;
    const EncodeResult program = encode_with_mode(x, s, d);
    // The reported cost is the recomputed H_k + alpha d_n.
    const LinearizedCost again = true_cost(x, program.reconstruction, s.alpha, s.k, d);
    CHECK(program.true_cost.total == doctest::Approx(again.total).epsilon(1e-9));
  }
  EncodeSettings big;
  big.k = 12;
  big.mode = CoefficientMode::program;
  CHECK_THROWS_AS(encode_with_mode(generate(MarkovSource::binary_symmetric(0.2), 100, 1), big, d), BudgetExceeded);
}

TEST_CASE("a tiny slope compresses binary digits to almost nothing") {
  std::mt19937_64 rng(91);
  const Sequence x = testing::random_sequence(rng, 2000, 2);
  EncodeSettings s;
  s.alpha = 1e-3;
  s.k = 2;
  const EncodeResult r = encode_with_mode(x, s, DistortionMatrix::hamming(Alphabet(2)));
  CHECK(r.true_cost.entropy_part <= 0.05);
}
