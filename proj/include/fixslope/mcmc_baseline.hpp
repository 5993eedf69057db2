#ifndef FIXSLOPE_MCMC_BASELINE_HPP_
#define FIXSLOPE_MCMC_BASELINE_HPP_

#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <span>
#include <vector>

#include "fixslope/coefficients.hpp"
#include "fixslope/count_model.hpp"

namespace fixslope {

// Energy of a reconstruction in total bits: n (H_k(y) + alpha d_n(x, y)).
double full_energy(const Sequence& x, std::span<const Symbol> y, int k, double alpha,
                   const DistortionMatrix& d);

// E(y with y_i := a) - E(y), touching only the k+1 cyclic blocks that contain
// position i. `counts` must be block_counts(y, k); a mismatch that the update
// would expose (a count going negative, a wrong total) throws
// ContractViolation.
double incremental_energy_delta(const Sequence& x, std::span<const Symbol> y, std::size_t i,
                                Symbol a, std::span<const std::uint64_t> counts, int k,
                                double alpha, const DistortionMatrix& d);

// A reconstruction with its block counts and energy kept in sync.
class AnnealState {
 public:
  AnnealState(const Sequence& x, const Sequence& y0, int k, double alpha,
              const DistortionMatrix& d);

  double energy() const { return energy_; }
  double delta(std::size_t i, Symbol a) const;
  void apply(std::size_t i, Symbol a);

  std::size_t size() const { return y_.size(); }
  int order() const { return k_; }
  Alphabet alphabet() const { return alphabet_; }
  std::span<const Symbol> symbols() const { return y_; }
  std::span<const std::uint64_t> counts() const { return counts_; }
  Sequence reconstruction() const { return Sequence(y_, alphabet_); }

 private:
  const Sequence& x_;
  std::vector<Symbol> y_;
  Alphabet alphabet_;
  int k_;
  double alpha_;
  const DistortionMatrix& d_;
  std::vector<std::uint64_t> counts_;
  std::vector<std::uint64_t> context_totals_;
  double energy_ = 0.0;
};

// Probabilities of each symbol at position i under the Boltzmann law
// proportional to exp(-(beta / n) * E), where E is in total bits (so beta
// multiplies the per-symbol energy).
std::vector<double> gibbs_conditional(const AnnealState& state, std::size_t i, double beta);

// beta(t) = n ln t, with t = 1 given the value at t = 2.
std::function<double(std::uint64_t)> log_schedule(std::size_t n);
std::function<double(std::uint64_t)> constant_schedule(double beta);

struct AnnealConfig {
  std::uint64_t iterations = 1;
  std::function<double(std::uint64_t)> beta;  // t = 1, 2, ...
  std::uint64_t seed = 1;
  int k = 0;
  double alpha = 1.0;
  std::uint64_t checkpoint_every = 0;  // 0: first and last step only
};

struct AnnealCheckpoint {
  std::uint64_t t = 0;
  double energy = 0.0;  // total bits
  double beta = 0.0;
};

struct AnnealTrace {
  std::vector<AnnealCheckpoint> checkpoints;
  std::uint64_t proposals = 0;
  std::uint64_t changes = 0;  // steps where the resampled symbol differed
  Sequence reconstruction;
  double final_energy = 0.0;  // maintained incrementally, total bits
  LinearizedCost true_cost;   // recomputed from scratch
  double seconds = 0.0;
};

// Starts at y = x and runs cfg.iterations single-site Gibbs updates at a
// uniformly chosen position. Throws ConfigError on an invalid config.
AnnealTrace gibbs_anneal(const Sequence& x, const AnnealConfig& cfg, const DistortionMatrix& d);

// Columns t,energy,beta.
void write_trace_csv(std::ostream& os, const AnnealTrace& trace);

}  // namespace fixslope

#endif  // FIXSLOPE_MCMC_BASELINE_HPP_
