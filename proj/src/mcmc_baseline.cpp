#include "fixslope/mcmc_baseline.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <ostream>
#include <random>

#include "fixslope/errors.hpp"
#include "fixslope/trellis_encoder.hpp"

namespace fixslope {

namespace {

double xlog2x(double c) { return c > 0.0 ? c * std::log2(c) : 0.0; }

// Code of the cyclic (k+1)-block ending at j, with position i read as `a`.
std::size_t block_code(std::span<const Symbol> y, std::size_t j, int k, std::size_t a,
                       std::size_t i, Symbol sub) {
  const std::size_t n = y.size();
  std::size_t code = 0;
  for (int t = k; t >= 0; --t) {
    const std::size_t pos = (j + n - static_cast<std::size_t>(t) % n) % n;
    code = code * a + (pos == i ? sub : y[pos]);
  }
  return code;
}

struct Change {
  std::size_t code;
  long long diff;
};

void add_change(std::vector<Change>& changes, std::size_t code, long long diff) {
  for (Change& c : changes) {
    if (c.code == code) {
      c.diff += diff;
      return;
    }
  }
  changes.push_back({code, diff});
}

// Block and context count changes caused by y_i := a.
void collect_changes(std::span<const Symbol> y, std::size_t i, Symbol sub, int k, std::size_t a,
                     std::vector<Change>& blocks, std::vector<Change>& contexts) {
  blocks.clear();
  contexts.clear();
  const std::size_t n = y.size();
  const std::size_t span = std::min<std::size_t>(static_cast<std::size_t>(k), n - 1);
  for (std::size_t t = 0; t <= span; ++t) {
    const std::size_t j = (i + t) % n;
    const std::size_t before = block_code(y, j, k, a, i, y[i]);
    const std::size_t after = block_code(y, j, k, a, i, sub);
    if (before == after) continue;
    add_change(blocks, before, -1);
    add_change(blocks, after, +1);
    add_change(contexts, before / a, -1);
    add_change(contexts, after / a, +1);
  }
}

double entropy_change(std::span<const std::uint64_t> counts, std::span<const std::uint64_t> context_totals,
                      const std::vector<Change>& blocks, const std::vector<Change>& contexts) {
  double delta = 0.0;
  for (const Change& c : contexts) {
    if (c.diff == 0) continue;
    const long long now = static_cast<long long>(context_totals[c.code]);
    if (now + c.diff < 0) throw ContractViolation("block counts inconsistent with the sequence");
    delta += xlog2x(static_cast<double>(now + c.diff)) - xlog2x(static_cast<double>(now));
  }
  for (const Change& c : blocks) {
    if (c.diff == 0) continue;
    const long long now = static_cast<long long>(counts[c.code]);
    if (now + c.diff < 0) throw ContractViolation("block counts inconsistent with the sequence");
    delta -= xlog2x(static_cast<double>(now + c.diff)) - xlog2x(static_cast<double>(now));
  }
  return delta;
}

std::vector<std::uint64_t> totals_of(std::span<const std::uint64_t> counts, std::size_t a) {
  std::vector<std::uint64_t> totals(counts.size() / a, 0);
  for (std::size_t s = 0; s < counts.size(); ++s) totals[s / a] += counts[s];
  return totals;
}

}  // namespace

double full_energy(const Sequence& x, std::span<const Symbol> y, int k, double alpha,
                   const DistortionMatrix& d) {
  if (x.size() != y.size()) throw ContractViolation("source and reconstruction lengths differ");
  const Sequence ys(std::vector<Symbol>(y.begin(), y.end()), d.reconstruction());
  double dist = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) dist += d(x[i], y[i]);
  return static_cast<double>(y.size()) * conditional_entropy(ys, k) + alpha * dist;
}

double incremental_energy_delta(const Sequence& x, std::span<const Symbol> y, std::size_t i,
                                Symbol a, std::span<const std::uint64_t> counts, int k,
                                double alpha, const DistortionMatrix& d) {
  const std::size_t as = d.reconstruction().size;
  if (i >= y.size() || a >= as) throw ContractViolation("position or symbol out of range");
  if (counts.size() != checked_pow(as, k + 1)) throw ContractViolation("count array has the wrong size");
  std::uint64_t total = 0;
  for (std::uint64_t c : counts) total += c;
  if (total != y.size()) throw ContractViolation("block counts do not sum to n");
  if (a == y[i]) return 0.0;
  std::vector<Change> blocks, contexts;
  collect_changes(y, i, a, k, as, blocks, contexts);
  const auto totals = totals_of(counts, as);
  return entropy_change(counts, totals, blocks, contexts) + alpha * (d(x[i], a) - d(x[i], y[i]));
}

AnnealState::AnnealState(const Sequence& x, const Sequence& y0, int k, double alpha,
                         const DistortionMatrix& d)
    : x_(x), y_(y0.symbols().begin(), y0.symbols().end()), alphabet_(d.reconstruction()), k_(k),
      alpha_(alpha), d_(d) {
  if (x.size() != y0.size()) throw ContractViolation("source and reconstruction lengths differ");
  if (y0.alphabet().size > alphabet_.size) throw ContractViolation("reconstruction alphabet too large");
  const Sequence y(y_, alphabet_);
  counts_ = block_counts(y, k);
  context_totals_ = totals_of(counts_, alphabet_.size);
  energy_ = full_energy(x, y_, k, alpha, d);
}

double AnnealState::delta(std::size_t i, Symbol a) const {
  if (a == y_[i]) return 0.0;
  thread_local std::vector<Change> blocks, contexts;
  collect_changes(y_, i, a, k_, alphabet_.size, blocks, contexts);
  return entropy_change(counts_, context_totals_, blocks, contexts) +
         alpha_ * (d_(x_[i], a) - d_(x_[i], y_[i]));
}

void AnnealState::apply(std::size_t i, Symbol a) {
  if (a == y_[i]) return;
  std::vector<Change> blocks, contexts;
  collect_changes(y_, i, a, k_, alphabet_.size, blocks, contexts);
  energy_ += entropy_change(counts_, context_totals_, blocks, contexts) +
             alpha_ * (d_(x_[i], a) - d_(x_[i], y_[i]));
  for (const Change& c : blocks) counts_[c.code] += c.diff;
  for (const Change& c : contexts) context_totals_[c.code] += c.diff;
  y_[i] = a;
}

std::vector<double> gibbs_conditional(const AnnealState& state, std::size_t i, double beta) {
  const std::size_t a = state.alphabet().size;
  const double scale = beta / static_cast<double>(state.size());
  std::vector<double> p(a);
  double lowest = 0.0;
  for (std::size_t s = 0; s < a; ++s) {
    p[s] = state.delta(i, static_cast<Symbol>(s));
    lowest = std::min(lowest, p[s]);
  }
  double total = 0.0;
  for (double& v : p) total += v = std::exp(-scale * (v - lowest));
  for (double& v : p) v /= total;
  return p;
}

std::function<double(std::uint64_t)> log_schedule(std::size_t n) {
  const double nn = static_cast<double>(n);
  return [nn](std::uint64_t t) { return nn * std::log(static_cast<double>(std::max<std::uint64_t>(t, 2))); };
}

std::function<double(std::uint64_t)> constant_schedule(double beta) {
  return [beta](std::uint64_t) { return beta; };
}

AnnealTrace gibbs_anneal(const Sequence& x, const AnnealConfig& cfg, const DistortionMatrix& d) {
  if (cfg.iterations < 1) throw ConfigError("iterations must be >= 1");
  if (!cfg.beta) throw ConfigError("a cooling schedule is required");
  if (cfg.k < 0) throw ConfigError("k must be >= 0");
  if (!(cfg.alpha >= 0.0)) throw ConfigError("alpha must be >= 0");
  const auto start = std::chrono::steady_clock::now();

  AnnealState state(x, as_reconstruction(x, d), cfg.k, cfg.alpha, d);
  std::mt19937_64 rng(cfg.seed);
  std::uniform_int_distribution<std::size_t> position(0, x.size() - 1);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  AnnealTrace trace;
  trace.checkpoints.push_back({0, state.energy(), cfg.beta(1)});

  for (std::uint64_t t = 1; t <= cfg.iterations; ++t) {
    const double beta = cfg.beta(t);
    const std::size_t i = position(rng);
    const std::vector<double> p = gibbs_conditional(state, i, beta);
    double r = unit(rng);
    std::size_t pick = p.size() - 1;
    for (std::size_t s = 0; s < p.size(); ++s) {
      r -= p[s];
      if (r < 0.0) {
        pick = s;
        break;
      }
    }
    ++trace.proposals;
    if (pick != state.symbols()[i]) {
      ++trace.changes;
      state.apply(i, static_cast<Symbol>(pick));
    }
    const bool checkpoint = t == cfg.iterations ||
                            (cfg.checkpoint_every > 0 && t % cfg.checkpoint_every == 0);
    if (checkpoint) trace.checkpoints.push_back({t, state.energy(), beta});
  }

  trace.reconstruction = state.reconstruction();
  trace.final_energy = state.energy();
  trace.true_cost = true_cost(x, trace.reconstruction, cfg.alpha, cfg.k, d);
  trace.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return trace;
}

void write_trace_csv(std::ostream& os, const AnnealTrace& trace) {
  const auto old = os.precision(12);
  os << "t,energy,temperature_beta\n";
  for (const auto& c : trace.checkpoints) os << c.t << ',' << c.energy << ',' << c.beta << '\n';
  os.precision(old);
}

}  // namespace fixslope
