#include "fixslope/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <exception>
#include <mutex>
#include <ostream>
#include <sstream>
#include <thread>

#include "fixslope/coeff_program.hpp"
#include "fixslope/errors.hpp"
#include "fixslope/mcmc_baseline.hpp"
#include "fixslope/sources_bench.hpp"

namespace fixslope {

CoefficientMode parse_mode(std::string_view name) {
  if (name == "shortcut") return CoefficientMode::shortcut;
  if (name == "iterative") return CoefficientMode::iterative;
  if (name == "program") return CoefficientMode::program;
  throw ConfigError("unknown coefficient mode '" + std::string(name) +
                    "' (expected shortcut, iterative or program)");
}

const char* mode_name(CoefficientMode mode) {
  switch (mode) {
    case CoefficientMode::shortcut: return "shortcut";
    case CoefficientMode::iterative: return "iterative";
    case CoefficientMode::program: return "program";
  }
  return "?";
}

namespace {

// Coefficients of order `from` read as order-`to` coefficients that ignore
// the oldest to - from context symbols.
CoefficientMatrix lift(const CoefficientMatrix& lambda, int to) {
  const std::size_t a = lambda.alphabet().size;
  const std::size_t size = checked_pow(a, to + 1);
  std::vector<double> v(size);
  for (std::size_t s = 0; s < size; ++s) v[s] = lambda[s % lambda.size()];
  return CoefficientMatrix(to, lambda.alphabet(), std::move(v), lambda.lambda_max());
}

double elapsed(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

}  // namespace

EncodeResult encode_with_mode(const Sequence& x, const EncodeSettings& s, const DistortionMatrix& d) {
  if (!(s.alpha >= 0.0)) throw ConfigError("alpha must be >= 0");
  if (s.k < 0) throw ConfigError("k must be >= 0");
  const double cap = s.lambda_max.value_or(default_lambda_max(x.size(), d.reconstruction()));
  switch (s.mode) {
    case CoefficientMode::shortcut: {
      const CountMatrix m = count_matrix(as_reconstruction(x, d), s.k);
      return viterbi_encode(x, gradient_coefficients(m, cap), s.alpha, d);
    }
    case CoefficientMode::iterative:
      return encode_iterative(x, s.alpha, s.k, d, s.max_rounds, cap);
    case CoefficientMode::program: {
      const int k1 = s.k1.value_or(s.k + 1);
      if (k1 < 1 || k1 > s.k + 1) throw ConfigError("k1 must lie in [1, k+1]");
      const ProgramInstance inst = build_instance(x, s.alpha, k1 - 1, d);
      ProgramOptions opt;
      opt.variable_budget = s.program_budget;
      opt.lambda_max = cap;
      ProgramSolution sol;
      try {
        sol = solve_program(inst, opt);
      } catch (const BudgetExceeded& e) {
        throw BudgetExceeded(std::string(e.what()) + " (pass a smaller --k1; the program has |X|^k1 |Y|^k1 variables)");
      }
      const CoefficientMatrix lambda = coefficients_from_program(sol, cap);
      return viterbi_encode(x, lift(lambda, s.k), s.alpha, d);
    }
  }
  throw ConfigError("unknown coefficient mode");
}

void run_cells(std::size_t count, unsigned workers, const std::function<void(std::size_t)>& fn) {
  workers = std::max(1u, std::min<unsigned>(workers, static_cast<unsigned>(std::max<std::size_t>(count, 1))));
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto work = [&] {
    while (true) {
      const std::size_t i = next.fetch_add(1);
      if (i >= count) return;
      try {
        fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next = count;
      }
    }
  };
  if (workers == 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work);
    for (auto& t : pool) t.join();
  }
  if (failure) std::rethrow_exception(failure);
}

std::vector<double> default_alpha_grid() { return {0.5, 1.0, 2.0, 4.0, 8.0}; }

namespace {

std::string join_alphas(const std::vector<double>& alphas) {
  std::ostringstream os;
  for (std::size_t i = 0; i < alphas.size(); ++i) os << (i ? ";" : "") << alphas[i];
  return os.str();
}

void check_common(std::size_t n, int k, double q, const std::vector<double>& alphas, int reps) {
  if (n < static_cast<std::size_t>(k) + 1) throw InputTooShort("n must be >= k+1");
  if (k < 0) throw ConfigError("k must be >= 0");
  if (!(q > 0.0 && q <= 0.5)) throw ConfigError("q must lie in (0, 1/2]");
  if (alphas.empty()) throw ConfigError("alpha grid is empty");
  for (double a : alphas) {
    if (!(a > 0.0)) throw ConfigError("alphas must be > 0");
  }
  if (reps < 1) throw ConfigError("reps must be >= 1");
}

}  // namespace

std::string describe(const Fig1Config& c) {
  std::ostringstream os;
  os << "# fig1 v1 n=" << c.n << " k=" << c.k << " q=" << c.q << " reps=" << c.reps
     << " seed=" << c.seed << " mode=" << mode_name(c.mode);
  if (c.k1) os << " k1=" << *c.k1;
  os << " alphas=" << join_alphas(c.alphas);
  return os.str();
}

std::string describe(const Fig3Config& c) {
  std::ostringstream os;
  os << "# fig3 v1 n=" << c.n << " k=" << c.k << " q=" << c.q << " reps=" << c.reps
     << " seed=" << c.seed << " mode=" << mode_name(c.mode);
  if (c.k1) os << " k1=" << *c.k1;
  os << " sweeps=" << c.sweeps << " schedule=n*ln(max(t,2)) alphas=" << join_alphas(c.alphas);
  return os.str();
}

Fig1Result run_fig1(const Fig1Config& cfg) {
  check_common(cfg.n, cfg.k, cfg.q, cfg.alphas, cfg.reps);
  const MarkovSource source = MarkovSource::binary_symmetric(cfg.q);
  const DistortionMatrix d = DistortionMatrix::hamming(Alphabet(2));
  const std::size_t reps = static_cast<std::size_t>(cfg.reps);

  // One realization per rep, shared by every alpha.
  std::vector<Sequence> sources(reps);
  std::vector<std::uint64_t> seeds(reps);
  for (std::size_t r = 0; r < reps; ++r) {
    seeds[r] = derive_seed(cfg.seed, r);
    sources[r] = generate(source, cfg.n, seeds[r]);
  }

  Fig1Result result;
  result.rows.resize(cfg.alphas.size() * reps);
  run_cells(result.rows.size(), cfg.workers, [&](std::size_t cell) {
    const std::size_t ai = cell / reps, r = cell % reps;
    EncodeSettings s;
    s.alpha = cfg.alphas[ai];
    s.k = cfg.k;
    s.mode = cfg.mode;
    s.k1 = cfg.k1;
    const auto start = std::chrono::steady_clock::now();
    const EncodeResult e = encode_with_mode(sources[r], s, d);
    Fig1Row& row = result.rows[cell];
    row.seconds = elapsed(start);
    row.alpha = s.alpha;
    row.rep = static_cast<int>(r);
    row.source_seed = seeds[r];
    row.distortion = e.true_cost.distortion_part;
    row.h_k = e.true_cost.entropy_part;
    row.reference_rate = binary_markov_rd(cfg.q, std::min(0.5, row.distortion));
    row.gap = row.h_k - row.reference_rate;
    row.true_cost = e.true_cost.total;
  });

  for (std::size_t ai = 0; ai < cfg.alphas.size(); ++ai) {
    double gap = 0.0, dist = 0.0, rate = 0.0;
    for (std::size_t r = 0; r < reps; ++r) {
      const Fig1Row& row = result.rows[ai * reps + r];
      gap += row.gap;
      dist += row.distortion;
      rate += row.h_k;
    }
    result.mean_gap.push_back(gap / reps);
    result.mean_distortion.push_back(dist / reps);
    result.mean_rate.push_back(rate / reps);
  }
  return result;
}

void write_fig1_csv(std::ostream& os, const Fig1Config& cfg, const Fig1Result& result) {
  const auto old = os.precision(12);
  os << describe(cfg) << '\n';
  os << "alpha,run,source_seed,distortion,H_k,R_slb,gap,true_cost\n";
  for (const auto& r : result.rows) {
    os << r.alpha << ',' << r.rep << ',' << r.source_seed << ',' << r.distortion << ',' << r.h_k
       << ',' << r.reference_rate << ',' << r.gap << ',' << r.true_cost << '\n';
  }
  os.precision(old);
}

void write_fig1_timing_csv(std::ostream& os, const Fig1Result& result) {
  os << "alpha,run,seconds\n";
  for (const auto& r : result.rows) os << r.alpha << ',' << r.rep << ',' << r.seconds << '\n';
}

Fig3Result run_fig3(const Fig3Config& cfg) {
  check_common(cfg.n, cfg.k, cfg.q, cfg.alphas, cfg.reps);
  if (cfg.sweeps < 1) throw ConfigError("sweeps must be >= 1");
  const MarkovSource source = MarkovSource::binary_symmetric(cfg.q);
  const DistortionMatrix d = DistortionMatrix::hamming(Alphabet(2));
  const std::size_t reps = static_cast<std::size_t>(cfg.reps);

  std::vector<Sequence> sources(reps);
  std::vector<std::uint64_t> seeds(reps);
  for (std::size_t r = 0; r < reps; ++r) {
    seeds[r] = derive_seed(cfg.seed, r);
    sources[r] = generate(source, cfg.n, seeds[r]);
  }

  Fig3Result result;
  result.rows.resize(cfg.alphas.size() * reps);
  run_cells(result.rows.size(), cfg.workers, [&](std::size_t cell) {
    const std::size_t ai = cell / reps, r = cell % reps;
    Fig3Row& row = result.rows[cell];
    row.alpha = cfg.alphas[ai];
    row.rep = static_cast<int>(r);
    row.source_seed = seeds[r];
    row.chain_seed = derive_seed(seeds[r], ai + 1);

    EncodeSettings s;
    s.alpha = row.alpha;
    s.k = cfg.k;
    s.mode = cfg.mode;
    s.k1 = cfg.k1;
    auto start = std::chrono::steady_clock::now();
    const EncodeResult e = encode_with_mode(sources[r], s, d);
    row.viterbi_seconds = elapsed(start);
    row.viterbi = e.true_cost;

    AnnealConfig ac;
    ac.iterations = cfg.sweeps * cfg.n;
    ac.beta = log_schedule(cfg.n);
    ac.seed = row.chain_seed;
    ac.k = cfg.k;
    ac.alpha = row.alpha;
    start = std::chrono::steady_clock::now();
    const AnnealTrace t = gibbs_anneal(sources[r], ac, d);
    row.mcmc_seconds = elapsed(start);
    row.mcmc = t.true_cost;
  });

  for (std::size_t ai = 0; ai < cfg.alphas.size(); ++ai) {
    Fig3Summary s;
    s.alpha = cfg.alphas[ai];
    for (std::size_t r = 0; r < reps; ++r) {
      const Fig3Row& row = result.rows[ai * reps + r];
      s.mean_viterbi_cost += row.viterbi.total / reps;
      s.mean_mcmc_cost += row.mcmc.total / reps;
      s.viterbi_seconds += row.viterbi_seconds;
      s.mcmc_seconds += row.mcmc_seconds;
    }
    s.speed_ratio = s.viterbi_seconds > 0.0 ? s.mcmc_seconds / s.viterbi_seconds : 0.0;
    result.summary.push_back(s);
  }
  return result;
}

void write_fig3_csv(std::ostream& os, const Fig3Config& cfg, const Fig3Result& result) {
  const auto old = os.precision(12);
  os << describe(cfg) << '\n';
  os << "alpha,run,source_seed,chain_seed,viterbi_distortion,viterbi_H_k,viterbi_cost,"
        "mcmc_distortion,mcmc_H_k,mcmc_cost\n";
  for (const auto& r : result.rows) {
    os << r.alpha << ',' << r.rep << ',' << r.source_seed << ',' << r.chain_seed << ','
       << r.viterbi.distortion_part << ',' << r.viterbi.entropy_part << ',' << r.viterbi.total << ','
       << r.mcmc.distortion_part << ',' << r.mcmc.entropy_part << ',' << r.mcmc.total << '\n';
  }
  os.precision(old);
}

void write_fig3_timing_csv(std::ostream& os, const Fig3Result& result) {
  const auto old = os.precision(6);
  os << "alpha,mean_viterbi_cost,mean_mcmc_cost,viterbi_seconds,mcmc_seconds,speed_ratio\n";
  for (const auto& s : result.summary) {
    os << s.alpha << ',' << s.mean_viterbi_cost << ',' << s.mean_mcmc_cost << ',' << s.viterbi_seconds
       << ',' << s.mcmc_seconds << ',' << s.speed_ratio << '\n';
  }
  os.precision(old);
}

}  // namespace fixslope
