#include "fixslope/coeff_program.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <ostream>
#include <string>

#include <json.hpp>

#include "fixslope/errors.hpp"
#include "fixslope/simplex.hpp"

namespace fixslope {

std::size_t ProgramInstance::y_blocks() const {
  return checked_pow(reconstruction.size, k1);
}

double ProgramInstance::block_distortion(std::size_t xb, std::size_t yb) const {
  double sum = 0.0;
  for (int j = 0; j < k1; ++j) {
    sum += d(static_cast<int>(xb % source.size), static_cast<int>(yb % reconstruction.size));
    xb /= source.size;
    yb /= reconstruction.size;
  }
  return sum / k1;
}

ProgramInstance make_instance(std::vector<double> source_dist, int k1, double alpha,
                              const DistortionMatrix& d, std::size_t sample_length) {
  if (k1 < 1) throw ConfigError("k1 must be >= 1");
  if (!(alpha >= 0.0)) throw ConfigError("alpha must be >= 0");
  ProgramInstance inst;
  inst.k1 = k1;
  inst.source = d.source();
  inst.reconstruction = d.reconstruction();
  inst.alpha = alpha;
  inst.d = d;
  inst.sample_length = sample_length;
  if (source_dist.size() != checked_pow(inst.source.size, k1)) {
    throw ContractViolation("source distribution size must be |X|^k1");
  }
  double total = 0.0;
  for (double p : source_dist) {
    if (!(p >= 0.0)) throw ContractViolation("source distribution entries must be >= 0");
    total += p;
  }
  if (std::abs(total - 1.0) > 1e-9) throw ContractViolation("source distribution must sum to 1");
  for (double& p : source_dist) p /= total;
  if (stationarity_defect(source_dist, inst.source.size, k1 - 1) > 1e-12) {
    throw ContractViolation("source distribution is not stationary");
  }
  inst.source_dist = std::move(source_dist);
  return inst;
}

ProgramInstance build_instance(const Sequence& x, double alpha, int k, const DistortionMatrix& d) {
  const int k1 = k + 1;
  if (x.size() < static_cast<std::size_t>(k1)) throw InputTooShort("build_instance needs n >= k+1");
  if (x.alphabet().size > d.source().size) throw ContractViolation("source alphabet exceeds d");
  const Sequence xs = x.alphabet() == d.source()
                          ? x
                          : Sequence(std::vector<Symbol>(x.symbols().begin(), x.symbols().end()),
                                     d.source());
  return make_instance(empirical_source_dist(xs, k1), k1, alpha, d, x.size());
}

ConditionalKernel::ConditionalKernel(std::size_t rows, std::size_t cols)
    : rows_(rows), cols_(cols), values_(rows * cols, 0.0) {}

ConditionalKernel ConditionalKernel::identity_like(const ProgramInstance& inst) {
  ConditionalKernel q(inst.x_blocks(), inst.y_blocks());
  const std::size_t as = inst.source.size, ar = inst.reconstruction.size;
  for (std::size_t xb = 0; xb < q.rows(); ++xb) {
    std::size_t yb = 0, scale = 1, code = xb;
    for (int j = 0; j < inst.k1; ++j) {
      yb += std::min(code % as, ar - 1) * scale;
      scale *= ar;
      code /= as;
    }
    q(xb, yb) = 1.0;
  }
  return q;
}

ConditionalKernel ConditionalKernel::constant_row(const ProgramInstance& inst,
                                                  std::span<const double> r) {
  ConditionalKernel q(inst.x_blocks(), inst.y_blocks());
  if (r.size() != q.cols()) throw ContractViolation("constant row has the wrong length");
  for (std::size_t xb = 0; xb < q.rows(); ++xb) {
    for (std::size_t yb = 0; yb < q.cols(); ++yb) q(xb, yb) = r[yb];
  }
  return q;
}

ConditionalKernel ConditionalKernel::uniform(const ProgramInstance& inst) {
  const std::vector<double> r(inst.y_blocks(), 1.0 / static_cast<double>(inst.y_blocks()));
  return constant_row(inst, r);
}

ConditionalKernel ConditionalKernel::random(const ProgramInstance& inst, std::mt19937_64& rng) {
  ConditionalKernel q(inst.x_blocks(), inst.y_blocks());
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (std::size_t xb = 0; xb < q.rows(); ++xb) {
    double total = 0.0;
    for (std::size_t yb = 0; yb < q.cols(); ++yb) total += q(xb, yb) = u(rng) + 1e-3;
    for (std::size_t yb = 0; yb < q.cols(); ++yb) q(xb, yb) /= total;
  }
  return q;
}

double ConditionalKernel::row_sum_residual() const {
  double worst = 0.0;
  for (std::size_t xb = 0; xb < rows_; ++xb) {
    double s = 0.0;
    for (std::size_t yb = 0; yb < cols_; ++yb) s += values_[xb * cols_ + yb];
    worst = std::max(worst, std::abs(s - 1.0));
  }
  return worst;
}

CountMatrix induced_count(const ProgramInstance& inst, const ConditionalKernel& q) {
  std::vector<double> m(inst.y_blocks(), 0.0);
  for (std::size_t xb = 0; xb < inst.x_blocks(); ++xb) {
    const double p = inst.source_dist[xb];
    if (p == 0.0) continue;
    for (std::size_t yb = 0; yb < m.size(); ++yb) m[yb] += p * q(xb, yb);
  }
  for (double& v : m) v = std::max(v, 0.0);
  return CountMatrix(inst.k1 - 1, inst.reconstruction, std::move(m), true);
}

namespace {

// Maps a (x-block, y-block) pair to the balance row its mass enters (last k
// symbols) and leaves (first k symbols).
struct BalanceIndex {
  bool joint;
  std::size_t as, ar;
  std::size_t x_low, y_low;  // |X|^k, |Y|^k

  std::size_t rows() const { return joint ? x_low * y_low : y_low; }
  std::size_t last(std::size_t xb, std::size_t yb) const {
    return joint ? (xb % x_low) * y_low + yb % y_low : yb % y_low;
  }
  std::size_t first(std::size_t xb, std::size_t yb) const {
    return joint ? (xb / as) * y_low + yb / ar : yb / ar;
  }
};

BalanceIndex balance_index(const ProgramInstance& inst) {
  return BalanceIndex{inst.constraint == StationarityConstraint::joint,
                      static_cast<std::size_t>(inst.source.size),
                      static_cast<std::size_t>(inst.reconstruction.size),
                      checked_pow(inst.source.size, inst.k1 - 1),
                      checked_pow(inst.reconstruction.size, inst.k1 - 1)};
}

}  // namespace

double stationarity_residual(const ProgramInstance& inst, const ConditionalKernel& q) {
  if (inst.k1 == 1) return 0.0;
  const BalanceIndex bi = balance_index(inst);
  std::vector<double> balance(bi.rows(), 0.0);
  for (std::size_t xb = 0; xb < inst.x_blocks(); ++xb) {
    const double p = inst.source_dist[xb];
    if (p == 0.0) continue;
    for (std::size_t yb = 0; yb < q.cols(); ++yb) {
      const double mass = p * q(xb, yb);
      balance[bi.last(xb, yb)] += mass;
      balance[bi.first(xb, yb)] -= mass;
    }
  }
  double worst = 0.0;
  for (double b : balance) worst = std::max(worst, std::abs(b));
  return worst;
}

ProgramValue evaluate_program(const ProgramInstance& inst, const ConditionalKernel& q) {
  ProgramValue v;
  v.entropy_part = entropy_of_columns(induced_count(inst, q).values(), inst.reconstruction.size);
  for (std::size_t xb = 0; xb < inst.x_blocks(); ++xb) {
    const double p = inst.source_dist[xb];
    if (p == 0.0) continue;
    for (std::size_t yb = 0; yb < q.cols(); ++yb) {
      if (q(xb, yb) != 0.0) v.distortion_part += p * q(xb, yb) * inst.block_distortion(xb, yb);
    }
  }
  v.objective = v.entropy_part + inst.alpha * v.distortion_part;
  return v;
}

namespace {

// The tangent LP at lambda: variables q(yb|xb) for x-blocks of positive mass.
class TangentLp {
 public:
  explicit TangentLp(const ProgramInstance& inst) : inst_(inst) {
    for (std::size_t xb = 0; xb < inst.x_blocks(); ++xb) {
      if (inst.source_dist[xb] > 0.0) active_.push_back(xb);
    }
    cols_ = inst.y_blocks();
    const std::size_t nv = active_.size() * cols_;
    base_ = std::make_unique<LinearProgram>(nv);

    std::vector<double> row(nv, 0.0);
    for (std::size_t r = 0; r < active_.size(); ++r) {
      std::fill(row.begin(), row.end(), 0.0);
      for (std::size_t yb = 0; yb < cols_; ++yb) row[r * cols_ + yb] = 1.0;
      base_->add_equality(row, 1.0);
    }
    if (inst.k1 > 1) {
      const BalanceIndex bi = balance_index(inst);
      const std::size_t pairs = bi.rows();
      std::vector<double> rows(pairs * nv, 0.0);
      for (std::size_t r = 0; r < active_.size(); ++r) {
        const std::size_t xb = active_[r];
        const double p = inst.source_dist[xb];
        for (std::size_t yb = 0; yb < cols_; ++yb) {
          rows[bi.last(xb, yb) * nv + r * cols_ + yb] += p;
          rows[bi.first(xb, yb) * nv + r * cols_ + yb] -= p;
        }
      }
      for (std::size_t pr = 0; pr < pairs; ++pr) {
        const std::span<const double> c(&rows[pr * nv], nv);
        if (std::any_of(c.begin(), c.end(), [](double v) { return v != 0.0; })) {
          base_->add_equality(c, 0.0);
        }
      }
    }
  }

  // Minimizes sum lambda m + alpha D; returns the kernel (inactive rows are
  // filled from `fallback`).
  ConditionalKernel solve(const CoefficientMatrix& lambda, const ConditionalKernel& fallback,
                          std::size_t& pivots) {
    LinearProgram lp = *base_;
    for (std::size_t r = 0; r < active_.size(); ++r) {
      const std::size_t xb = active_[r];
      const double p = inst_.source_dist[xb];
      for (std::size_t yb = 0; yb < cols_; ++yb) {
        lp.set_cost(r * cols_ + yb, p * (lambda[yb] + inst_.alpha * inst_.block_distortion(xb, yb)));
      }
    }
    const LpSolution sol = solve_lp(lp);
    pivots += sol.pivots;
    if (sol.status != LpStatus::optimal) {
      throw std::runtime_error("coefficient program: tangent LP did not reach optimality");
    }
    ConditionalKernel q = fallback;
    for (std::size_t r = 0; r < active_.size(); ++r) {
      double total = 0.0;
      for (std::size_t yb = 0; yb < cols_; ++yb) total += sol.x[r * cols_ + yb];
      for (std::size_t yb = 0; yb < cols_; ++yb) q(active_[r], yb) = sol.x[r * cols_ + yb] / total;
    }
    return q;
  }

 private:
  const ProgramInstance& inst_;
  std::vector<std::size_t> active_;
  std::size_t cols_ = 0;
  std::unique_ptr<LinearProgram> base_;
};

struct Run {
  ConditionalKernel q{1, 1};
  ProgramValue value;
  std::vector<double> trace;
  bool converged = false;
};

}  // namespace

ProgramSolution solve_program(const ProgramInstance& inst, const ProgramOptions& options) {
  const std::size_t variables = inst.x_blocks() * inst.y_blocks();
  if (variables > options.variable_budget) {
    throw BudgetExceeded("coefficient program has " + std::to_string(variables) +
                         " variables, above the budget of " +
                         std::to_string(options.variable_budget) + "; lower k1");
  }
  const double lambda_max = options.lambda_max.value_or(default_lambda_max(
      inst.sample_length > 0 ? inst.sample_length : std::size_t{1} << 20, inst.reconstruction));

  std::mt19937_64 rng(options.seed);
  std::vector<double> zero_block(inst.y_blocks(), 0.0);
  zero_block[0] = 1.0;
  const std::vector<std::pair<std::string, ConditionalKernel>> starts = {
      {"identity", ConditionalKernel::identity_like(inst)},
      {"uniform", ConditionalKernel::uniform(inst)},
      {"random", ConditionalKernel::random(inst, rng)},
      {"constant-zero", ConditionalKernel::constant_row(inst, zero_block)},
  };

  TangentLp tangent(inst);
  const ConditionalKernel fallback = ConditionalKernel::identity_like(inst);
  std::size_t pivots = 0;
  Run best;
  std::string best_start;
  bool have_best = false;

  for (const auto& [name, q0] : starts) {
    Run run;
    run.q = q0;
    // Infeasible starts only seed the first tangent.
    if (stationarity_residual(inst, q0) <= 1e-12) {
      run.value = evaluate_program(inst, q0);
      run.trace.push_back(run.value.objective);
    }
    CountMatrix m = induced_count(inst, q0);
    for (int t = 0; t < options.max_outer; ++t) {
      const CoefficientMatrix lambda = gradient_coefficients(m, lambda_max);
      ConditionalKernel q = tangent.solve(lambda, fallback, pivots);
      const ProgramValue v = evaluate_program(inst, q);
      if (!run.trace.empty() && v.objective > run.trace.back() + 1e-12) {
        // The clamped tangent is not a majorant here; keep the last iterate.
        run.converged = true;
        break;
      }
      const bool small_step = !run.trace.empty() && run.trace.back() - v.objective < options.tolerance;
      run.q = std::move(q);
      run.value = v;
      run.trace.push_back(v.objective);
      if (small_step) {
        run.converged = true;
        break;
      }
      m = induced_count(inst, run.q);
    }
    if (!have_best || run.value.objective < best.value.objective) {
      best = std::move(run);
      best_start = name;
      have_best = true;
    }
  }

  ProgramSolution sol;
  sol.q = best.q;
  sol.m = induced_count(inst, best.q);
  sol.value = best.value;
  sol.trace = std::move(best.trace);
  sol.converged = best.converged;
  sol.start = best_start;
  sol.stationarity_residual = stationarity_residual(inst, best.q);
  sol.row_sum_residual = best.q.row_sum_residual();
  sol.lp_pivots = pivots;
  return sol;
}

CoefficientMatrix coefficients_from_program(const ProgramSolution& sol, double lambda_max) {
  if (sol.stationarity_residual > 1e-6 || sol.row_sum_residual > 1e-6) {
    throw ContractViolation("program solution is not feasible");
  }
  return gradient_coefficients(sol.m, lambda_max);
}

void write_program_solution(std::ostream& os, const ProgramInstance& inst,
                            const ProgramSolution& sol) {
  nlohmann::json j;
  j["k1"] = inst.k1;
  j["constraint"] = inst.constraint == StationarityConstraint::joint ? "joint" : "reconstruction";
  j["alpha"] = inst.alpha;
  j["source_alphabet"] = inst.source.size;
  j["reconstruction_alphabet"] = inst.reconstruction.size;
  j["sample_length"] = inst.sample_length;
  j["source_dist"] = inst.source_dist;
  j["objective"] = sol.value.objective;
  j["entropy_part"] = sol.value.entropy_part;
  j["distortion_part"] = sol.value.distortion_part;
  j["trace"] = sol.trace;
  j["converged"] = sol.converged;
  j["start"] = sol.start;
  j["stationarity_residual"] = sol.stationarity_residual;
  j["row_sum_residual"] = sol.row_sum_residual;
  j["m"] = std::vector<double>(sol.m.values().begin(), sol.m.values().end());
  j["kernel"] = std::vector<double>(sol.q.values().begin(), sol.q.values().end());
  os << j.dump(2) << '\n';
}

}  // namespace fixslope
