#ifndef FIXSLOPE_COEFF_PROGRAM_HPP_
#define FIXSLOPE_COEFF_PROGRAM_HPP_

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "fixslope/coefficients.hpp"
#include "fixslope/count_model.hpp"

namespace fixslope {

// Coefficient-selection program over k1-blocks:
//
//   min  H(m) + alpha * sum p(xb) q(yb|xb) d_k1(xb, yb)
//   s.t. m(yb) = sum_xb p(xb) q(yb|xb),   q(.|xb) in the simplex,
//        the induced y-block law m has equal first-k and last-k marginals
//        (k = k1 - 1), or optionally the joint (x, y) law p q does.
//
// Blocks are coded like contexts (most recent symbol least significant), so a
// y-block code is directly a CountMatrix flat index of order k1 - 1.
enum class StationarityConstraint {
  reconstruction,  // on m: sum over x-blocks, one equality per y-context
  joint,           // on p q: one equality per pair (x-context, y-context)
};

struct ProgramInstance {
  int k1 = 2;
  Alphabet source;
  Alphabet reconstruction;
  std::vector<double> source_dist;  // over X^{k1}
  double alpha = 1.0;
  DistortionMatrix d = DistortionMatrix::hamming(Alphabet(2));
  std::size_t sample_length = 0;  // n of the sample p came from; 0 if exact
  StationarityConstraint constraint = StationarityConstraint::reconstruction;

  std::size_t x_blocks() const { return source_dist.size(); }
  std::size_t y_blocks() const;
  // Mean of per-coordinate distortion over the k1 aligned symbols.
  double block_distortion(std::size_t xb, std::size_t yb) const;
};

// Validates sums and stationarity of p (tolerance 1e-12 after renormalizing).
ProgramInstance make_instance(std::vector<double> source_dist, int k1, double alpha,
                              const DistortionMatrix& d, std::size_t sample_length = 0);

// p = empirical_source_dist(x, k + 1), k1 = k + 1.
ProgramInstance build_instance(const Sequence& x, double alpha, int k, const DistortionMatrix& d);

// q(yb | xb), one row per x-block.
class ConditionalKernel {
 public:
  ConditionalKernel(std::size_t rows, std::size_t cols);

  static ConditionalKernel identity_like(const ProgramInstance& inst);
  static ConditionalKernel constant_row(const ProgramInstance& inst, std::span<const double> r);
  static ConditionalKernel uniform(const ProgramInstance& inst);
  static ConditionalKernel random(const ProgramInstance& inst, std::mt19937_64& rng);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  double operator()(std::size_t xb, std::size_t yb) const { return values_[xb * cols_ + yb]; }
  double& operator()(std::size_t xb, std::size_t yb) { return values_[xb * cols_ + yb]; }
  std::span<const double> values() const { return values_; }
  // max_xb |sum_yb q(yb|xb) - 1|
  double row_sum_residual() const;

 private:
  std::size_t rows_, cols_;
  std::vector<double> values_;
};

CountMatrix induced_count(const ProgramInstance& inst, const ConditionalKernel& q);

// Largest |last-k marginal - first-k marginal| over the balance rows of
// inst.constraint. Zero means q satisfies the stationarity constraints.
double stationarity_residual(const ProgramInstance& inst, const ConditionalKernel& q);

struct ProgramValue {
  double objective = 0.0;
  double entropy_part = 0.0;
  double distortion_part = 0.0;
};
ProgramValue evaluate_program(const ProgramInstance& inst, const ConditionalKernel& q);

struct ProgramOptions {
  int max_outer = 100;
  double tolerance = 1e-9;
  // |X|^{k1} |Y|^{k1} above this is refused (dense tableau).
  std::size_t variable_budget = std::size_t{1} << 14;
  std::uint64_t seed = 1;
  std::optional<double> lambda_max;
};

struct ProgramSolution {
  CountMatrix m;
  ConditionalKernel q{1, 1};
  ProgramValue value;
  std::vector<double> trace;  // objective per accepted outer iteration
  bool converged = false;
  std::string start;          // which initial kernel produced the best run
  double stationarity_residual = 0.0;
  double row_sum_residual = 0.0;
  std::size_t lp_pivots = 0;
};

// Iterated linearization: replace H by its tangent at the current m, solve the
// resulting LP in q, repeat until the decrease drops below tolerance. Runs
// from four initial kernels and keeps the best. Throws BudgetExceeded.
ProgramSolution solve_program(const ProgramInstance& inst, const ProgramOptions& options = {});

// Gradient coefficients at the program's m. ContractViolation if the solution
// is infeasible beyond 1e-6.
CoefficientMatrix coefficients_from_program(const ProgramSolution& sol, double lambda_max);

// JSON record with m, trace, residuals and the kernel.
void write_program_solution(std::ostream& os, const ProgramInstance& inst,
                            const ProgramSolution& sol);

}  // namespace fixslope

#endif  // FIXSLOPE_COEFF_PROGRAM_HPP_
