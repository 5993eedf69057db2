#ifndef FIXSLOPE_SIMPLEX_HPP_
#define FIXSLOPE_SIMPLEX_HPP_

#include <cstddef>
#include <span>
#include <vector>

namespace fixslope {

// min c^T x  s.t.  A x = b,  x >= 0, with A stored dense and row-major.
class LinearProgram {
 public:
  explicit LinearProgram(std::size_t num_vars);

  std::size_t num_vars() const { return num_vars_; }
  std::size_t num_constraints() const { return rhs_.size(); }

  void set_objective(std::span<const double> c);
  void set_cost(std::size_t var, double c) { cost_[var] = c; }
  void add_equality(std::span<const double> row, double rhs);

  std::span<const double> cost() const { return cost_; }
  std::span<const double> row(std::size_t i) const {
    return std::span<const double>(a_).subspan(i * num_vars_, num_vars_);
  }
  double rhs(std::size_t i) const { return rhs_[i]; }

 private:
  std::size_t num_vars_;
  std::vector<double> cost_;
  std::vector<double> a_;
  std::vector<double> rhs_;
};

enum class LpStatus { optimal, infeasible, unbounded, iteration_limit };

struct LpSolution {
  LpStatus status = LpStatus::infeasible;
  std::vector<double> x;
  double objective = 0.0;
  std::size_t pivots = 0;
};

struct SimplexOptions {
  double pivot_tolerance = 1e-11;
  double cost_tolerance = 1e-10;
  double feasibility_tolerance = 1e-9;
  std::size_t max_pivots = 200000;
  // Consecutive degenerate pivots after which entering-variable choice
  // switches from Dantzig's rule to Bland's rule.
  std::size_t bland_after = 50;
};

// Two-phase dense tableau simplex. Redundant equality rows are detected and
// dropped after phase one.
LpSolution solve_lp(const LinearProgram& lp, const SimplexOptions& options = {});

}  // namespace fixslope

#endif  // FIXSLOPE_SIMPLEX_HPP_
