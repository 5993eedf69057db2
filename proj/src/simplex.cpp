#include "fixslope/simplex.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "fixslope/errors.hpp"

namespace fixslope {

LinearProgram::LinearProgram(std::size_t num_vars) : num_vars_(num_vars), cost_(num_vars, 0.0) {}

void LinearProgram::set_objective(std::span<const double> c) {
  if (c.size() != num_vars_) throw ContractViolation("objective length differs from variable count");
  cost_.assign(c.begin(), c.end());
}

void LinearProgram::add_equality(std::span<const double> row, double rhs) {
  if (row.size() != num_vars_) throw ContractViolation("constraint length differs from variable count");
  a_.insert(a_.end(), row.begin(), row.end());
  rhs_.push_back(rhs);
}

namespace {

class Tableau {
 public:
  Tableau(const LinearProgram& lp, const SimplexOptions& opt)
      : opt_(opt), m_(lp.num_constraints()), n_(lp.num_vars()), width_(n_ + m_ + 1),
        t_((m_ + 1) * width_, 0.0), basis_(m_) {
    for (std::size_t i = 0; i < m_; ++i) {
      const double sign = lp.rhs(i) < 0.0 ? -1.0 : 1.0;
      const auto row = lp.row(i);
      for (std::size_t j = 0; j < n_; ++j) at(i, j) = sign * row[j];
      at(i, n_ + i) = 1.0;
      at(i, width_ - 1) = sign * lp.rhs(i);
      basis_[i] = n_ + i;
    }
  }

  LpSolution solve(const LinearProgram& lp) {
    LpSolution out;
    // Phase one: minimize the sum of artificials.
    for (std::size_t j = 0; j < width_; ++j) {
      double s = 0.0;
      if (j < n_ || j == width_ - 1) {
        for (std::size_t i = 0; i < m_; ++i) s += at(i, j);
      }
      at(m_, j) = -s;
    }
    LpStatus status = iterate(width_ - 1);
    if (status == LpStatus::iteration_limit) return finish(out, status, lp);
    if (-at(m_, width_ - 1) > opt_.feasibility_tolerance) return finish(out, LpStatus::infeasible, lp);

    drive_out_artificials();

    for (std::size_t j = 0; j < width_; ++j) at(m_, j) = j < n_ ? lp.cost()[j] : 0.0;
    for (std::size_t i = 0; i < m_; ++i) {
      const std::size_t b = basis_[i];
      if (b >= n_) continue;
      const double cb = at(m_, b);
      if (cb == 0.0) continue;
      for (std::size_t j = 0; j < width_; ++j) at(m_, j) -= cb * at(i, j);
    }
    status = iterate(n_);
    return finish(out, status, lp);
  }

 private:
  double& at(std::size_t i, std::size_t j) { return t_[i * width_ + j]; }

  void pivot(std::size_t r, std::size_t c) {
    const double inv = 1.0 / at(r, c);
    for (std::size_t j = 0; j < width_; ++j) at(r, j) *= inv;
    at(r, c) = 1.0;
    for (std::size_t i = 0; i <= m_; ++i) {
      if (i == r) continue;
      const double f = at(i, c);
      if (f == 0.0) continue;
      double* dst = &t_[i * width_];
      const double* src = &t_[r * width_];
      for (std::size_t j = 0; j < width_; ++j) dst[j] -= f * src[j];
      dst[c] = 0.0;
    }
    basis_[r] = c;
    ++pivots_;
  }

  // Columns [0, allowed) may enter the basis.
  LpStatus iterate(std::size_t allowed) {
    std::size_t degenerate = 0;
    const std::size_t rhs = width_ - 1;
    while (true) {
      if (pivots_ >= opt_.max_pivots) return LpStatus::iteration_limit;
      const bool bland = degenerate >= opt_.bland_after;
      std::size_t enter = allowed;
      double most_negative = -opt_.cost_tolerance;
      for (std::size_t j = 0; j < allowed; ++j) {
        const double rc = at(m_, j);
        if (rc < most_negative) {
          enter = j;
          if (bland) break;
          most_negative = rc;
        }
      }
      if (enter == allowed) return LpStatus::optimal;

      std::size_t leave = m_;
      double best_ratio = std::numeric_limits<double>::infinity();
      for (std::size_t i = 0; i < m_; ++i) {
        const double a = at(i, enter);
        if (a <= opt_.pivot_tolerance) continue;
        const double ratio = std::max(0.0, at(i, rhs)) / a;
        if (ratio < best_ratio - 1e-12 ||
            (ratio <= best_ratio + 1e-12 && leave < m_ && basis_[i] < basis_[leave])) {
          best_ratio = std::min(best_ratio, ratio);
          leave = i;
        }
      }
      if (leave == m_) return LpStatus::unbounded;
      degenerate = best_ratio <= 1e-14 ? degenerate + 1 : 0;
      pivot(leave, enter);
    }
  }

  void drive_out_artificials() {
    for (std::size_t i = 0; i < m_; ++i) {
      if (basis_[i] < n_) continue;
      std::size_t best = n_;
      double best_abs = opt_.pivot_tolerance;
      for (std::size_t j = 0; j < n_; ++j) {
        const double v = std::abs(at(i, j));
        if (v > best_abs) {
          best_abs = v;
          best = j;
        }
      }
      if (best < n_) {
        pivot(i, best);
      } else {
        // Redundant equality: the row is a combination of the others.
        for (std::size_t j = 0; j < width_; ++j) at(i, j) = 0.0;
        at(i, basis_[i]) = 1.0;
      }
    }
  }

  LpSolution& finish(LpSolution& out, LpStatus status, const LinearProgram& lp) {
    out.status = status;
    out.pivots = pivots_;
    out.x.assign(n_, 0.0);
    for (std::size_t i = 0; i < m_; ++i) {
      if (basis_[i] < n_) out.x[basis_[i]] = std::max(0.0, at(i, width_ - 1));
    }
    out.objective = 0.0;
    for (std::size_t j = 0; j < n_; ++j) out.objective += lp.cost()[j] * out.x[j];
    return out;
  }

  SimplexOptions opt_;
  std::size_t m_, n_, width_;
  std::vector<double> t_;
  std::vector<std::size_t> basis_;
  std::size_t pivots_ = 0;
};

}  // namespace

LpSolution solve_lp(const LinearProgram& lp, const SimplexOptions& options) {
  Tableau tableau(lp, options);
  return tableau.solve(lp);
}

}  // namespace fixslope
