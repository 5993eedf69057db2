#ifndef FIXSLOPE_TRELLIS_ENCODER_HPP_
#define FIXSLOPE_TRELLIS_ENCODER_HPP_

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <vector>

#include "fixslope/coefficients.hpp"
#include "fixslope/count_model.hpp"

namespace fixslope {

struct EncodeResult {
  Sequence reconstruction;
  // Value of the objective the encoder minimized, per symbol.
  double objective = 0.0;
  // Cyclic linearized cost sum lambda m(y) + alpha d_n at the reconstruction.
  // Left zero by encoders that run without coefficients.
  LinearizedCost linearized;
  // H_k(y) + alpha d_n(x, y).
  LinearizedCost true_cost;
  // Trellis state codes for positions k..n-1 (0-based); viterbi_encode only.
  std::vector<std::uint32_t> states;
  std::uint64_t stages = 0;
  std::uint64_t edge_relaxations = 0;
  // True cost of each round; encode_iterative only.
  std::vector<double> round_true_costs;
};

// The path weight the trellis minimizes, per symbol:
//   (1/n) [ sum_{i=k+1}^{n} lambda_{y_i, y_{i-k}^{i-1}} + alpha sum_{i=1}^{n} d(x_i, y_i) ].
// The first k symbols carry no lambda term (no wrap-around contexts), and
// their distortion is charged together with the first state.
double trellis_objective(const Sequence& x, const Sequence& y, const CoefficientMatrix& lambda,
                         double alpha, const DistortionMatrix& d);

// Exact minimizer of trellis_objective by dynamic programming over the
// |A|^{k+1} states y_{i-k}^i. Ties go to the smallest predecessor state and the
// smallest terminal state. Throws InputTooShort when n < k+1.
EncodeResult viterbi_encode(const Sequence& x, const CoefficientMatrix& lambda, double alpha,
                            const DistortionMatrix& d);

enum class Objective {
  exact,       // H_k(y) + alpha d_n(x, y)
  linearized,  // sum lambda m(y) + alpha d_n(x, y), cyclic
  trellis,     // trellis_objective
};

struct ExhaustiveProblem {
  Objective objective = Objective::exact;
  int k = 0;
  double alpha = 1.0;
  const CoefficientMatrix* lambda = nullptr;  // required unless objective == exact
  std::uint64_t budget = std::uint64_t{1} << 24;
};

// Brute-force minimizer over all |Y|^n reconstructions. Throws BudgetExceeded
// when |Y|^n > budget.
EncodeResult exhaustive_encode(const Sequence& x, const DistortionMatrix& d,
                               const ExhaustiveProblem& problem);

// Order in which viterbi_encode breaks ties: compare y_{n-k}..y_n (1-based)
// first, then y_{n-k-1}, y_{n-k-2}, ..., y_1.
bool tie_break_less(std::span<const Symbol> a, std::span<const Symbol> b, int k);

// lambda at m(x), encode, re-expand lambda at m(y), and repeat while the true
// cost decreases. Returns the best round.
EncodeResult encode_iterative(const Sequence& x, double alpha, int k, const DistortionMatrix& d,
                              int max_rounds,
                              std::optional<double> lambda_max = std::nullopt);

// Views x over the reconstruction alphabet of d (requires |X| <= |Y|).
Sequence as_reconstruction(const Sequence& x, const DistortionMatrix& d);

void write_encode_csv_header(std::ostream& os);
void write_encode_csv_row(std::ostream& os, const EncodeResult& r, int k, double seconds);

}  // namespace fixslope

#endif  // FIXSLOPE_TRELLIS_ENCODER_HPP_
