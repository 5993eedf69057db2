#ifndef FIXSLOPE_COEFFICIENTS_HPP_
#define FIXSLOPE_COEFFICIENTS_HPP_

#include <cstddef>
#include <iosfwd>
#include <span>
#include <vector>

#include "fixslope/count_model.hpp"

namespace fixslope {

// Single-letter distortion d(x, y) >= 0 between a source and a
// reconstruction alphabet (the two may differ in size).
class DistortionMatrix {
 public:
  DistortionMatrix(Alphabet source, Alphabet reconstruction, std::vector<double> values);

  static DistortionMatrix hamming(Alphabet source, Alphabet reconstruction);
  static DistortionMatrix hamming(Alphabet alphabet) { return hamming(alphabet, alphabet); }

  Alphabet source() const { return source_; }
  Alphabet reconstruction() const { return reconstruction_; }
  double operator()(int x, int y) const { return values_[x * reconstruction_.size + y]; }
  double max_value() const;
  // Smallest strictly positive entry; 0 if none.
  double min_positive() const;

 private:
  Alphabet source_;
  Alphabet reconstruction_;
  std::vector<double> values_;
};

// lambda_{beta,b}, indexed exactly like CountMatrix.
class CoefficientMatrix {
 public:
  CoefficientMatrix() = default;
  CoefficientMatrix(int order, Alphabet alphabet, std::vector<double> values,
                    double lambda_max);

  int order() const { return order_; }
  Alphabet alphabet() const { return alphabet_; }
  double lambda_max() const { return lambda_max_; }
  std::size_t size() const { return values_.size(); }
  double operator()(int beta, std::size_t context) const {
    return values_[context * alphabet_.size + beta];
  }
  double operator[](std::size_t flat) const { return values_[flat]; }
  std::span<const double> values() const { return values_; }

 private:
  int order_ = 0;
  Alphabet alphabet_;
  std::vector<double> values_;
  double lambda_max_ = 0.0;
};

struct LinearizedCost {
  double total = 0.0;
  double entropy_part = 0.0;
  double distortion_part = 0.0;  // d_n(x, y), per symbol
  double alpha = 0.0;
};

// log2(n) + log2|A|: zero-count clamp used when none is given.
double default_lambda_max(std::size_t n, Alphabet alphabet);

// lambda_{beta,b} = dH/dm_{beta,b} = log2(sum_beta' m_{beta',b} / m_{beta,b}),
// clamped to lambda_max. Zero entries and never-visited contexts get lambda_max.
// Throws ConfigError when lambda_max <= 0.
CoefficientMatrix gradient_coefficients(const CountMatrix& m, double lambda_max);

// sum lambda * m(y) + alpha d_n(x, y). The matrix form and the per-symbol form
// are both evaluated; ContractViolation if they disagree beyond 1e-9.
LinearizedCost linearized_cost(const Sequence& x, const Sequence& y,
                               const CoefficientMatrix& lambda, double alpha,
                               const DistortionMatrix& d);

// H_k(y) + alpha d_n(x, y).
LinearizedCost true_cost(const Sequence& x, const Sequence& y, double alpha, int k,
                         const DistortionMatrix& d);

double average_distortion(const Sequence& x, const Sequence& y, const DistortionMatrix& d);

// CSV round trip: header "beta,b0,b1,..." then one row per beta, and a
// trailing "# lambda_max=<v>" line.
void write_coefficients_csv(std::ostream& os, const CoefficientMatrix& lambda);
CoefficientMatrix read_coefficients_csv(std::istream& is);

}  // namespace fixslope

#endif  // FIXSLOPE_COEFFICIENTS_HPP_
