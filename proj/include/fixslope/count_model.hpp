#ifndef FIXSLOPE_COUNT_MODEL_HPP_
#define FIXSLOPE_COUNT_MODEL_HPP_

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

namespace fixslope {

using Symbol = std::uint8_t;

// Finite alphabet {0, ..., size-1}.
struct Alphabet {
  int size = 2;

  Alphabet() = default;
  explicit Alphabet(int s);

  bool contains(int symbol) const { return symbol >= 0 && symbol < size; }
  friend bool operator==(Alphabet, Alphabet) = default;
};

// Largest alphabet representable by Symbol.
inline constexpr int kMaxAlphabet = 256;

// base^exponent, throwing BudgetExceeded when the result exceeds `cap`.
std::size_t checked_pow(std::size_t base, int exponent,
                        std::size_t cap = std::size_t{1} << 30);

class Sequence {
 public:
  Sequence() = default;
  // Throws ConfigError if any symbol is outside the alphabet or the sequence is empty.
  Sequence(std::vector<Symbol> symbols, Alphabet alphabet);

  std::size_t size() const { return symbols_.size(); }
  Alphabet alphabet() const { return alphabet_; }
  Symbol operator[](std::size_t i) const { return symbols_[i]; }
  std::span<const Symbol> symbols() const { return symbols_; }

  friend bool operator==(const Sequence&, const Sequence&) = default;

 private:
  std::vector<Symbol> symbols_;
  Alphabet alphabet_;
};

// (k+1)-order co-occurrence statistic of a reconstruction sequence.
//
// Entry (beta, b) lives at flat index b * |A| + beta, where the context b of
// y_i is sum_j y_{i-j} |A|^{j-1} (most recent symbol least significant). The
// flat index is therefore the base-|A| code of the (k+1)-block ending at y_i,
// which is also the trellis state.
class CountMatrix {
 public:
  CountMatrix() = default;
  CountMatrix(int order, Alphabet alphabet, std::vector<double> values,
              bool normalized);

  static CountMatrix zeros(int order, Alphabet alphabet);

  int order() const { return order_; }
  Alphabet alphabet() const { return alphabet_; }
  std::size_t contexts() const { return values_.size() / alphabet_.size; }
  std::size_t size() const { return values_.size(); }
  // True when entries are frequencies summing to 1, false for raw counts.
  bool normalized() const { return normalized_; }

  double operator()(int beta, std::size_t context) const {
    return values_[context * alphabet_.size + beta];
  }
  double operator[](std::size_t flat) const { return values_[flat]; }
  std::span<const double> values() const { return values_; }
  std::span<const double> column(std::size_t context) const {
    return std::span<const double>(values_).subspan(context * alphabet_.size,
                                                    alphabet_.size);
  }
  double total() const;

  // Rescales entries to sum to one. Throws ContractViolation on an all-zero matrix.
  CountMatrix normalized_copy() const;

 private:
  int order_ = 0;
  Alphabet alphabet_;
  std::vector<double> values_;
  bool normalized_ = true;
};

// Code of the context (y_{i-k}, ..., y_{i-1}) of position i (0-based), cyclic.
std::size_t cyclic_context(const Sequence& y, int k, std::size_t i);

// Integer (k+1)-block counts with the cyclic convention y_i = y_{n+i} for i <= 0.
std::vector<std::uint64_t> block_counts(const Sequence& y, int k);

// Normalized count matrix m(y).
CountMatrix count_matrix(const Sequence& y, int k);

// Entropy in bits of the pmf proportional to v; 0 for the zero vector.
// Throws std::domain_error on a negative component.
double entropy_functional(std::span<const double> v);

// sum_b H(m_{.,b}) * 1^T m_{.,b} over the columns of a non-negative array laid
// out like CountMatrix. Positively homogeneous of degree one; no
// normalization check.
double entropy_of_columns(std::span<const double> values, int alphabet_size);

// H_k(m) in bits. Throws ContractViolation unless m is normalized.
double conditional_entropy(const CountMatrix& m);

// H_k(y) from integer counts; equals conditional_entropy(count_matrix(y, k))
// up to rounding.
double conditional_entropy(const Sequence& y, int k);

// max_b | sum_beta m_{beta,b} - sum_gamma m_{b_k, [gamma, b_1..b_{k-1}]} |.
double stationarity_defect(std::span<const double> values, int alphabet_size,
                           int order);
double stationarity_defect(const CountMatrix& m);
bool check_stationarity(const CountMatrix& m, double tol);

// Marginal of m on its most recent (new_order + 1) symbols.
CountMatrix marginalize(const CountMatrix& m, int new_order);

// p(a^{k1}) = |{i : (x_{i-k1}, ..., x_{i-1}) = a^{k1}}| / n, cyclic; blocks
// encoded like contexts.
std::vector<double> empirical_source_dist(const Sequence& x, int k1);

// Rows = beta, columns = context integer.
void write_count_csv(std::ostream& os, const CountMatrix& m);

}  // namespace fixslope

#endif  // FIXSLOPE_COUNT_MODEL_HPP_
