#include "fixslope/count_model.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>
#include <stdexcept>
#include <string>

#include "fixslope/errors.hpp"

namespace fixslope {

Alphabet::Alphabet(int s) : size(s) {
  if (s < 1 || s > kMaxAlphabet) {
    throw ConfigError("alphabet size must be in [1, 256], got " + std::to_string(s));
  }
}

std::size_t checked_pow(std::size_t base, int exponent, std::size_t cap) {
  if (exponent < 0) throw ConfigError("negative exponent");
  std::size_t result = 1;
  for (int e = 0; e < exponent; ++e) {
    if (base != 0 && result > cap / base) {
      throw BudgetExceeded(std::to_string(base) + "^" + std::to_string(exponent) +
                           " exceeds the size cap " + std::to_string(cap));
    }
    result *= base;
  }
  if (result > cap) throw BudgetExceeded("size above cap " + std::to_string(cap));
  return result;
}

Sequence::Sequence(std::vector<Symbol> symbols, Alphabet alphabet)
    : symbols_(std::move(symbols)), alphabet_(alphabet) {
  if (symbols_.empty()) throw ConfigError("sequence must be non-empty");
  for (std::size_t i = 0; i < symbols_.size(); ++i) {
    if (!alphabet_.contains(symbols_[i])) {
      throw ConfigError("symbol " + std::to_string(symbols_[i]) + " at position " +
                        std::to_string(i) + " outside alphabet of size " +
                        std::to_string(alphabet_.size));
    }
  }
}

CountMatrix::CountMatrix(int order, Alphabet alphabet, std::vector<double> values,
                         bool normalized)
    : order_(order), alphabet_(alphabet), values_(std::move(values)),
      normalized_(normalized) {
  if (order < 0) throw ConfigError("order must be non-negative");
  if (values_.size() != checked_pow(alphabet.size, order + 1)) {
    throw ContractViolation("count matrix size does not match |A|^(k+1)");
  }
  for (double v : values_) {
    if (!(v >= 0.0)) throw ContractViolation("count matrix entries must be >= 0");
  }
}

CountMatrix CountMatrix::zeros(int order, Alphabet alphabet) {
  return CountMatrix(order, alphabet,
                     std::vector<double>(checked_pow(alphabet.size, order + 1), 0.0),
                     false);
}

double CountMatrix::total() const {
  return std::accumulate(values_.begin(), values_.end(), 0.0);
}

CountMatrix CountMatrix::normalized_copy() const {
  const double t = total();
  if (t <= 0.0) throw ContractViolation("cannot normalize an all-zero count matrix");
  std::vector<double> v(values_);
  for (double& e : v) e /= t;
  return CountMatrix(order_, alphabet_, std::move(v), true);
}

std::size_t cyclic_context(const Sequence& y, int k, std::size_t i) {
  const std::size_t a = y.alphabet().size;
  const std::size_t n = y.size();
  std::size_t context = 0;
  for (int j = k; j >= 1; --j) {
    const std::size_t back = static_cast<std::size_t>(j) % n;
    context = context * a + y[(i + n - back) % n];
  }
  return context;
}

std::vector<std::uint64_t> block_counts(const Sequence& y, int k) {
  if (k < 0) throw ConfigError("order must be non-negative");
  const std::size_t a = y.alphabet().size;
  const std::size_t n = y.size();
  const std::size_t num_contexts = checked_pow(a, k);
  std::vector<std::uint64_t> counts(num_contexts * a, 0);

  std::size_t context = cyclic_context(y, k, 0);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t state = context * a + y[i];
    ++counts[state];
    context = state % num_contexts;
  }
  return counts;
}

CountMatrix count_matrix(const Sequence& y, int k) {
  const auto counts = block_counts(y, k);
  const double n = static_cast<double>(y.size());
  std::vector<double> values(counts.size());
  for (std::size_t s = 0; s < counts.size(); ++s) values[s] = counts[s] / n;
  return CountMatrix(k, y.alphabet(), std::move(values), true);
}

double entropy_functional(std::span<const double> v) {
  double norm = 0.0;
  for (double e : v) {
    if (e < 0.0 || std::isnan(e)) throw std::domain_error("entropy_functional: negative component");
    norm += e;
  }
  if (norm == 0.0) return 0.0;
  double h = 0.0;
  for (double e : v) {
    if (e > 0.0) h += (e / norm) * std::log2(norm / e);
  }
  return h;
}

double entropy_of_columns(std::span<const double> values, int alphabet_size) {
  const std::size_t a = static_cast<std::size_t>(alphabet_size);
  double h = 0.0;
  for (std::size_t c = 0; c + a <= values.size(); c += a) {
    double col = 0.0;
    for (std::size_t b = 0; b < a; ++b) {
      if (values[c + b] < 0.0) throw std::domain_error("entropy_of_columns: negative entry");
      col += values[c + b];
    }
    if (col == 0.0) continue;
    for (std::size_t b = 0; b < a; ++b) {
      const double v = values[c + b];
      if (v > 0.0) h += v * std::log2(col / v);
    }
  }
  return h;
}

double conditional_entropy(const CountMatrix& m) {
  if (!m.normalized() || std::abs(m.total() - 1.0) > 1e-9) {
    throw ContractViolation("conditional_entropy requires a normalized count matrix");
  }
  return entropy_of_columns(m.values(), m.alphabet().size);
}

double conditional_entropy(const Sequence& y, int k) {
  const auto counts = block_counts(y, k);
  const std::size_t a = y.alphabet().size;
  const double n = static_cast<double>(y.size());
  double h = 0.0;
  for (std::size_t c = 0; c < counts.size(); c += a) {
    std::uint64_t col = 0;
    for (std::size_t b = 0; b < a; ++b) col += counts[c + b];
    if (col == 0) continue;
    for (std::size_t b = 0; b < a; ++b) {
      const std::uint64_t v = counts[c + b];
      if (v > 0) h += static_cast<double>(v) * std::log2(static_cast<double>(col) / v);
    }
  }
  return h / n;
}

double stationarity_defect(std::span<const double> values, int alphabet_size, int order) {
  if (order == 0) return 0.0;
  const std::size_t a = static_cast<std::size_t>(alphabet_size);
  const std::size_t num_contexts = values.size() / a;
  const std::size_t high = num_contexts / a;  // |A|^{k-1}
  double defect = 0.0;
  for (std::size_t c = 0; c < num_contexts; ++c) {
    double incoming = 0.0;
    for (std::size_t b = 0; b < a; ++b) incoming += values[c * a + b];
    // Blocks [gamma, c_1..c_{k-1}] followed by the most recent symbol of c.
    double outgoing = 0.0;
    for (std::size_t g = 0; g < a; ++g) {
      const std::size_t prev = g * high + c / a;
      outgoing += values[prev * a + c % a];
    }
    defect = std::max(defect, std::abs(incoming - outgoing));
  }
  return defect;
}

double stationarity_defect(const CountMatrix& m) {
  return stationarity_defect(m.values(), m.alphabet().size, m.order());
}

bool check_stationarity(const CountMatrix& m, double tol) {
  return stationarity_defect(m) <= tol;
}

CountMatrix marginalize(const CountMatrix& m, int new_order) {
  if (new_order < 0 || new_order > m.order()) {
    throw ConfigError("marginalize: new order must be in [0, order]");
  }
  const std::size_t keep = checked_pow(m.alphabet().size, new_order + 1);
  std::vector<double> out(keep, 0.0);
  for (std::size_t s = 0; s < m.size(); ++s) out[s % keep] += m[s];
  return CountMatrix(new_order, m.alphabet(), std::move(out), m.normalized());
}

std::vector<double> empirical_source_dist(const Sequence& x, int k1) {
  if (k1 < 1) throw ConfigError("empirical_source_dist requires k1 >= 1");
  // The k1-block preceding position i is the context of the order-k1 count.
  const auto counts = block_counts(x, k1);
  const std::size_t a = x.alphabet().size;
  std::vector<double> p(counts.size() / a, 0.0);
  const double n = static_cast<double>(x.size());
  for (std::size_t s = 0; s < counts.size(); ++s) p[s / a] += counts[s] / n;
  return p;
}

void write_count_csv(std::ostream& os, const CountMatrix& m) {
  const int a = m.alphabet().size;
  os << "beta";
  for (std::size_t c = 0; c < m.contexts(); ++c) os << ",b" << c;
  os << '\n';
  const auto old = os.precision(17);
  for (int beta = 0; beta < a; ++beta) {
    os << beta;
    for (std::size_t c = 0; c < m.contexts(); ++c) os << ',' << m(beta, c);
    os << '\n';
  }
  os.precision(old);
}

}  // namespace fixslope
