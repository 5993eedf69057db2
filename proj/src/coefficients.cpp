#include "fixslope/coefficients.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

#include "fixslope/errors.hpp"

namespace fixslope {

DistortionMatrix::DistortionMatrix(Alphabet source, Alphabet reconstruction,
                                   std::vector<double> values)
    : source_(source), reconstruction_(reconstruction), values_(std::move(values)) {
  if (values_.size() != static_cast<std::size_t>(source.size * reconstruction.size)) {
    throw ConfigError("distortion matrix must be |X| x |Y|");
  }
  for (double v : values_) {
    if (!(v >= 0.0) || !std::isfinite(v)) throw ConfigError("distortion entries must be finite and >= 0");
  }
}

DistortionMatrix DistortionMatrix::hamming(Alphabet source, Alphabet reconstruction) {
  std::vector<double> v(source.size * reconstruction.size);
  for (int x = 0; x < source.size; ++x) {
    for (int y = 0; y < reconstruction.size; ++y) v[x * reconstruction.size + y] = x == y ? 0.0 : 1.0;
  }
  return DistortionMatrix(source, reconstruction, std::move(v));
}

double DistortionMatrix::max_value() const {
  return *std::max_element(values_.begin(), values_.end());
}

double DistortionMatrix::min_positive() const {
  double best = 0.0;
  for (double v : values_) {
    if (v > 0.0 && (best == 0.0 || v < best)) best = v;
  }
  return best;
}

CoefficientMatrix::CoefficientMatrix(int order, Alphabet alphabet, std::vector<double> values,
                                     double lambda_max)
    : order_(order), alphabet_(alphabet), values_(std::move(values)), lambda_max_(lambda_max) {
  if (values_.size() != checked_pow(alphabet.size, order + 1)) {
    throw ContractViolation("coefficient matrix size does not match |A|^(k+1)");
  }
  for (double v : values_) {
    if (!std::isfinite(v)) throw ContractViolation("coefficients must be finite");
  }
}

double default_lambda_max(std::size_t n, Alphabet alphabet) {
  return std::log2(static_cast<double>(n)) + std::log2(static_cast<double>(alphabet.size));
}

CoefficientMatrix gradient_coefficients(const CountMatrix& m, double lambda_max) {
  if (!(lambda_max > 0.0) || !std::isfinite(lambda_max)) {
    throw ConfigError("lambda_max must be finite and > 0");
  }
  const std::size_t a = m.alphabet().size;
  std::vector<double> lambda(m.size(), lambda_max);
  for (std::size_t c = 0; c < m.contexts(); ++c) {
    double col = 0.0;
    for (std::size_t b = 0; b < a; ++b) col += m[c * a + b];
    if (col <= 0.0) continue;
    for (std::size_t b = 0; b < a; ++b) {
      const double v = m[c * a + b];
      if (v > 0.0) lambda[c * a + b] = std::min(lambda_max, std::log2(col / v));
    }
  }
  return CoefficientMatrix(m.order(), m.alphabet(), std::move(lambda), lambda_max);
}

double average_distortion(const Sequence& x, const Sequence& y, const DistortionMatrix& d) {
  if (x.size() != y.size()) throw ContractViolation("source and reconstruction lengths differ");
  if (x.alphabet().size > d.source().size || y.alphabet().size > d.reconstruction().size) {
    throw ContractViolation("distortion matrix does not cover the alphabets");
  }
  double sum = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) sum += d(x[i], y[i]);
  return sum / static_cast<double>(x.size());
}

LinearizedCost linearized_cost(const Sequence& x, const Sequence& y,
                               const CoefficientMatrix& lambda, double alpha,
                               const DistortionMatrix& d) {
  if (y.alphabet() != lambda.alphabet()) {
    throw ContractViolation("reconstruction alphabet does not match the coefficients");
  }
  const double distortion = average_distortion(x, y, d);

  const CountMatrix m = count_matrix(y, lambda.order());
  double matrix_form = 0.0;
  for (std::size_t s = 0; s < m.size(); ++s) matrix_form += lambda[s] * m[s];

  // (1/n) sum_i lambda_{y_i, y_{i-k}^{i-1}}, cyclic contexts.
  double per_symbol = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    per_symbol += lambda(y[i], cyclic_context(y, lambda.order(), i));
  }
  per_symbol /= static_cast<double>(y.size());
  if (std::abs(per_symbol - matrix_form) > 1e-9 * std::max(1.0, std::abs(matrix_form))) {
    throw ContractViolation("matrix and per-symbol linearized costs disagree");
  }

  return LinearizedCost{matrix_form + alpha * distortion, matrix_form, distortion, alpha};
}

LinearizedCost true_cost(const Sequence& x, const Sequence& y, double alpha, int k,
                         const DistortionMatrix& d) {
  const double distortion = average_distortion(x, y, d);
  const double h = conditional_entropy(y, k);
  return LinearizedCost{h + alpha * distortion, h, distortion, alpha};
}

void write_coefficients_csv(std::ostream& os, const CoefficientMatrix& lambda) {
  const int a = lambda.alphabet().size;
  const std::size_t contexts = lambda.size() / a;
  const auto old = os.precision(17);
  os << "beta";
  for (std::size_t c = 0; c < contexts; ++c) os << ",b" << c;
  os << '\n';
  for (int beta = 0; beta < a; ++beta) {
    os << beta;
    for (std::size_t c = 0; c < contexts; ++c) os << ',' << lambda(beta, c);
    os << '\n';
  }
  os << "# lambda_max=" << lambda.lambda_max() << '\n';
  os.precision(old);
}

CoefficientMatrix read_coefficients_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line) || line.rfind("beta", 0) != 0) {
    throw IoError("coefficient CSV: missing header");
  }
  const std::size_t contexts = static_cast<std::size_t>(std::count(line.begin(), line.end(), ','));
  std::vector<std::vector<double>> rows;
  double lambda_max = 0.0;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    if (line.rfind("# lambda_max=", 0) == 0) {
      lambda_max = std::stod(line.substr(13));
      continue;
    }
    std::stringstream ss(line);
    std::string cell;
    std::getline(ss, cell, ',');
    std::vector<double> row;
    while (std::getline(ss, cell, ',')) row.push_back(std::stod(cell));
    if (row.size() != contexts) throw IoError("coefficient CSV: ragged row");
    rows.push_back(std::move(row));
  }
  const int a = static_cast<int>(rows.size());
  if (a < 1 || contexts < 1) throw IoError("coefficient CSV: empty");
  if (a == 1 && contexts != 1) throw IoError("coefficient CSV: unary alphabet with contexts");
  int order = 0;
  for (std::size_t c = contexts; c > 1; c /= a) {
    if (c % a != 0) throw IoError("coefficient CSV: context count is not a power of |A|");
    ++order;
  }
  std::vector<double> values(contexts * a);
  for (int beta = 0; beta < a; ++beta) {
    for (std::size_t c = 0; c < contexts; ++c) values[c * a + beta] = rows[beta][c];
  }
  if (lambda_max <= 0.0) lambda_max = *std::max_element(values.begin(), values.end());
  return CoefficientMatrix(order, Alphabet(a), std::move(values), lambda_max);
}

}  // namespace fixslope
