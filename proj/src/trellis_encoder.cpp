#include "fixslope/trellis_encoder.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <string>

#include "fixslope/errors.hpp"

namespace fixslope {

namespace {

void check_alphabets(const Sequence& x, const CoefficientMatrix& lambda, const DistortionMatrix& d) {
  if (lambda.alphabet() != d.reconstruction()) {
    throw ContractViolation("coefficients and distortion disagree on the reconstruction alphabet");
  }
  if (x.alphabet().size > d.source().size) {
    throw ContractViolation("source alphabet larger than the distortion matrix allows");
  }
}

// Per-symbol H_k of a raw symbol buffer; `counts` is scratch.
double entropy_of_buffer(std::span<const Symbol> y, int a, int k,
                         std::vector<std::uint64_t>& counts) {
  const std::size_t n = y.size();
  const std::size_t num_contexts = counts.size() / a;
  std::fill(counts.begin(), counts.end(), 0);
  std::size_t context = 0;
  for (int j = k; j >= 1; --j) {
    context = context * a + y[(n - static_cast<std::size_t>(j) % n) % n];
  }
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t s = context * a + y[i];
    ++counts[s];
    context = s % num_contexts;
  }
  double h = 0.0;
  for (std::size_t c = 0; c < counts.size(); c += a) {
    std::uint64_t col = 0;
    for (int b = 0; b < a; ++b) col += counts[c + b];
    if (col == 0) continue;
    for (int b = 0; b < a; ++b) {
      const std::uint64_t v = counts[c + b];
      if (v > 0) h += static_cast<double>(v) * std::log2(static_cast<double>(col) / v);
    }
  }
  return h / static_cast<double>(n);
}

double linear_of_buffer(std::span<const Symbol> y, const CoefficientMatrix& lambda, bool cyclic) {
  const std::size_t a = lambda.alphabet().size;
  const std::size_t n = y.size();
  const int k = lambda.order();
  const std::size_t num_contexts = lambda.size() / a;
  std::size_t context = 0;
  std::size_t start = 0;
  if (cyclic) {
    for (int j = k; j >= 1; --j) context = context * a + y[(n - static_cast<std::size_t>(j) % n) % n];
  } else {
    for (int j = 0; j < k; ++j) context = context * a + y[j];
    start = static_cast<std::size_t>(k);
  }
  double sum = 0.0;
  for (std::size_t i = start; i < n; ++i) {
    const std::size_t s = context * a + y[i];
    sum += lambda[s];
    context = s % num_contexts;
  }
  return sum / static_cast<double>(n);
}

double distortion_of_buffer(const Sequence& x, std::span<const Symbol> y, const DistortionMatrix& d) {
  double sum = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) sum += d(x[i], y[i]);
  return sum / static_cast<double>(y.size());
}

void fill_costs(EncodeResult& r, const Sequence& x, const CoefficientMatrix* lambda, double alpha,
                int k, const DistortionMatrix& d) {
  r.true_cost = true_cost(x, r.reconstruction, alpha, k, d);
  if (lambda != nullptr) r.linearized = linearized_cost(x, r.reconstruction, *lambda, alpha, d);
}

}  // namespace

Sequence as_reconstruction(const Sequence& x, const DistortionMatrix& d) {
  if (x.alphabet().size > d.reconstruction().size) {
    throw ConfigError("source symbols cannot be read as reconstruction symbols (|X| > |Y|)");
  }
  if (x.alphabet() == d.reconstruction()) return x;
  return Sequence(std::vector<Symbol>(x.symbols().begin(), x.symbols().end()), d.reconstruction());
}

double trellis_objective(const Sequence& x, const Sequence& y, const CoefficientMatrix& lambda,
                         double alpha, const DistortionMatrix& d) {
  if (x.size() != y.size()) throw ContractViolation("source and reconstruction lengths differ");
  if (y.size() < static_cast<std::size_t>(lambda.order()) + 1) {
    throw InputTooShort("trellis objective needs n >= k+1");
  }
  check_alphabets(x, lambda, d);
  return linear_of_buffer(y.symbols(), lambda, false) +
         alpha * distortion_of_buffer(x, y.symbols(), d);
}

namespace {

// Costs closer than this are ties; summation order alone can split paths
// that use the same multiset of edges by a few ulps.
double tie_slack(double v) { return 1e-12 * std::max(1.0, std::abs(v)); }

}  // namespace

EncodeResult viterbi_encode(const Sequence& x, const CoefficientMatrix& lambda, double alpha,
                            const DistortionMatrix& d) {
  check_alphabets(x, lambda, d);
  const int k = lambda.order();
  const std::size_t n = x.size();
  if (n < static_cast<std::size_t>(k) + 1) {
    throw InputTooShort("viterbi_encode needs n >= k+1 (n=" + std::to_string(n) +
                        ", k=" + std::to_string(k) + ")");
  }
  const std::size_t a = lambda.alphabet().size;
  const std::size_t num_states = lambda.size();
  const std::size_t num_contexts = num_states / a;
  const std::size_t sa = x.alphabet().size;

  std::vector<double> weighted_d(sa * a);
  for (std::size_t xs = 0; xs < sa; ++xs) {
    for (std::size_t ys = 0; ys < a; ++ys) weighted_d[xs * a + ys] = alpha * d(xs, ys);
  }

  // C(s, k+1): lambda of the first state plus the distortion of all its symbols.
  std::vector<double> cost(num_states), next(num_states);
  for (std::size_t s = 0; s < num_states; ++s) {
    double dist = 0.0;
    std::size_t code = s;
    for (int j = k; j >= 0; --j) {
      dist += weighted_d[x[j] * a + code % a];
      code /= a;
    }
    cost[s] = lambda[s] + dist;
  }

  const std::size_t steps = n - static_cast<std::size_t>(k) - 1;
  std::vector<Symbol> back(steps * num_states);
  for (std::size_t t = 0; t < steps; ++t) {
    const std::size_t i = static_cast<std::size_t>(k) + 1 + t;
    const double* wd = &weighted_d[x[i] * a];
    Symbol* bp = &back[t * num_states];
    for (std::size_t s = 0; s < num_states; ++s) {
      const std::size_t tail = s / a;  // predecessor = gamma * |A|^k + tail
      double best = cost[tail];
      Symbol best_gamma = 0;
      for (std::size_t g = 1; g < a; ++g) {
        const double c = cost[g * num_contexts + tail];
        if (c < best - tie_slack(best)) {
          best = c;
          best_gamma = static_cast<Symbol>(g);
        }
      }
      next[s] = best + lambda[s] + wd[s % a];
      bp[s] = best_gamma;
    }
    cost.swap(next);
  }

  std::size_t terminal = 0;
  for (std::size_t s = 1; s < num_states; ++s) {
    if (cost[s] < cost[terminal] - tie_slack(cost[terminal])) terminal = s;
  }

  EncodeResult r;
  r.objective = cost[terminal] / static_cast<double>(n);
  r.states.assign(steps + 1, 0);
  std::vector<Symbol> y(n);
  std::size_t state = terminal;
  for (std::size_t t = steps; t-- > 0;) {
    r.states[t + 1] = static_cast<std::uint32_t>(state);
    y[k + 1 + t] = static_cast<Symbol>(state % a);
    state = back[t * num_states + state] * num_contexts + state / a;
  }
  r.states[0] = static_cast<std::uint32_t>(state);
  for (int j = k; j >= 0; --j) {
    y[j] = static_cast<Symbol>(state % a);
    state /= a;
  }
  r.reconstruction = Sequence(std::move(y), lambda.alphabet());
  r.stages = steps + 1;
  r.edge_relaxations = static_cast<std::uint64_t>(steps) * num_states * a;
  fill_costs(r, x, &lambda, alpha, k, d);
  return r;
}

bool tie_break_less(std::span<const Symbol> a, std::span<const Symbol> b, int k) {
  const std::size_t n = a.size();
  const std::size_t head = n > static_cast<std::size_t>(k) + 1 ? n - k - 1 : 0;
  for (std::size_t i = head; i < n; ++i) {
    if (a[i] != b[i]) return a[i] < b[i];
  }
  for (std::size_t i = head; i-- > 0;) {
    if (a[i] != b[i]) return a[i] < b[i];
  }
  return false;
}

EncodeResult exhaustive_encode(const Sequence& x, const DistortionMatrix& d,
                               const ExhaustiveProblem& problem) {
  const int a = d.reconstruction().size;
  const std::size_t n = x.size();
  if (problem.objective != Objective::exact) {
    if (problem.lambda == nullptr) throw ConfigError("linearized objectives need coefficients");
    check_alphabets(x, *problem.lambda, d);
    if (problem.lambda->order() != problem.k) throw ContractViolation("coefficient order differs from k");
  }
  if (problem.objective == Objective::trellis && n < static_cast<std::size_t>(problem.k) + 1) {
    throw InputTooShort("trellis objective needs n >= k+1");
  }
  std::uint64_t total = 1;
  for (std::size_t i = 0; i < n; ++i) {
    if (total > problem.budget / a) {
      throw BudgetExceeded("exhaustive search over |Y|^" + std::to_string(n) +
                           " sequences exceeds the budget");
    }
    total *= a;
  }

  std::vector<std::uint64_t> scratch(checked_pow(a, problem.k + 1));
  auto evaluate = [&](std::span<const Symbol> y) {
    const double dist = distortion_of_buffer(x, y, d);
    switch (problem.objective) {
      case Objective::exact:
        return entropy_of_buffer(y, a, problem.k, scratch) + problem.alpha * dist;
      case Objective::linearized:
        return linear_of_buffer(y, *problem.lambda, true) + problem.alpha * dist;
      case Objective::trellis:
        return linear_of_buffer(y, *problem.lambda, false) + problem.alpha * dist;
    }
    return 0.0;
  };

  constexpr double kTieTolerance = 1e-12;
  std::vector<Symbol> y(n, 0), best_y(n, 0);
  double best = std::numeric_limits<double>::infinity();
  for (std::uint64_t count = 0; count < total; ++count) {
    const double v = evaluate(y);
    if (v < best - kTieTolerance ||
        (v <= best + kTieTolerance && tie_break_less(y, best_y, problem.k))) {
      best = std::min(best, v);
      best_y = y;
    }
    // Odometer with position 0 fastest.
    for (std::size_t i = 0; i < n; ++i) {
      if (++y[i] < a) break;
      y[i] = 0;
    }
  }

  EncodeResult r;
  r.reconstruction = Sequence(std::move(best_y), d.reconstruction());
  r.objective = evaluate(r.reconstruction.symbols());
  r.stages = total;
  fill_costs(r, x, problem.lambda, problem.alpha, problem.k, d);
  return r;
}

EncodeResult encode_iterative(const Sequence& x, double alpha, int k, const DistortionMatrix& d,
                              int max_rounds, std::optional<double> lambda_max) {
  if (max_rounds < 1) throw ConfigError("max_rounds must be >= 1");
  const double cap = lambda_max.value_or(default_lambda_max(x.size(), d.reconstruction()));
  CountMatrix expansion = count_matrix(as_reconstruction(x, d), k);

  EncodeResult best;
  double previous = std::numeric_limits<double>::infinity();
  std::vector<double> trace;
  for (int round = 0; round < max_rounds; ++round) {
    EncodeResult r = viterbi_encode(x, gradient_coefficients(expansion, cap), alpha, d);
    const double cost = r.true_cost.total;
    trace.push_back(cost);
    expansion = count_matrix(r.reconstruction, k);
    if (round == 0 || cost < best.true_cost.total) best = std::move(r);
    if (cost >= previous) break;
    previous = cost;
  }
  best.round_true_costs = std::move(trace);
  return best;
}

void write_encode_csv_header(std::ostream& os) {
  os << "n,k,alpha,distortion,H_k,linearized_cost,true_cost,seconds\n";
}

void write_encode_csv_row(std::ostream& os, const EncodeResult& r, int k, double seconds) {
  const auto old = os.precision(12);
  os << r.reconstruction.size() << ',' << k << ',' << r.true_cost.alpha << ','
     << r.true_cost.distortion_part << ',' << r.true_cost.entropy_part << ','
     << r.linearized.total << ',' << r.true_cost.total << ',' << seconds << '\n';
  os.precision(old);
}

}  // namespace fixslope
