#ifndef FIXSLOPE_TESTS_SUPPORT_HPP_
#define FIXSLOPE_TESTS_SUPPORT_HPP_

#include <random>
#include <string_view>
#include <vector>

#include "fixslope/count_model.hpp"
#include "oracles.hpp"

namespace testing {

inline fixslope::Sequence seq(std::string_view digits, int alphabet = 2) {
  std::vector<fixslope::Symbol> v;
  for (char c : digits) v.push_back(static_cast<fixslope::Symbol>(c - '0'));
  return fixslope::Sequence(v, fixslope::Alphabet(alphabet));
}

inline oracle::Word word(const fixslope::Sequence& s) {
  return oracle::Word(s.symbols().begin(), s.symbols().end());
}

inline fixslope::Sequence random_sequence(std::mt19937_64& rng, std::size_t n, int alphabet) {
  std::vector<fixslope::Symbol> v(n);
  for (auto& s : v) s = static_cast<fixslope::Symbol>(rng() % static_cast<unsigned>(alphabet));
  return fixslope::Sequence(v, fixslope::Alphabet(alphabet));
}

// Random strictly positive normalized array of the given size.
inline std::vector<double> random_positive(std::mt19937_64& rng, std::size_t size) {
  std::uniform_real_distribution<double> u(0.01, 1.0);
  std::vector<double> v(size);
  double s = 0.0;
  for (auto& x : v) s += (x = u(rng));
  for (auto& x : v) x /= s;
  return v;
}

}  // namespace testing

#endif  // FIXSLOPE_TESTS_SUPPORT_HPP_
