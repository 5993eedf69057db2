#ifndef FIXSLOPE_EXPERIMENTS_HPP_
#define FIXSLOPE_EXPERIMENTS_HPP_

#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "fixslope/coefficients.hpp"
#include "fixslope/trellis_encoder.hpp"

namespace fixslope {

// How the trellis coefficients are chosen.
enum class CoefficientMode {
  shortcut,   // gradient at m(x)
  iterative,  // re-expand at the reconstruction while the true cost drops
  program,    // gradient at the coefficient program's optimum
};

CoefficientMode parse_mode(std::string_view name);
const char* mode_name(CoefficientMode mode);

struct EncodeSettings {
  double alpha = 1.0;
  int k = 0;
  CoefficientMode mode = CoefficientMode::shortcut;
  std::optional<int> k1;  // program mode only; defaults to k + 1
  int max_rounds = 20;    // iterative mode
  std::optional<double> lambda_max;
  std::size_t program_budget = std::size_t{1} << 14;
};

// Coefficients for `settings.mode` followed by viterbi_encode (or
// encode_iterative). Program mode throws BudgetExceeded with a hint when the
// LP is too large for the chosen k1.
EncodeResult encode_with_mode(const Sequence& x, const EncodeSettings& settings,
                              const DistortionMatrix& d);

// Runs fn(0..count-1) on up to `workers` threads. Exceptions are rethrown
// after all workers stop.
void run_cells(std::size_t count, unsigned workers, const std::function<void(std::size_t)>& fn);

std::vector<double> default_alpha_grid();

struct Fig1Config {
  std::size_t n = 5000;
  int k = 7;
  double q = 0.2;
  std::vector<double> alphas = default_alpha_grid();
  int reps = 20;
  std::uint64_t seed = 1;
  CoefficientMode mode = CoefficientMode::shortcut;
  std::optional<int> k1;
  unsigned workers = 1;
};

struct Fig1Row {
  double alpha = 0.0;
  int rep = 0;
  std::uint64_t source_seed = 0;
  double distortion = 0.0;
  double h_k = 0.0;
  double reference_rate = 0.0;  // h(q) - h(D) at the measured distortion
  double gap = 0.0;              // h_k - reference_rate
  double true_cost = 0.0;
  double seconds = 0.0;
};

struct Fig1Result {
  std::vector<Fig1Row> rows;           // alpha-major, then rep
  std::vector<double> mean_gap;        // per alpha
  std::vector<double> mean_distortion;
  std::vector<double> mean_rate;
};

Fig1Result run_fig1(const Fig1Config& cfg);
// Deterministic columns only; wall-clock goes to write_fig1_timing_csv.
void write_fig1_csv(std::ostream& os, const Fig1Config& cfg, const Fig1Result& result);
void write_fig1_timing_csv(std::ostream& os, const Fig1Result& result);

struct Fig3Config {
  std::size_t n = 5000;
  int k = 7;
  double q = 0.2;
  std::vector<double> alphas = default_alpha_grid();
  int reps = 10;
  std::uint64_t seed = 1;
  CoefficientMode mode = CoefficientMode::shortcut;
  std::optional<int> k1;
  std::uint64_t sweeps = 10;  // Gibbs steps = sweeps * n
  unsigned workers = 1;
};

struct Fig3Row {
  double alpha = 0.0;
  int rep = 0;
  std::uint64_t source_seed = 0;
  std::uint64_t chain_seed = 0;
  LinearizedCost viterbi;
  LinearizedCost mcmc;
  double viterbi_seconds = 0.0;
  double mcmc_seconds = 0.0;
};

struct Fig3Summary {
  double alpha = 0.0;
  double mean_viterbi_cost = 0.0;
  double mean_mcmc_cost = 0.0;
  double viterbi_seconds = 0.0;
  double mcmc_seconds = 0.0;
  double speed_ratio = 0.0;  // mcmc / viterbi wall-clock
};

struct Fig3Result {
  std::vector<Fig3Row> rows;
  std::vector<Fig3Summary> summary;
};

Fig3Result run_fig3(const Fig3Config& cfg);
void write_fig3_csv(std::ostream& os, const Fig3Config& cfg, const Fig3Result& result);
void write_fig3_timing_csv(std::ostream& os, const Fig3Result& result);

// Header comment naming the run parameters, e.g. "# fig1 v1 n=5000 ...".
std::string describe(const Fig1Config& cfg);
std::string describe(const Fig3Config& cfg);

}  // namespace fixslope

#endif  // FIXSLOPE_EXPERIMENTS_HPP_
