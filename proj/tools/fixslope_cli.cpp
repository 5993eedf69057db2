// fixslope: fixed-slope lossy compression from the command line.
//
// Exit codes: 0 ok, 1 usage, 2 IO or corrupt stream, 3 budget exceeded.

#include <CLI11.hpp>

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "fixslope/coefficients.hpp"
#include "fixslope/errors.hpp"
#include "fixslope/experiments.hpp"
#include "fixslope/lossless_codec.hpp"
#include "fixslope/sequence_io.hpp"
#include "fixslope/sources_bench.hpp"

namespace fs = fixslope;

namespace {

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw fs::IoError("cannot open '" + path + "' for writing");
  return out;
}

// "<dir>/<stem><suffix>" next to `path`.
std::string sibling(const std::string& path, const std::string& suffix) {
  std::filesystem::path p(path);
  return (p.parent_path() / (p.stem().string() + suffix)).string();
}

struct EncodeArgs {
  std::string input, out, format = "raw", mode = "shortcut", metrics;
  double alpha = 1.0;
  int k = 2;
  std::optional<int> k1, alphabet;
  std::optional<double> lambda_max;
};

int cmd_encode(const EncodeArgs& a) {
  const fs::SymbolFormat format = fs::parse_symbol_format(a.format);
  const fs::Sequence x = fs::read_sequence(a.input, format, a.alphabet);
  if (!(a.alpha > 0.0)) throw fs::ConfigError("--alpha must be > 0");
  const fs::DistortionMatrix d = fs::DistortionMatrix::hamming(x.alphabet());
  fs::EncodeSettings s;
  s.alpha = a.alpha;
  s.k = a.k;
  s.mode = fs::parse_mode(a.mode);
  s.k1 = a.k1;
  s.lambda_max = a.lambda_max;

  const auto start = std::chrono::steady_clock::now();
  const fs::EncodeResult r = fs::encode_with_mode(x, s, d);
  const fs::Bitstream b = fs::entropy_encode(r.reconstruction, a.k);
  const std::vector<std::uint8_t> bytes = b.serialize();
  const double seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  const std::string out = a.out.empty() ? a.input + ".mlzc" : a.out;
  auto os = open_out(out);
  os.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!os) throw fs::IoError("write to '" + out + "' failed");

  const double n = static_cast<double>(x.size());
  std::ostringstream row;
  row.precision(17);
  row << x.size() << ',' << a.k << ',' << a.alpha << ',' << fs::mode_name(s.mode) << ','
      << r.true_cost.distortion_part << ',' << r.true_cost.entropy_part << ','
      << r.true_cost.total << ',' << static_cast<double>(bytes.size() * 8) / n << ','
      << static_cast<double>(b.payload_bits()) / n << ',' << seconds;
  const char* header =
      "n,k,alpha,mode,distortion,H_k,true_cost,bits_per_symbol,payload_bits_per_symbol,seconds";
  std::cout << header << '\n' << row.str() << '\n';
  if (!a.metrics.empty()) {
    const bool fresh = !std::filesystem::exists(a.metrics) || std::filesystem::file_size(a.metrics) == 0;
    std::ofstream m(a.metrics, std::ios::app);
    if (!m) throw fs::IoError("cannot open '" + a.metrics + "' for appending");
    if (fresh) m << "# encode v1\n" << header << '\n';
    m << row.str() << '\n';
  }
  return 0;
}

int cmd_decode(const std::string& input, const std::string& out, const std::string& format) {
  std::ifstream in(input, std::ios::binary);
  if (!in) throw fs::IoError("cannot open '" + input + "' for reading");
  const std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                        std::istreambuf_iterator<char>());
  const fs::Sequence y = fs::entropy_decode(bytes);
  fs::write_sequence(out.empty() ? input + ".out" : out, y, fs::parse_symbol_format(format));
  return 0;
}

struct SweepArgs {
  std::vector<double> alphas = fs::default_alpha_grid();
  int k = 7, reps = 0;
  std::optional<int> k1;
  std::string mode = "shortcut", out;
  std::uint64_t seed = 1, sweeps = 10;
  double q = 0.2;
  std::size_t n = 5000;
  unsigned workers = 1;
};

int cmd_fig1(const SweepArgs& a) {
  fs::Fig1Config c;
  c.n = a.n;
  c.k = a.k;
  c.q = a.q;
  c.alphas = a.alphas;
  if (a.reps > 0) c.reps = a.reps;
  c.seed = a.seed;
  c.mode = fs::parse_mode(a.mode);
  c.k1 = a.k1;
  c.workers = a.workers;
  const fs::Fig1Result r = fs::run_fig1(c);
  const std::string out = a.out.empty() ? "fig1.csv" : a.out;
  auto os = open_out(out);
  fs::write_fig1_csv(os, c, r);
  auto timing = open_out(sibling(out, ".timing.csv"));
  fs::write_fig1_timing_csv(timing, r);
  auto rd = open_out(sibling(out, ".rd.csv"));
  fs::write_rd_csv(rd, fs::rd_curve(c.q, 501));
  std::cout << "alpha,mean_distortion,mean_H_k,mean_gap\n";
  for (std::size_t i = 0; i < c.alphas.size(); ++i) {
    std::cout << c.alphas[i] << ',' << r.mean_distortion[i] << ',' << r.mean_rate[i] << ','
              << r.mean_gap[i] << '\n';
  }
  return 0;
}

int cmd_fig3(const SweepArgs& a) {
  fs::Fig3Config c;
  c.n = a.n;
  c.k = a.k;
  c.q = a.q;
  c.alphas = a.alphas;
  if (a.reps > 0) c.reps = a.reps;
  c.seed = a.seed;
  c.mode = fs::parse_mode(a.mode);
  c.k1 = a.k1;
  c.sweeps = a.sweeps;
  c.workers = a.workers;
  const fs::Fig3Result r = fs::run_fig3(c);
  const std::string out = a.out.empty() ? "fig3.csv" : a.out;
  auto os = open_out(out);
  fs::write_fig3_csv(os, c, r);
  auto timing = open_out(sibling(out, ".timing.csv"));
  fs::write_fig3_timing_csv(timing, r);
  fs::write_fig3_timing_csv(std::cout, r);
  return 0;
}

int cmd_ziv(const std::vector<std::size_t>& ns, int samples, std::uint64_t seed, const std::string& out) {
  const auto families = fs::default_ziv_families();
  const auto rows = fs::ziv_gap_scan(fs::loglog_order, ns, families, samples, seed);
  if (out.empty()) {
    fs::write_ziv_csv(std::cout, rows, families);
  } else {
    auto os = open_out(out);
    fs::write_ziv_csv(os, rows, families);
  }
  return 0;
}

int cmd_rd(double q, std::size_t points, const std::string& out) {
  const fs::RDCurve c = fs::rd_curve(q, points);
  if (out.empty()) {
    fs::write_rd_csv(std::cout, c);
  } else {
    auto os = open_out(out);
    fs::write_rd_csv(os, c);
  }
  return 0;
}

std::map<CLI::App*, std::string> config_paths;

void add_config(CLI::App* sub) {
  sub->add_option("--config", config_paths[sub], "flat key=value file; flags take precedence");
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  return s.substr(b, s.find_last_not_of(" \t\r") - b + 1);
}

// Fills options of `sub` that were not given on the command line.
void apply_config(CLI::App* sub) {
  const std::string& path = config_paths[sub];
  if (path.empty()) return;
  std::ifstream in(path);
  if (!in) throw fs::IoError("cannot open config '" + path + "'");
  std::string line;
  for (int lineno = 1; std::getline(in, line); ++lineno) {
    line = trim(line);
    if (line.empty() || line[0] == '#' || line[0] == ';') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw fs::ConfigError(path + ":" + std::to_string(lineno) + ": expected key=value");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    CLI::Option* opt = nullptr;
    try {
      opt = sub->get_option("--" + key);
    } catch (const CLI::OptionNotFound&) {
      throw fs::ConfigError(path + ":" + std::to_string(lineno) + ": unknown key '" + key + "'");
    }
    if (opt->count() > 0 || key == "config") continue;
    opt->add_result(value);
    opt->run_callback();
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Fixed-slope lossy compression with a trellis encoder"};
  app.require_subcommand(1);

  EncodeArgs enc;
  auto* encode = app.add_subcommand("encode", "lossy-encode a sequence and write a bitstream");
  add_config(encode);
  encode->add_option("input", enc.input, "input sequence")->required();
  encode->add_option("--out", enc.out, "bitstream path (default <input>.mlzc)");
  encode->add_option("--alpha", enc.alpha, "slope: weight of distortion against rate")->capture_default_str();
  encode->add_option("--k", enc.k, "context order")->check(CLI::Range(0, 32))->capture_default_str();
  encode->add_option("--k1", enc.k1, "block length of the coefficient program (program mode)");
  encode->add_option("--mode", enc.mode, "shortcut | iterative | program")->capture_default_str();
  encode->add_option("--format", enc.format, "raw | ascii")->capture_default_str();
  encode->add_option("--alphabet", enc.alphabet, "alphabet size (default: max symbol + 1)");
  encode->add_option("--lambda-max", enc.lambda_max, "coefficient cap for unseen blocks");
  encode->add_option("--metrics", enc.metrics, "append the metrics row to this CSV");

  std::string dec_in, dec_out, dec_format = "raw";
  auto* decode = app.add_subcommand("decode", "decode a bitstream to a sequence");
  add_config(decode);
  decode->add_option("input", dec_in, "bitstream")->required();
  decode->add_option("--out", dec_out, "output path (default <input>.out)");
  decode->add_option("--format", dec_format, "raw | ascii")->capture_default_str();

  SweepArgs sweep;
  auto add_sweep = [&](CLI::App* sub, int default_reps) {
    add_config(sub);
    sub->add_option("--alphas", sweep.alphas, "alpha grid")->delimiter(',')->capture_default_str();
    sub->add_option("--k", sweep.k, "context order")->check(CLI::Range(0, 16))->capture_default_str();
    sub->add_option("--k1", sweep.k1, "program block length");
    sub->add_option("--mode", sweep.mode, "shortcut | iterative | program")->capture_default_str();
    sub->add_option("--seed", sweep.seed, "master seed")->capture_default_str();
    sub->add_option("--reps", sweep.reps, "source realizations per alpha (default " +
                                              std::to_string(default_reps) + ")");
    sub->add_option("--q", sweep.q, "flip probability of the Markov source")->capture_default_str();
    sub->add_option("--n", sweep.n, "sequence length")->capture_default_str();
    sub->add_option("--workers", sweep.workers, "worker threads")->capture_default_str();
    sub->add_option("--out", sweep.out, "CSV path");
  };
  auto* fig1 = app.add_subcommand("fig1", "distortion/rate scatter against the reference curve");
  add_sweep(fig1, 20);
  auto* fig3 = app.add_subcommand("fig3", "trellis encoder against Gibbs annealing");
  add_sweep(fig3, 10);
  fig3->add_option("--sweeps", sweep.sweeps, "Gibbs steps per symbol")->capture_default_str();

  std::vector<std::size_t> ns = {1u << 10, 1u << 12, 1u << 14, 1u << 16, 1u << 18};
  int samples = 3;
  std::uint64_t ziv_seed = 1;
  std::string ziv_out;
  auto* ziv = app.add_subcommand("ziv-scan", "LZ78 codelength minus H_k over n");
  add_config(ziv);
  ziv->add_option("--ns", ns, "sequence lengths")->delimiter(',')->capture_default_str();
  ziv->add_option("--samples", samples, "draws per family")->capture_default_str();
  ziv->add_option("--seed", ziv_seed, "master seed")->capture_default_str();
  ziv->add_option("--out", ziv_out, "CSV path (default stdout)");

  double rd_q = 0.2;
  std::size_t rd_points = 501;
  std::string rd_out;
  auto* rd = app.add_subcommand("rd-curve", "reference rate-distortion curve");
  add_config(rd);
  rd->add_option("--q", rd_q, "flip probability")->capture_default_str();
  rd->add_option("--points", rd_points, "grid size")->capture_default_str();
  rd->add_option("--out", rd_out, "CSV path (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    for (CLI::App* sub : app.get_subcommands()) apply_config(sub);
    if (*encode) return cmd_encode(enc);
    if (*decode) return cmd_decode(dec_in, dec_out, dec_format);
    if (*fig1) return cmd_fig1(sweep);
    if (*fig3) return cmd_fig3(sweep);
    if (*ziv) return cmd_ziv(ns, samples, ziv_seed, ziv_out);
    if (*rd) return cmd_rd(rd_q, rd_points, rd_out);
  } catch (const fs::BudgetExceeded& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 3;
  } catch (const fs::IoError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const fs::DecodeError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 1;
}
