#ifndef FIXSLOPE_LOSSLESS_CODEC_HPP_
#define FIXSLOPE_LOSSLESS_CODEC_HPP_

#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "fixslope/count_model.hpp"

namespace fixslope {

// Incremental (LZ78) parse. Phrase j (1-based) extends phrase parent[j-1]
// (0 = empty phrase) by innovation[j-1]. When the input ends inside a known
// phrase, that final partial phrase is recorded in `partial_parent`.
struct Lz78Parse {
  std::vector<std::size_t> parent;
  std::vector<Symbol> innovation;
  std::size_t partial_parent = 0;  // 0 when the parse ends on a phrase boundary

  std::size_t complete_phrases() const { return parent.size(); }
  bool has_partial() const { return partial_parent != 0; }
};

Lz78Parse lz78_parse(const Sequence& y);

// Rebuilds the sequence from its parse.
std::vector<Symbol> lz78_expand(const Lz78Parse& parse);

struct CodelengthReport {
  double bits_total = 0.0;
  double bits_per_symbol = 0.0;
  double h_k = 0.0;      // H_k of the coded sequence
  double excess = 0.0;   // bits_per_symbol - h_k
};

// Pointer + innovation accounting: phrase j costs ceil(log2 j) + ceil(log2 |A|)
// bits, a final partial phrase ceil(log2 j) bits. H_k uses order k.
CodelengthReport lz78_codelength(const Sequence& y, int k);

// Container for the context-model range coder.
//
//   "MLZC" | version (1 byte) | n (LEB128) | k (1 byte) | |A| mod 256 (1 byte,
//   0 means 256) | coder id (1 byte) | payload
struct Bitstream {
  static constexpr std::uint8_t kVersion = 1;
  static constexpr std::uint8_t kAdaptiveLaplace = 1;

  std::uint8_t version = kVersion;
  std::uint64_t n = 0;
  int k = 0;
  int alphabet = 2;
  std::uint8_t coder_id = kAdaptiveLaplace;
  std::vector<std::uint8_t> payload;

  std::vector<std::uint8_t> serialize() const;
  // Throws DecodeError with the byte offset of the first bad header field.
  static Bitstream parse(std::span<const std::uint8_t> bytes);

  std::size_t header_bytes() const;
  std::size_t payload_bits() const { return payload.size() * 8; }
};

// Order-k adaptive arithmetic code: each context keeps add-one (Laplace)
// counts, the first k symbols use a separate order-0 adaptive model. Throws
// BudgetExceeded when |A|^{k+1} counts would not fit.
Bitstream entropy_encode(const Sequence& y, int k);

// Exact inverse of entropy_encode. Throws DecodeError on a corrupt or
// truncated payload.
Sequence entropy_decode(const Bitstream& b);
Sequence entropy_decode(std::span<const std::uint8_t> bytes);

// Payload size of entropy_encode(y, k) as a CodelengthReport (header excluded).
CodelengthReport entropy_codelength(const Sequence& y, int k);

// n H_k(y) + |A|^{k+1} log2(n + 1) + 64: the payload never exceeds this.
double two_part_bound_bits(const Sequence& y, int k);

// A named generator of test sequences for the Ziv-gap scan.
struct SequenceFamily {
  std::string name;
  std::function<Sequence(std::size_t n, std::uint64_t seed)> sample;
};

// Constant, i.i.d. uniform, binary symmetric Markov (flip 0.2) and periodic
// with a pseudo-random period; all binary.
std::vector<SequenceFamily> default_ziv_families();

struct ZivGapRow {
  std::size_t n = 0;
  int k = 0;
  std::string family;  // family attaining the max
  double max_excess = 0.0;
  std::vector<double> family_excess;  // per family, max over samples
};

// For each n: max over families and `samples` draws of lz78 bits/n - H_{k(n)}.
std::vector<ZivGapRow> ziv_gap_scan(const std::function<int(std::size_t)>& k_of_n,
                                    std::span<const std::size_t> ns,
                                    const std::vector<SequenceFamily>& families, int samples,
                                    std::uint64_t seed);

// floor(log2 log2 n), 0 for n < 4.
int loglog_order(std::size_t n);

void write_ziv_csv(std::ostream& os, const std::vector<ZivGapRow>& rows,
                   const std::vector<SequenceFamily>& families);

}  // namespace fixslope

#endif  // FIXSLOPE_LOSSLESS_CODEC_HPP_
