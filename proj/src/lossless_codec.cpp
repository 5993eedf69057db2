#include "fixslope/lossless_codec.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <ostream>
#include <random>
#include <unordered_map>

#include "fixslope/errors.hpp"
#include "fixslope/sources_bench.hpp"

namespace fixslope {

namespace {

int ceil_log2(std::uint64_t v) {
  int bits = 0;
  while ((std::uint64_t{1} << bits) < v) ++bits;
  return bits;
}

}  // namespace

Lz78Parse lz78_parse(const Sequence& y) {
  const std::uint64_t a = y.alphabet().size;
  Lz78Parse parse;
  // Node 0 is the empty phrase; node j is phrase j.
  std::unordered_map<std::uint64_t, std::size_t> children;
  children.reserve(y.size() / 4 + 16);
  std::size_t node = 0;
  for (Symbol s : y.symbols()) {
    const auto it = children.find(node * a + s);
    if (it != children.end()) {
      node = it->second;
      continue;
    }
    parse.parent.push_back(node);
    parse.innovation.push_back(s);
    children.emplace(node * a + s, parse.parent.size());
    node = 0;
  }
  parse.partial_parent = node;
  return parse;
}

std::vector<Symbol> lz78_expand(const Lz78Parse& parse) {
  std::vector<Symbol> out, phrase;
  auto spell = [&](std::size_t node) {
    phrase.clear();
    while (node != 0) {
      phrase.push_back(parse.innovation[node - 1]);
      node = parse.parent[node - 1];
    }
    out.insert(out.end(), phrase.rbegin(), phrase.rend());
  };
  for (std::size_t j = 1; j <= parse.complete_phrases(); ++j) spell(j);
  if (parse.has_partial()) spell(parse.partial_parent);
  return out;
}

CodelengthReport lz78_codelength(const Sequence& y, int k) {
  const Lz78Parse parse = lz78_parse(y);
  const int innovation_bits = ceil_log2(static_cast<std::uint64_t>(y.alphabet().size));
  double bits = 0.0;
  const std::size_t c = parse.complete_phrases();
  for (std::size_t j = 1; j <= c; ++j) bits += ceil_log2(j) + innovation_bits;
  if (parse.has_partial()) bits += ceil_log2(c + 1);
  CodelengthReport r;
  r.bits_total = bits;
  r.bits_per_symbol = bits / static_cast<double>(y.size());
  r.h_k = conditional_entropy(y, k);
  r.excess = r.bits_per_symbol - r.h_k;
  return r;
}

namespace {

constexpr std::uint32_t kTop = std::uint32_t{1} << 24;
// Per-context totals are halved past this so that range / total stays large.
constexpr std::uint32_t kMaxTotal = std::uint32_t{1} << 16;

class RangeEncoder {
 public:
  explicit RangeEncoder(std::vector<std::uint8_t>& out) : out_(out) {}

  // Narrows to [range*cum/total, range*(cum+freq)/total).
  void encode(std::uint32_t cum, std::uint32_t freq, std::uint32_t total) {
    const std::uint64_t lo = static_cast<std::uint64_t>(range_) * cum / total;
    const std::uint64_t hi = static_cast<std::uint64_t>(range_) * (cum + freq) / total;
    low_ += lo;
    range_ = static_cast<std::uint32_t>(hi - lo);
    while (range_ < kTop) {
      range_ <<= 8;
      shift_low();
    }
  }

  void finish() {
    for (int i = 0; i < 5; ++i) shift_low();
  }

 private:
  void shift_low() {
    if (static_cast<std::uint32_t>(low_) < 0xFF000000u || (low_ >> 32) != 0) {
      const std::uint8_t carry = static_cast<std::uint8_t>(low_ >> 32);
      std::uint8_t temp = cache_;
      do {
        out_.push_back(static_cast<std::uint8_t>(temp + carry));
        temp = 0xFF;
      } while (--cache_size_ != 0);
      cache_ = static_cast<std::uint8_t>(low_ >> 24);
    }
    ++cache_size_;
    low_ = (low_ & 0x00FFFFFFu) << 8;
  }

  std::vector<std::uint8_t>& out_;
  std::uint64_t low_ = 0;
  std::uint32_t range_ = 0xFFFFFFFFu;
  std::uint8_t cache_ = 0;
  std::uint64_t cache_size_ = 1;
};

class RangeDecoder {
 public:
  RangeDecoder(std::span<const std::uint8_t> in, std::size_t base) : in_(in), base_(base) {
    if (in_.size() < 5) throw DecodeError("payload shorter than the coder preamble", base_ + in_.size());
    if (in_[0] != 0) throw DecodeError("payload must start with a zero byte", base_);
    for (int i = 0; i < 5; ++i) code_ = (code_ << 8) | next();
    if (code_ >= range_) throw DecodeError("code value outside the coding interval", base_ + pos_);
  }

  std::uint32_t decode(std::span<const std::uint32_t> freq, std::uint32_t total) {
    std::uint32_t cum = 0;
    const std::size_t a = freq.size();
    for (std::size_t s = 0; s < a; ++s) {
      const std::uint64_t lo = static_cast<std::uint64_t>(range_) * cum / total;
      const std::uint64_t hi = static_cast<std::uint64_t>(range_) * (cum + freq[s]) / total;
      if (code_ < hi) {
        code_ -= static_cast<std::uint32_t>(lo);
        range_ = static_cast<std::uint32_t>(hi - lo);
        while (range_ < kTop) {
          range_ <<= 8;
          code_ = (code_ << 8) | next();
        }
        if (code_ >= range_) throw DecodeError("code value outside the coding interval", base_ + pos_);
        return static_cast<std::uint32_t>(s);
      }
      cum += freq[s];
    }
    throw DecodeError("code value outside the coding interval", base_ + pos_);
  }

  void expect_end() const {
    if (pos_ != in_.size()) throw DecodeError("trailing bytes after payload", base_ + pos_);
  }

 private:
  std::uint32_t next() {
    if (pos_ >= in_.size()) throw DecodeError("payload truncated", base_ + pos_);
    return in_[pos_++];
  }

  std::span<const std::uint8_t> in_;
  std::size_t base_;
  std::size_t pos_ = 0;
  std::uint32_t code_ = 0;
  std::uint32_t range_ = 0xFFFFFFFFu;
};

// Laplace (add-one) counts for every context, plus the order-0 start model.
class ContextModel {
 public:
  ContextModel(int k, int a)
      : a_(a), contexts_(checked_pow(a, k, std::size_t{1} << 26)),
        freq_((contexts_ + 1) * a, 1), total_(contexts_ + 1, a) {
    checked_pow(a, k + 1, std::size_t{1} << 26);
  }

  // Model index: context code, or contexts_ for the order-0 start model.
  std::span<const std::uint32_t> freq(std::size_t model) const {
    return std::span<const std::uint32_t>(freq_).subspan(model * a_, a_);
  }
  std::uint32_t cum(std::size_t model, std::size_t s) const {
    std::uint32_t c = 0;
    for (std::size_t b = 0; b < s; ++b) c += freq_[model * a_ + b];
    return c;
  }
  std::uint32_t total(std::size_t model) const { return total_[model]; }
  std::size_t start_model() const { return contexts_; }
  std::size_t contexts() const { return contexts_; }

  void update(std::size_t model, std::size_t s) {
    ++freq_[model * a_ + s];
    if (++total_[model] > kMaxTotal) {
      std::uint32_t t = 0;
      for (std::size_t b = 0; b < a_; ++b) {
        std::uint32_t& f = freq_[model * a_ + b];
        f = (f + 1) / 2;
        t += f;
      }
      total_[model] = t;
    }
  }

 private:
  std::size_t a_;
  std::size_t contexts_;
  std::vector<std::uint32_t> freq_;
  std::vector<std::uint32_t> total_;
};

void put_varint(std::vector<std::uint8_t>& out, std::uint64_t v) {
  while (v >= 0x80) {
    out.push_back(static_cast<std::uint8_t>(v | 0x80));
    v >>= 7;
  }
  out.push_back(static_cast<std::uint8_t>(v));
}

constexpr std::uint8_t kMagic[4] = {'M', 'L', 'Z', 'C'};

}  // namespace

std::vector<std::uint8_t> Bitstream::serialize() const {
  std::vector<std::uint8_t> out(std::begin(kMagic), std::end(kMagic));
  out.push_back(version);
  put_varint(out, n);
  out.push_back(static_cast<std::uint8_t>(k));
  out.push_back(static_cast<std::uint8_t>(alphabet % 256));
  out.push_back(coder_id);
  out.insert(out.end(), payload.begin(), payload.end());
  return out;
}

std::size_t Bitstream::header_bytes() const {
  std::vector<std::uint8_t> tmp;
  put_varint(tmp, n);
  return 4 + 1 + tmp.size() + 3;
}

Bitstream Bitstream::parse(std::span<const std::uint8_t> bytes) {
  Bitstream b;
  std::size_t pos = 0;
  auto need = [&](const char* what) {
    if (pos >= bytes.size()) throw DecodeError(std::string("header truncated in ") + what, pos);
  };
  for (std::uint8_t m : kMagic) {
    need("magic");
    if (bytes[pos] != m) throw DecodeError("bad magic", pos);
    ++pos;
  }
  need("version");
  b.version = bytes[pos];
  if (b.version != kVersion) throw DecodeError("unsupported version " + std::to_string(b.version), pos);
  ++pos;
  b.n = 0;
  for (int shift = 0;; shift += 7) {
    need("length");
    if (shift > 63) throw DecodeError("length varint too long", pos);
    const std::uint8_t byte = bytes[pos++];
    b.n |= static_cast<std::uint64_t>(byte & 0x7F) << shift;
    if ((byte & 0x80) == 0) break;
  }
  if (b.n == 0) throw DecodeError("sequence length must be >= 1", pos - 1);
  need("order");
  b.k = bytes[pos++];
  need("alphabet");
  b.alphabet = bytes[pos] == 0 ? 256 : bytes[pos];
  ++pos;
  need("coder id");
  b.coder_id = bytes[pos];
  if (b.coder_id != kAdaptiveLaplace) throw DecodeError("unknown coder id", pos);
  ++pos;
  b.payload.assign(bytes.begin() + static_cast<std::ptrdiff_t>(pos), bytes.end());
  return b;
}

Bitstream entropy_encode(const Sequence& y, int k) {
  if (k < 0 || k > 255) throw ConfigError("order must be in [0, 255]");
  const int a = y.alphabet().size;
  Bitstream b;
  b.n = y.size();
  b.k = k;
  b.alphabet = a;
  const int model_a = a;
  ContextModel model(k, model_a);
  RangeEncoder enc(b.payload);
  std::size_t context = 0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    const std::size_t s = y[i];
    const std::size_t m = i < static_cast<std::size_t>(k) ? model.start_model() : context;
    enc.encode(model.cum(m, s), model.freq(m)[s], model.total(m));
    model.update(m, s);
    context = (context * model_a + s) % model.contexts();
  }
  enc.finish();
  return b;
}

Sequence entropy_decode(const Bitstream& b) {
  const std::size_t base = b.header_bytes();
  if (b.n > (std::uint64_t{1} << 40)) throw DecodeError("sequence length implausibly large", 5);
  std::optional<ContextModel> built;
  try {
    built.emplace(b.k, b.alphabet);
  } catch (const BudgetExceeded&) {
    throw DecodeError("context order too large for the model budget", base - 3);
  }
  ContextModel& model = *built;
  RangeDecoder dec(b.payload, base);
  std::vector<Symbol> y;
  y.reserve(static_cast<std::size_t>(std::min<std::uint64_t>(b.n, std::uint64_t{1} << 24)));
  std::size_t context = 0;
  for (std::uint64_t i = 0; i < b.n; ++i) {
    const std::size_t m = i < static_cast<std::uint64_t>(b.k) ? model.start_model() : context;
    const std::size_t s = dec.decode(model.freq(m), model.total(m));
    model.update(m, s);
    y.push_back(static_cast<Symbol>(s));
    context = (context * b.alphabet + s) % model.contexts();
  }
  dec.expect_end();
  return Sequence(std::move(y), Alphabet(b.alphabet));
}

Sequence entropy_decode(std::span<const std::uint8_t> bytes) {
  return entropy_decode(Bitstream::parse(bytes));
}

CodelengthReport entropy_codelength(const Sequence& y, int k) {
  const Bitstream b = entropy_encode(y, k);
  CodelengthReport r;
  r.bits_total = static_cast<double>(b.payload_bits());
  r.bits_per_symbol = r.bits_total / static_cast<double>(y.size());
  r.h_k = conditional_entropy(y, k);
  r.excess = r.bits_per_symbol - r.h_k;
  return r;
}

double two_part_bound_bits(const Sequence& y, int k) {
  const double n = static_cast<double>(y.size());
  return n * conditional_entropy(y, k) +
         static_cast<double>(checked_pow(y.alphabet().size, k + 1)) * std::log2(n + 1.0) + 64.0;
}

std::vector<SequenceFamily> default_ziv_families() {
  std::vector<SequenceFamily> f;
  f.push_back({"constant", [](std::size_t n, std::uint64_t seed) {
                 return Sequence(std::vector<Symbol>(n, static_cast<Symbol>(seed & 1)), Alphabet(2));
               }});
  f.push_back({"iid", [](std::size_t n, std::uint64_t seed) {
                 return generate(MarkovSource::iid_uniform(Alphabet(2)), n, seed);
               }});
  f.push_back({"markov", [](std::size_t n, std::uint64_t seed) {
                 return generate(MarkovSource::binary_symmetric(0.2), n, seed);
               }});
  f.push_back({"periodic", [](std::size_t n, std::uint64_t seed) {
                 std::mt19937_64 rng(seed);
                 const std::size_t period = 2 + rng() % 63;
                 std::vector<Symbol> pattern(period);
                 for (Symbol& s : pattern) s = static_cast<Symbol>(rng() & 1);
                 std::vector<Symbol> y(n);
                 for (std::size_t i = 0; i < n; ++i) y[i] = pattern[i % period];
                 return Sequence(std::move(y), Alphabet(2));
               }});
  return f;
}

int loglog_order(std::size_t n) {
  if (n < 4) return 0;
  // floor(log2 n) suffices: floor(log2 log2 n) = floor(log2 floor(log2 n)).
  int lg = 0;
  while ((n >> (lg + 1)) != 0) ++lg;
  int k = 0;
  while ((lg >> (k + 1)) != 0) ++k;
  return k;
}

std::vector<ZivGapRow> ziv_gap_scan(const std::function<int(std::size_t)>& k_of_n,
                                    std::span<const std::size_t> ns,
                                    const std::vector<SequenceFamily>& families, int samples,
                                    std::uint64_t seed) {
  if (samples < 1) throw ConfigError("samples must be >= 1");
  if (families.empty()) throw ConfigError("at least one sequence family is needed");
  std::vector<ZivGapRow> rows;
  for (std::size_t ni = 0; ni < ns.size(); ++ni) {
    ZivGapRow row;
    row.n = ns[ni];
    row.k = k_of_n(row.n);
    row.max_excess = -std::numeric_limits<double>::infinity();
    for (std::size_t f = 0; f < families.size(); ++f) {
      double worst = -std::numeric_limits<double>::infinity();
      for (int s = 0; s < samples; ++s) {
        const std::uint64_t cell = derive_seed(seed, (ni * families.size() + f) * 1024 + s);
        const Sequence y = families[f].sample(row.n, cell);
        worst = std::max(worst, lz78_codelength(y, row.k).excess);
      }
      row.family_excess.push_back(worst);
      if (worst > row.max_excess) {
        row.max_excess = worst;
        row.family = families[f].name;
      }
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

void write_ziv_csv(std::ostream& os, const std::vector<ZivGapRow>& rows,
                   const std::vector<SequenceFamily>& families) {
  const auto old = os.precision(12);
  os << "# ziv-scan v1\n";
  os << "n,k,max_excess,argmax_family";
  for (const auto& f : families) os << ",excess_" << f.name;
  os << '\n';
  for (const auto& r : rows) {
    os << r.n << ',' << r.k << ',' << r.max_excess << ',' << r.family;
    for (double e : r.family_excess) os << ',' << e;
    os << '\n';
  }
  os.precision(old);
}

}  // namespace fixslope
