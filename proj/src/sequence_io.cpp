#include "fixslope/sequence_io.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <iterator>
#include <vector>

#include "fixslope/errors.hpp"

namespace fixslope {

namespace {

Alphabet infer_alphabet(const std::vector<Symbol>& symbols, std::optional<int> alphabet) {
  if (alphabet) return Alphabet(*alphabet);
  int top = 1;
  for (Symbol s : symbols) top = std::max<int>(top, s);
  return Alphabet(top + 1);
}

}  // namespace

SymbolFormat parse_symbol_format(std::string_view name) {
  if (name == "raw" || name == "raw-byte" || name == "bytes") return SymbolFormat::raw_bytes;
  if (name == "ascii" || name == "ascii-digits" || name == "digits") {
    return SymbolFormat::ascii_digits;
  }
  throw ConfigError("unknown symbol format '" + std::string(name) + "'");
}

Sequence parse_digits(std::string_view text, std::optional<int> alphabet) {
  std::vector<Symbol> symbols;
  symbols.reserve(text.size());
  for (std::size_t i = 0; i < text.size(); ++i) {
    const unsigned char c = static_cast<unsigned char>(text[i]);
    if (std::isspace(c)) continue;
    if (c < '0' || c > '9') {
      throw ConfigError("non-digit character at offset " + std::to_string(i));
    }
    symbols.push_back(static_cast<Symbol>(c - '0'));
  }
  const Alphabet a = infer_alphabet(symbols, alphabet);
  return Sequence(std::move(symbols), a);
}

std::string to_digits(const Sequence& s) {
  if (s.alphabet().size > 10) {
    throw ConfigError("ascii-digits format supports alphabets of at most 10 symbols");
  }
  std::string out;
  out.reserve(s.size());
  for (Symbol v : s.symbols()) out.push_back(static_cast<char>('0' + v));
  return out;
}

Sequence read_sequence(const std::string& path, SymbolFormat format,
                       std::optional<int> alphabet) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "' for reading");
  std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (format == SymbolFormat::ascii_digits) return parse_digits(bytes, alphabet);
  std::vector<Symbol> symbols(bytes.begin(), bytes.end());
  const Alphabet a = infer_alphabet(symbols, alphabet);
  return Sequence(std::move(symbols), a);
}

void write_sequence(const std::string& path, const Sequence& s, SymbolFormat format) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  if (format == SymbolFormat::ascii_digits) {
    out << to_digits(s) << '\n';
  } else {
    out.write(reinterpret_cast<const char*>(s.symbols().data()),
              static_cast<std::streamsize>(s.size()));
  }
  if (!out) throw IoError("write to '" + path + "' failed");
}

}  // namespace fixslope
