#ifndef FIXSLOPE_SEQUENCE_IO_HPP_
#define FIXSLOPE_SEQUENCE_IO_HPP_

#include <optional>
#include <string>
#include <string_view>

#include "fixslope/count_model.hpp"

namespace fixslope {

enum class SymbolFormat {
  raw_bytes,     // one symbol per byte
  ascii_digits,  // '0'..'9', whitespace ignored
};

SymbolFormat parse_symbol_format(std::string_view name);

// Parses ASCII digits. The alphabet defaults to max symbol + 1 (at least 2).
Sequence parse_digits(std::string_view text, std::optional<int> alphabet = std::nullopt);
std::string to_digits(const Sequence& s);

Sequence read_sequence(const std::string& path, SymbolFormat format,
                       std::optional<int> alphabet = std::nullopt);
void write_sequence(const std::string& path, const Sequence& s, SymbolFormat format);

}  // namespace fixslope

#endif  // FIXSLOPE_SEQUENCE_IO_HPP_
