#ifndef FIXSLOPE_ERRORS_HPP_
#define FIXSLOPE_ERRORS_HPP_

#include <cstddef>
#include <stdexcept>
#include <string>

namespace fixslope {

// Caller broke a documented precondition (mismatched lengths, unnormalized
// matrix, inconsistent bookkeeping).
class ContractViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

// Invalid user-supplied configuration (non-positive lambda_max, bad alphabet).
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Sequence shorter than the k+1 symbols a trellis state needs.
class InputTooShort : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Enumeration or LP size above the configured cap. The CLI maps this to exit 3.
class BudgetExceeded : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed bitstream. `position()` is the byte offset where decoding failed.
class DecodeError : public std::runtime_error {
 public:
  DecodeError(const std::string& what, std::size_t position)
      : std::runtime_error(what + " (at byte " + std::to_string(position) + ")"),
        position_(position) {}
  std::size_t position() const { return position_; }

 private:
  std::size_t position_;
};

}  // namespace fixslope

#endif  // FIXSLOPE_ERRORS_HPP_
