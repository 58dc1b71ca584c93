#ifndef TAGPARSE_ERRORS_H_
#define TAGPARSE_ERRORS_H_

#include <cstddef>
#include <stdexcept>
#include <string>

namespace tagparse {

// Violated precondition of a public operation (length mismatch, empty input,
// out-of-range index, malformed label surface).
class ContractError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Malformed bracketed input. offset() is the byte offset into the text that
// was handed to the parser.
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, std::size_t offset)
      : std::runtime_error(what + " at offset " + std::to_string(offset)),
        offset_(offset) {}

  std::size_t offset() const { return offset_; }

 private:
  std::size_t offset_;
};

// Bad content in an input file; the message starts with "<file>:<line>:".
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Non-finite parameters, losses or gradients.
class NumericFault : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace tagparse

#endif  // TAGPARSE_ERRORS_H_
