#pragma once

#include <stdexcept>
#include <string>

namespace dum {

// Shape disagreement between operands (matmul, elementwise binary ops,
// model input vs. network width).
class DimensionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Input outside an operation's mathematical domain (log of a non-positive
// entry, degenerate variance in a t-test).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Malformed input file. Carries 1-based row/column when known.
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, long row = -1, long column = -1)
      : std::runtime_error(what), row(row), column(column) {}
  long row;
  long column;
};

// Training aborted: non-finite loss or gradient.
class DivergenceError : public std::runtime_error {
 public:
  DivergenceError(const std::string& what, int epoch = -1, long step = -1)
      : std::runtime_error(what), epoch(epoch), step(step) {}
  int epoch;
  long step;
};

// Unreadable or version-incompatible checkpoint.
class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace dum
