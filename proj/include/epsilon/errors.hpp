#pragma once

#include <stdexcept>
#include <string>

namespace eps {

// Instance text rejected by the reader. Positions are 1-based.
struct ParseError : std::runtime_error {
  int line;
  int col;
  ParseError(const std::string& msg, int line_, int col_)
      : std::runtime_error(msg + " at " + std::to_string(line_) + ":" +
                           std::to_string(col_)),
        line(line_),
        col(col_) {}
};

// A bounded search ran out of budget before reaching a verdict.
struct FuelExhausted : std::runtime_error {
  explicit FuelExhausted(const std::string& what_ran_out)
      : std::runtime_error("fuel exhausted: " + what_ran_out) {}
};

// A produced answer failed its independent check.
struct VerificationError : std::runtime_error {
  explicit VerificationError(const std::string& msg)
      : std::runtime_error(msg) {}
};

// A state the construction's invariants rule out. Reaching one is a bug
// in this engine, never in the instance.
struct InternalError : std::logic_error {
  explicit InternalError(const std::string& msg) : std::logic_error(msg) {}
};

}  // namespace eps
