#pragma once

#include <stdexcept>
#include <string>

namespace canonlab {

/// Raised when caller-supplied data breaks a documented precondition
/// (mismatched spaces, negative weights, out-of-range parameters, ...).
class InvalidInput : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Raised when a parsed document or term is malformed. `position` is a
/// character offset for term text or a JSON pointer for documents.
class ParseError : public InvalidInput {
 public:
  ParseError(const std::string& what, std::string position)
      : InvalidInput(what + " at " + position), position_(std::move(position)) {}

  const std::string& position() const noexcept { return position_; }

 private:
  std::string position_;
};

}  // namespace canonlab
