#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace mple {

/// Base for every domain error the library raises.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed input text; carries a 1-based line/column.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t line, std::size_t column)
      : Error(what + " at line " + std::to_string(line) + ", column " +
              std::to_string(column)),
        line_(line),
        column_(column) {}

  /// Schema violation located by a JSON pointer; line/column are 0.
  ParseError(const std::string& what, const std::string& pointer)
      : Error(what + " at " + (pointer.empty() ? std::string("/") : pointer)),
        line_(0),
        column_(0) {}

  std::size_t line() const noexcept { return line_; }
  std::size_t column() const noexcept { return column_; }

 private:
  std::size_t line_;
  std::size_t column_;
};

/// Tree violates the node nesting rules.
class StructuralError : public Error {
 public:
  using Error::Error;
};

/// Incomplete or inconsistent component binding.
class BindingError : public Error {
 public:
  using Error::Error;
};

/// A clone-class member cannot be expressed by the component template.
class ExtractionError : public Error {
 public:
  ExtractionError(const std::string& what, unsigned member)
      : Error(what), member_(member) {}
  unsigned member() const noexcept { return member_; }

 private:
  unsigned member_;
};

/// Caller broke an operation's precondition.
class PreconditionError : public Error {
 public:
  using Error::Error;
};

/// Benchmark seed cannot host the requested clones.
class CapacityError : public Error {
 public:
  using Error::Error;
};

/// Lookup of an unknown variant, node, feature or component.
class LookupError : public Error {
 public:
  using Error::Error;
};

}  // namespace mple
