#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace tiedpools {

// Input that violates a documented precondition or data invariant.
class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// The comparison graph splits into several components, so strengths are not
// comparable across them.
class DisconnectedError : public ValidationError {
 public:
  explicit DisconnectedError(std::vector<std::vector<std::string>> components);

  const std::vector<std::vector<std::string>>& components() const { return components_; }

 private:
  std::vector<std::vector<std::string>> components_;
};

// A linear system that should have been solvable turned out singular.
class SingularSystemError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed input file. Line and column are 1-based; 0 means unknown.
class ParseError : public std::runtime_error {
 public:
  ParseError(std::string source, std::size_t line, std::size_t column, const std::string& message);

  const std::string& source() const { return source_; }
  std::size_t line() const { return line_; }
  std::size_t column() const { return column_; }

 private:
  std::string source_;
  std::size_t line_;
  std::size_t column_;
};

}  // namespace tiedpools
