#ifndef ARENA_ERRORS_H_
#define ARENA_ERRORS_H_

#include <stdexcept>
#include <string>

namespace arena {

// Precondition violations on numeric inputs (non-finite ratings, too few
// models, mismatched lengths).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

class NotFoundError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ConflictError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class UnavailableError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed input text. `line` is 1-based, or 0 when not line oriented.
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& message, std::size_t line = 0,
             std::string raw = {})
      : std::runtime_error(line ? "line " + std::to_string(line) + ": " + message
                                : message),
        line_(line),
        raw_(std::move(raw)) {}

  std::size_t line() const { return line_; }
  const std::string& raw() const { return raw_; }

 private:
  std::size_t line_;
  std::string raw_;
};

}  // namespace arena

#endif  // ARENA_ERRORS_H_
