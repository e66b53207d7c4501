#pragma once

#include <stdexcept>
#include <string>

namespace cocoscan {

/// Failure categories. The numeric values double as CLI exit codes and as
/// C API status codes.
enum class ErrorKind : int {
  InvalidInput = 1,
  MissingResource = 2,
  NumericFailure = 3,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

struct InvalidInput : Error {
  explicit InvalidInput(const std::string& what)
      : Error(ErrorKind::InvalidInput, what) {}
};

struct MissingResource : Error {
  explicit MissingResource(const std::string& what)
      : Error(ErrorKind::MissingResource, what) {}
};

struct NumericFailure : Error {
  explicit NumericFailure(const std::string& what)
      : Error(ErrorKind::NumericFailure, what) {}
};

/// Re-raise `e` with `context` prepended, keeping its category.
[[noreturn]] inline void rethrow_with_context(const Error& e,
                                              const std::string& context) {
  const std::string msg = context + ": " + e.what();
  switch (e.kind()) {
    case ErrorKind::InvalidInput:
      throw InvalidInput(msg);
    case ErrorKind::MissingResource:
      throw MissingResource(msg);
    case ErrorKind::NumericFailure:
      throw NumericFailure(msg);
  }
  throw Error(e.kind(), msg);
}

}  // namespace cocoscan
