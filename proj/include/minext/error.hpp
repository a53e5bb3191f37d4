#pragma once

#include <stdexcept>
#include <string>

namespace minext {

/// Input violates a documented precondition (CLI exit code 2).
class ValidationError : public std::invalid_argument {
 public:
  explicit ValidationError(const std::string& what) : std::invalid_argument(what) {}
};

/// A hard size guard was exceeded (CLI exit code 3).
class GuardError : public std::length_error {
 public:
  explicit GuardError(const std::string& what) : std::length_error(what) {}
};

namespace detail {

inline void require(bool ok, const char* message) {
  if (!ok) throw ValidationError(message);
}

inline void require(bool ok, const std::string& message) {
  if (!ok) throw ValidationError(message);
}

}  // namespace detail
}  // namespace minext
