#pragma once

#include <stdexcept>
#include <string>

namespace imdtm {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Operands with incompatible truncation bounds.
class ShapeError : public Error {
 public:
  using Error::Error;
};

/// A requested derivative shift leaves no coefficients.
class EmptyResultError : public Error {
 public:
  using Error::Error;
};

/// Invalid leading coefficient for a nonlinear series function
/// (division by zero, log/sqrt/pow of a non-positive value).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Stencil target order exceeds what the interpolant can represent.
class CapacityError : public Error {
 public:
  using Error::Error;
};

/// Coincident or missing neighborhood offsets, or a singular interpolation problem.
class GeometryError : public Error {
 public:
  using Error::Error;
};

/// A recurrence was asked for a coefficient whose dependencies are outside the table.
class TruncationError : public Error {
 public:
  using Error::Error;
};

/// Invalid run or evolver configuration.
class ConfigError : public Error {
 public:
  ConfigError(std::string key, int line, const std::string& what)
      : Error(format(key, line, what)), key_(std::move(key)), line_(line) {}

  explicit ConfigError(const std::string& what) : Error(what) {}

  const std::string& key() const noexcept { return key_; }
  int line() const noexcept { return line_; }

 private:
  static std::string format(const std::string& key, int line, const std::string& what) {
    std::string out;
    if (line > 0) out += "line " + std::to_string(line) + ": ";
    if (!key.empty()) out += "'" + key + "': ";
    return out + what;
  }

  std::string key_;
  int line_ = 0;
};

}  // namespace imdtm
