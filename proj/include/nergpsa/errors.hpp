#pragma once

#include <stdexcept>
#include <string>

namespace nergpsa {

// Error categories map one-to-one onto CLI exit codes.
enum class ErrorKind { validation = 2, numerical = 3, io = 4 };

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }
  int exit_code() const noexcept { return static_cast<int>(kind_); }

 private:
  ErrorKind kind_;
};

// Violated input invariant, domain or configuration problem.
class ValidationError : public Error {
 public:
  explicit ValidationError(const std::string& what) : Error(ErrorKind::validation, what) {}
};

class NumericalError : public Error {
 public:
  explicit NumericalError(const std::string& what) : Error(ErrorKind::numerical, what) {}
};

class IoError : public Error {
 public:
  explicit IoError(const std::string& what) : Error(ErrorKind::io, what) {}
};

// m0 == 0: spectral ratios and x_rms are undefined.
class DegenerateSpectrumError : public NumericalError {
 public:
  explicit DegenerateSpectrumError(const std::string& what)
      : NumericalError("degenerate spectrum: " + what) {}
};

// Extrapolation anchor bin holds fewer than two grid samples.
class AnchorError : public ValidationError {
 public:
  explicit AnchorError(const std::string& what) : ValidationError("anchor error: " + what) {}
};

class DomainError : public ValidationError {
 public:
  explicit DomainError(const std::string& what) : ValidationError("domain error: " + what) {}
};

class ConfigError : public ValidationError {
 public:
  explicit ConfigError(const std::string& what) : ValidationError("configuration error: " + what) {}
};

}  // namespace nergpsa
