#pragma once

#include <stdexcept>
#include <string>

namespace kp5 {

enum class ErrorKind {
  Dimension,     // array shapes do not match the grid
  Domain,        // argument outside the mathematical domain (e.g. xi = 0)
  Precondition,  // caller violated a documented precondition
  Convergence,   // iteration failed to contract
  Resolution,    // quadrature or interpolation under-resolved
  Io,
  Usage,
};

inline const char* to_string(ErrorKind k) {
  switch (k) {
    case ErrorKind::Dimension: return "dimension";
    case ErrorKind::Domain: return "domain";
    case ErrorKind::Precondition: return "precondition";
    case ErrorKind::Convergence: return "convergence";
    case ErrorKind::Resolution: return "resolution";
    case ErrorKind::Io: return "io";
    case ErrorKind::Usage: return "usage";
  }
  return "unknown";
}

/// Structured error carried by every failing operation in the library.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace kp5
