#pragma once

#include <stdexcept>
#include <string>

namespace dsc {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Mesh and geometry.
class OrientationError : public Error { using Error::Error; };
class DegenerateCell : public Error { using Error::Error; };
class SingularCell : public Error { using Error::Error; };
class NonConformingMesh : public Error { using Error::Error; };
class InvalidParameter : public Error { using Error::Error; };

// Numerics.
class ZeroDenominator : public Error { using Error::Error; };
class ZeroDiagonal : public Error { using Error::Error; };
class NonFiniteState : public Error { using Error::Error; };

class NoConvergence : public Error {
 public:
  NoConvergence(const std::string& what, double residual)
      : Error(what), residual_(residual) {}
  double residual() const { return residual_; }

 private:
  double residual_;
};

// Input files.
class ConfigError : public Error { using Error::Error; };
class FormatError : public Error { using Error::Error; };

}  // namespace dsc
