#pragma once

#include <stdexcept>
#include <string>

namespace iop {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DimensionError : public Error {
 public:
  using Error::Error;
};

class DomainMismatchError : public Error {
 public:
  using Error::Error;
};

class SingularMatrixError : public Error {
 public:
  using Error::Error;
};

// (I - GK) is not invertible, or the pair violates the properness
// assumptions that guarantee invertibility.
class IllPosedError : public Error {
 public:
  using Error::Error;
};

class ImproperPlantError : public Error {
 public:
  using Error::Error;
};

class InfiniteNormError : public Error {
 public:
  using Error::Error;
};

class UnstableParameterError : public Error {
 public:
  using Error::Error;
};

class MembershipError : public Error {
 public:
  using Error::Error;
};

class ParseError : public Error {
 public:
  using Error::Error;
};

// The truncated equality system has no exact solution at the requested order.
class InfeasibleError : public Error {
 public:
  InfeasibleError(const std::string& what, double residual) : Error(what), residual_(residual) {}
  double residual() const { return residual_; }

 private:
  double residual_;
};

}  // namespace iop
