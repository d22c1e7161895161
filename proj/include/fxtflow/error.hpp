#pragma once

#include <Eigen/Dense>

#include <stdexcept>
#include <string>

namespace fxt {

enum class ErrorKind {
  Validation,
  CertificateMissing,
  UnboundedObjective,
  Divergence,
  SingularHessian,
  InvalidProjection,
  Infeasible,
  DistributednessViolation,
  Configuration,
  Usage,
};

const char* to_string(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

/// Raised by the integrator when the state stops being finite.
class DivergenceError : public Error {
 public:
  DivergenceError(double time, const std::string& what)
      : Error(ErrorKind::Divergence, what), time_(time) {}

  double time() const noexcept { return time_; }

 private:
  double time_;
};

/// Raised when a Newton-type flow cannot factor the Hessian.
class SingularHessianError : public Error {
 public:
  SingularHessianError(Eigen::VectorXd state, const std::string& what)
      : Error(ErrorKind::SingularHessian, what), state_(std::move(state)) {}

  const Eigen::VectorXd& state() const noexcept { return state_; }

 private:
  Eigen::VectorXd state_;
};

[[noreturn]] void fail(ErrorKind kind, const std::string& what);

inline void require(bool condition, ErrorKind kind, const std::string& what) {
  if (!condition) fail(kind, what);
}

}  // namespace fxt
