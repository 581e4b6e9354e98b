#ifndef UAVSWARM_ERRORS_HPP
#define UAVSWARM_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace uavswarm {

/// Coarse error classes. The CLI maps them onto process exit codes.
enum class ErrorClass {
  parameter = 2,
  parse = 3,
  io = 4,
  domain = 5,
  coverage = 6,
  infeasible = 7,
  solver = 8,
  state = 9,
  internal = 10,
};

const char* to_string(ErrorClass c);

class Error : public std::runtime_error {
public:
  Error(ErrorClass cls, const std::string& what)
      : std::runtime_error(what), cls_(cls) {}
  ErrorClass error_class() const noexcept { return cls_; }

private:
  ErrorClass cls_;
};

class ParameterError : public Error {
public:
  explicit ParameterError(const std::string& what) : Error(ErrorClass::parameter, what) {}
};

class DomainError : public Error {
public:
  explicit DomainError(const std::string& what) : Error(ErrorClass::domain, what) {}
};

/// Raised when a device cannot be reached by any UAV above the EH threshold,
/// or when a UAV cannot cover even the point directly below it.
class CoverageError : public Error {
public:
  CoverageError(const std::string& what, int device = -1)
      : Error(ErrorClass::coverage, what), device_(device) {}
  int device() const noexcept { return device_; }

private:
  int device_;
};

class BracketError : public Error {
public:
  explicit BracketError(const std::string& what) : Error(ErrorClass::solver, what) {}
};

/// Disc intersection is empty (projection failed to reach a feasible point).
class InfeasibleRegionError : public Error {
public:
  explicit InfeasibleRegionError(const std::string& what) : Error(ErrorClass::infeasible, what) {}
};

/// Every UAV violates the SNR bound for this device at its scheduled epoch.
class SnrInfeasibleError : public Error {
public:
  SnrInfeasibleError(const std::string& what, int device, int epoch)
      : Error(ErrorClass::infeasible, what), device_(device), epoch_(epoch) {}
  int device() const noexcept { return device_; }
  int epoch() const noexcept { return epoch_; }

private:
  int device_;
  int epoch_;
};

class FitError : public Error {
public:
  FitError(const std::string& what, double a, double b, double c)
      : Error(ErrorClass::solver, what), a_(a), b_(b), c_(c) {}
  double a() const noexcept { return a_; }
  double b() const noexcept { return b_; }
  double c() const noexcept { return c_; }

private:
  double a_, b_, c_;
};

class SolverError : public Error {
public:
  explicit SolverError(const std::string& what) : Error(ErrorClass::solver, what) {}
};

class StateError : public Error {
public:
  explicit StateError(const std::string& what) : Error(ErrorClass::state, what) {}
};

class ParseError : public Error {
public:
  ParseError(const std::string& what, int line = -1, std::string field = {})
      : Error(ErrorClass::parse, what), line_(line), field_(std::move(field)) {}
  int line() const noexcept { return line_; }
  const std::string& field() const noexcept { return field_; }

private:
  int line_;
  std::string field_;
};

class InternalError : public Error {
public:
  explicit InternalError(const std::string& what) : Error(ErrorClass::internal, what) {}
};

}  // namespace uavswarm

#endif
