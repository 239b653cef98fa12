#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "spaceform/linalg.hpp"

namespace spaceform {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Point outside a model domain or inside a puncture guard zone.
class DomainError : public Error {
 public:
  using Error::Error;
};

class NoConvergence : public Error {
 public:
  using Error::Error;
};

class InvalidFrame : public Error {
 public:
  using Error::Error;
};

class InvalidInput : public Error {
 public:
  using Error::Error;
};

/// Metric matrix failed the Hermitian positive-definite check.
class NotPositiveDefinite : public Error {
 public:
  using Error::Error;
};

class PathExitsDomain : public Error {
 public:
  PathExitsDomain(const std::string& what, CVec exit_point)
      : Error(what), exit_point_(std::move(exit_point)) {}
  const CVec& exit_point() const { return exit_point_; }

 private:
  CVec exit_point_;
};

/// A fractional-linear action hit its pole; for c > 0 this asks for a chart switch.
class ChartSwitch : public Error {
 public:
  using Error::Error;
};

class NotSpaceForm : public Error {
 public:
  using Error::Error;
};

class StepTooLarge : public Error {
 public:
  using Error::Error;
};

class ContinuationNeeded : public Error {
 public:
  using Error::Error;
};

class UnreachableSamples : public Error {
 public:
  UnreachableSamples(const std::string& what, std::vector<std::size_t> which)
      : Error(what), samples_(std::move(which)) {}
  const std::vector<std::size_t>& samples() const { return samples_; }

 private:
  std::vector<std::size_t> samples_;
};

class NotHolomorphic : public Error {
 public:
  NotHolomorphic(const std::string& what, double residual)
      : Error(what), residual_(residual) {}
  double residual() const { return residual_; }

 private:
  double residual_;
};

class GeometryError : public Error {
 public:
  using Error::Error;
};

class ParseError : public Error {
 public:
  ParseError(const std::string& what, int line, int column, std::vector<std::string> expected)
      : Error(what), line_(line), column_(column), expected_(std::move(expected)) {}
  int line() const { return line_; }
  int column() const { return column_; }
  const std::vector<std::string>& expected() const { return expected_; }

 private:
  int line_;
  int column_;
  std::vector<std::string> expected_;
};

class TypeError : public Error {
 public:
  TypeError(const std::string& what, int column) : Error(what), column_(column) {}
  int column() const { return column_; }

 private:
  int column_;
};

class EvalError : public Error {
 public:
  EvalError(const std::string& what, CVec point) : Error(what), point_(std::move(point)) {}
  const CVec& point() const { return point_; }

 private:
  CVec point_;
};

class UnknownEntry : public Error {
 public:
  using Error::Error;
};

}  // namespace spaceform
