#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <stdexcept>
#include <string>

namespace frlc {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

// Probability (or relaxed, non-negative) mass vector.
using Marginal = Vector;

enum class ErrorKind {
  DegenerateMarginal,
  ShapeMismatch,
  NotConverged,
  NonPositiveKernel,
  MissingIntraCost,
  NegativeOmega,
  InvalidRank,
  TooLarge,
  DimMismatch,
  ParseError,
  InvalidArgument,
};

const char* to_string(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

class NotConverged : public Error {
 public:
  NotConverged(const std::string& what, double residual, int iters)
      : Error(ErrorKind::NotConverged, what), residual_(residual), iters_(iters) {}

  double residual() const noexcept { return residual_; }
  int iters() const noexcept { return iters_; }

 private:
  double residual_;
  int iters_;
};

class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t line)
      : Error(ErrorKind::ParseError, what + " (line " + std::to_string(line) + ")"), line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) { throw Error(kind, what); }

inline void require_shape(bool ok, const std::string& what) {
  if (!ok) fail(ErrorKind::ShapeMismatch, what);
}

// Divisions by inner marginals use this floor; entries below kDegenerateMass are rejected.
inline constexpr double kMassFloor = 1e-300;
inline constexpr double kDegenerateMass = 1e-15;

}  // namespace frlc
