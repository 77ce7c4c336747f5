// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 shearlab contributors

#pragma once

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace shearlab {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid construction parameters (filter orders, sampling constants, sizes).
class ConstraintError : public Error {
 public:
  using Error::Error;
};

/// Root finding during spectral factorization failed to converge.
class FactorizationError : public Error {
 public:
  FactorizationError(const std::string& what, double residual)
      : Error(what), residual_(residual) {}
  double residual() const noexcept { return residual_; }

 private:
  double residual_;
};

/// Raster or coefficient layout does not match the system.
class ShapeError : public Error {
 public:
  using Error::Error;
};

/// Coefficient index that does not belong to the system.
class ConsistencyError : public Error {
 public:
  using Error::Error;
};

/// Malformed on-disk container or config file.
class FormatError : public Error {
 public:
  using Error::Error;
};

/// Degenerate input to the rate fit.
class FitError : public Error {
 public:
  using Error::Error;
};

/// Iterative solver hit its iteration cap; carries the residual history.
class SolverError : public Error {
 public:
  SolverError(const std::string& what, std::vector<double> history)
      : Error(what), history_(std::move(history)) {}
  const std::vector<double>& residual_history() const noexcept { return history_; }

 private:
  std::vector<double> history_;
};

}  // namespace shearlab
