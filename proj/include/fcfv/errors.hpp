#pragma once

#include <stdexcept>
#include <string>

#include "fcfv/types.hpp"

namespace fcfv {

class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Invalid topology, unsupported cell type or malformed mesh input.
class MeshError : public Error {
public:
  using Error::Error;
};

/// A cell whose volume, face measure or local matrix has collapsed.
class DegenerateCellError : public MeshError {
public:
  DegenerateCellError(Index cell, const std::string& what)
      : MeshError("cell " + std::to_string(cell) + ": " + what), cell_(cell) {}

  Index cell() const noexcept { return cell_; }

private:
  Index cell_;
};

class SolverError : public Error {
public:
  SolverError(const std::string& what, double residual = -1.0)
      : Error(what), residual_(residual) {}

  /// Achieved relative residual, or a negative value when the factorization itself failed.
  double residual() const noexcept { return residual_; }

private:
  double residual_;
};

class ConfigError : public Error {
public:
  using Error::Error;
};

}  // namespace fcfv
