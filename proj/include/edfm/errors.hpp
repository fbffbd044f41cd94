#pragma once

#include <stdexcept>
#include <string>

namespace edfm {

/// Invalid or inconsistent user input (dimensions, properties, references).
class ConfigError : public std::runtime_error
{
 public:
  using std::runtime_error::runtime_error;
};

/// Degenerate geometry: zero-volume cells, cuts that do not separate nodes, ...
class GeometryError : public std::runtime_error
{
 public:
  using std::runtime_error::runtime_error;
};

/// Argument outside the domain of a reference formula or fit.
class DomainError : public std::runtime_error
{
 public:
  using std::runtime_error::runtime_error;
};

class ScheduleError : public std::runtime_error
{
 public:
  using std::runtime_error::runtime_error;
};

/// Failure of a nonlinear solve (local return mapping or global Newton).
class ConvergenceError : public std::runtime_error
{
 public:
  ConvergenceError(const std::string& what, double last_residual)
      : std::runtime_error(what), last_residual_(last_residual)
  {}
  [[nodiscard]] double last_residual() const { return last_residual_; }

 private:
  double last_residual_;
};

/// Local contact state combination the solver does not handle (for example an
/// open fracture sharing an element with a second fracture).
class UnsupportedStateError : public std::runtime_error
{
 public:
  UnsupportedStateError(const std::string& what, int cell) : std::runtime_error(what), cell_(cell) {}
  [[nodiscard]] int cell() const { return cell_; }

 private:
  int cell_;
};

}  // namespace edfm
