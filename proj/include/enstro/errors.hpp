#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace enstro {

/// Base for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid grid, solver or optimizer configuration.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Argument outside the mathematical domain of an operation.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Grid too coarse for the viscous shock width.
class ResolutionError : public Error {
 public:
  ResolutionError(const std::string& what, std::size_t required_points)
      : Error(what), required_points_(required_points) {}

  std::size_t required_points() const noexcept { return required_points_; }

 private:
  std::size_t required_points_;
};

/// Non-finite state produced by time stepping.
class BlowUpError : public Error {
 public:
  BlowUpError(const std::string& what, double last_valid_time)
      : Error(what), last_valid_time_(last_valid_time) {}

  double last_valid_time() const noexcept { return last_valid_time_; }

 private:
  double last_valid_time_;
};

/// Hopf-Cole potential left the representable range.
class UnderflowError : public Error {
 public:
  using Error::Error;
};

/// Input for which a ratio or normalization is undefined.
class DegenerateInputError : public Error {
 public:
  using Error::Error;
};

/// A constructed datum failed one of its certified shape properties.
class ConstructionError : public Error {
 public:
  using Error::Error;
};

/// Unknown registry entry.
class LookupError : public Error {
 public:
  using Error::Error;
};

}  // namespace enstro
