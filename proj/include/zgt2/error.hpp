#pragma once

#include <stdexcept>
#include <string>

namespace zgt2 {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A parameter lies outside the domain of the formula that consumes it.
class ParameterDomainError : public Error {
 public:
  using Error::Error;
};

/// Vector or matrix dimensions disagree.
class ShapeError : public Error {
 public:
  using Error::Error;
};

/// Invalid model, training or experiment configuration.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Unreadable, malformed or unusable dataset.
class DataError : public Error {
 public:
  using Error::Error;
};

/// Training produced a non-finite loss or gradient.
class DivergenceError : public Error {
 public:
  DivergenceError(const std::string& what, std::string group)
      : Error(what), group_(std::move(group)) {}

  /// Name of the parameter group that was non-finite (or largest in magnitude).
  const std::string& group() const noexcept { return group_; }

 private:
  std::string group_;
};

}  // namespace zgt2
