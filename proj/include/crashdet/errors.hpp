#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace crashdet {

/// Base of every error raised by the toolkit.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid configuration or precondition violation detected before any work.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Bad input data or a failure while processing it.
class DataError : public Error {
 public:
  using Error::Error;
};

class DimensionError : public Error {
 public:
  using Error::Error;
};

class NotReadyError : public DataError {
 public:
  using DataError::DataError;
};

/// A sample carried NaN or Inf in one of its inertial channels.
class NonFiniteSampleError : public DataError {
 public:
  NonFiniteSampleError(std::string channel, double t);

  const std::string& channel() const noexcept { return channel_; }
  double time() const noexcept { return t_; }

 private:
  std::string channel_;
  double t_;
};

/// Malformed trace, label, or key-value file. Line numbers are 1-based;
/// column is empty when the problem is not tied to one field.
class ParseError : public DataError {
 public:
  ParseError(const std::string& what, std::size_t line, std::string column = {});

  std::size_t line() const noexcept { return line_; }
  const std::string& column() const noexcept { return column_; }

 private:
  std::size_t line_;
  std::string column_;
};

class FitError : public DataError {
 public:
  using DataError::DataError;
};

/// Nominal and crash score envelopes overlap, so no threshold separates them.
class CalibrationError : public DataError {
 public:
  CalibrationError(double normal_max, double crash_min);

  double normal_max() const noexcept { return normal_max_; }
  double crash_min() const noexcept { return crash_min_; }

 private:
  double normal_max_;
  double crash_min_;
};

}  // namespace crashdet
