#pragma once

#include <functional>
#include <stdexcept>
#include <string>

namespace csqpt {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Mismatched or out-of-range Hilbert-space dimensions.
class DimensionError : public Error {
 public:
  using Error::Error;
};

/// Input violates a documented precondition (non-unitary gate, bad params...).
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// Measurement data cannot be used as given.
class DataError : public Error {
 public:
  using Error::Error;
};

/// A numerical consistency check failed.
class NumericalError : public Error {
 public:
  using Error::Error;
};

using WarningHandler = std::function<void(const std::string&)>;

/// Installs the sink for non-fatal warnings; the default prints to stderr.
/// Returns the previous handler.
WarningHandler set_warning_handler(WarningHandler handler);
void warn(const std::string& message);

}  // namespace csqpt
