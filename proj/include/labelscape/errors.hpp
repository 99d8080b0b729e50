#pragma once

#include <stdexcept>
#include <string>

namespace labelscape {

/// Base of every error thrown by the library.
class error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid argument or configuration value.
class parameter_error : public error {
 public:
  using error::error;
};

/// A landscape or graph violates its structural invariants.
class structural_error : public error {
 public:
  using error::error;
};

/// A binary-only operation received a multi-class sequence.
class not_binary_error : public error {
 public:
  using error::error;
};

/// Not enough bits for the requested test configuration.
class insufficient_data_error : public error {
 public:
  using error::error;
};

/// Block length outside the tabulated constants.
class unsupported_parameter_error : public error {
 public:
  using error::error;
};

/// Malformed or invalid input file. Carries the 1-based row when known.
class load_error : public error {
 public:
  load_error(const std::string& what, long row = -1)
      : error(row >= 0 ? what + " (row " + std::to_string(row) + ")" : what), row_(row) {}
  long row() const noexcept { return row_; }

 private:
  long row_;
};

class join_error : public error {
 public:
  using error::error;
};

/// Correlation requested on a series with zero variance.
class undefined_correlation_error : public error {
 public:
  using error::error;
};

}  // namespace labelscape
