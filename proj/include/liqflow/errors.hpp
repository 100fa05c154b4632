#pragma once

#include <stdexcept>
#include <string>

namespace liqflow {

/// Base class for all library errors.
class error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Numerical degeneracy: non-positive-definite Gram, degree collapse,
/// singular system. CLI maps this to exit code 3.
class degenerate_error : public error {
 public:
  using error::error;
};

/// Kronrod extension failed (complex stage-2 nodes or negative weights).
class kronrod_infeasible : public degenerate_error {
 public:
  using degenerate_error::degenerate_error;
};

/// Malformed input data (CSV parse failures carry a line number).
/// CLI maps this to exit code 2.
class data_error : public error {
 public:
  using error::error;
};

}  // namespace liqflow
