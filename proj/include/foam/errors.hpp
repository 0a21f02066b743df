#pragma once

#include <stdexcept>
#include <string>

namespace foam {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Invalid user-supplied parameter or infeasible request.
struct ParamError : Error {
  using Error::Error;
};

/// Inconsistent configuration (dimension mismatches, bad schemas).
struct ConfigError : Error {
  using Error::Error;
};

/// An iteration guard tripped; message carries a state dump.
struct ConvergenceError : Error {
  using Error::Error;
};

struct IoError : Error {
  using Error::Error;
};

}  // namespace foam
