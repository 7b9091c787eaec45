#pragma once

#include <stdexcept>
#include <string>

namespace propopt {

// Error hierarchy. The CLI maps InvalidInput/FormatError to exit code 2 and
// numerical failures (SingularSystem, InvalidGeometry, InvalidPhysics) to 3.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct InvalidParameter : Error {
  using Error::Error;
};

struct InvalidInput : Error {
  using Error::Error;
};

struct InvalidGeometry : Error {
  using Error::Error;
};

struct SingularSystem : Error {
  using Error::Error;
};

struct InvalidPhysics : Error {
  using Error::Error;
};

struct FormatError : Error {
  using Error::Error;
};

struct UnsupportedVersion : FormatError {
  using FormatError::FormatError;
};

}  // namespace propopt
