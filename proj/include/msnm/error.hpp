#pragma once

#include <stdexcept>
#include <string>

namespace msnm {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Bad caller input: malformed data, out-of-range parameters, schema
/// mismatches. The CLI maps these to exit code 2.
class ValidationError : public Error {
 public:
  using Error::Error;
};

}  // namespace msnm
