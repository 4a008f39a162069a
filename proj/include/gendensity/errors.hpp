#pragma once

#include <stdexcept>
#include <string>

namespace gendensity {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Wrong vector length, out-of-range parameter, malformed configuration.
class InputError : public Error {
 public:
  using Error::Error;
};

/// Generator file could not be read or violates the interchange format.
class LoadError : public Error {
 public:
  using Error::Error;
};

class UnsupportedOperation : public Error {
 public:
  using Error::Error;
};

/// Non-finite values, SVD failure.
class NumericalError : public Error {
 public:
  using Error::Error;
};

/// Jacobian has rank 0 under the rank policy, so the induced density is undefined.
class DegeneratePointError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

/// Requested singular direction does not survive the rank policy.
class DegenerateDirectionError : public Error {
 public:
  using Error::Error;
};

/// A profile carries no usable samples.
class EmptyProfileError : public Error {
 public:
  using Error::Error;
};

/// Dip or decay cannot be formed from the available samples.
class ScoreUndefinedError : public Error {
 public:
  using Error::Error;
};

}  // namespace gendensity
