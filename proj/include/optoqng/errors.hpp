#ifndef OPTOQNG_ERRORS_HPP
#define OPTOQNG_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace optoqng {

/// Base class of everything this library throws.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// A precondition on user-supplied input was violated.
class InvalidArgument : public Error {
public:
  using Error::Error;
};

/// A computation could not produce a trustworthy result.
class NumericalError : public Error {
public:
  using Error::Error;
};

/// The requested detection event has (numerically) zero probability.
class HeraldImpossible : public NumericalError {
public:
  using NumericalError::NumericalError;
};

class ConvergenceError : public NumericalError {
public:
  using NumericalError::NumericalError;
};

namespace detail {

inline void require(bool condition, const std::string& message) {
  if (!condition) throw InvalidArgument(message);
}

}  // namespace detail
}  // namespace optoqng

#endif  // OPTOQNG_ERRORS_HPP
