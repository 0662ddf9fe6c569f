#ifndef TOPSAMP_ERRORS_HPP
#define TOPSAMP_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace topsamp {

/// Base class for all library errors.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An argument lies outside the domain where an operation is defined.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// The correlation matrix of (u, u', u'') is not positive definite at a point.
class G2Violation : public Error {
 public:
  using Error::Error;
};

/// A coefficient covariance matrix is not positive semidefinite.
class FactorizationFailure : public Error {
 public:
  using Error::Error;
};

/// A local 3x3 covariance matrix is not positive definite.
class PdFailure : public Error {
 public:
  using Error::Error;
};

/// A density evaluated to NaN or infinity.
class NonFiniteDensity : public Error {
 public:
  using Error::Error;
};

/// A sampling density integrates to zero, so no equi-area grid exists.
class DegenerateDensity : public Error {
 public:
  using Error::Error;
};

/// Invalid or inconsistent experiment configuration.
class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace topsamp

#endif  // TOPSAMP_ERRORS_HPP
