#pragma once

#include <stdexcept>
#include <string>

namespace satcrb {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The information matrix cannot be inverted reliably (unidentifiable geometry).
class SingularInformation : public Error {
 public:
  using Error::Error;
};

/// A closed-form bound is undefined for the requested parameters.
class DegenerateGeometry : public Error {
 public:
  using Error::Error;
};

/// No parameter value in the search range reaches the requested coverage.
class Unachievable : public Error {
 public:
  using Error::Error;
};

/// Too few satellites are visible for the requested estimation problem.
class InsufficientCoverage : public Error {
 public:
  using Error::Error;
};

class InvalidConfig : public Error {
 public:
  using Error::Error;
};

/// Planar sensors are all collinear with the source.
class CollinearSensors : public Error {
 public:
  using Error::Error;
};

}  // namespace satcrb
