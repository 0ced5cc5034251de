#pragma once

#include <stdexcept>
#include <string>

namespace sosrelax {

// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A basis, degree or problem dimension exceeds a configured cap.
class SizeLimitError : public Error {
 public:
  using Error::Error;
};

// Vector or matrix dimensions do not agree.
class DimensionError : public Error {
 public:
  using Error::Error;
};

// Malformed numeric input (NaN/Inf, wrong sizes, violated preconditions).
class InvalidInput : public Error {
 public:
  using Error::Error;
};

// A polynomial piece failed SOS-convexity certification.
class CertificationError : public Error {
 public:
  using Error::Error;
};

// The conic solver did not reach its tolerances.
class SolverFailure : public Error {
 public:
  using Error::Error;
};

}  // namespace sosrelax
