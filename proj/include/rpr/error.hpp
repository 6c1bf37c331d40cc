#pragma once

#include <stdexcept>
#include <string>

namespace rpr {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Platform side lengths violate the triangle inequality.
class DegeneratePlatform : public Error {
 public:
  using Error::Error;
};

/// A leg length vanishes where a derivative is requested.
class DegenerateConfiguration : public Error {
 public:
  using Error::Error;
};

/// Both slice polynomials share a factor; no finite cusp set exists.
class DegenerateSlice : public Error {
 public:
  using Error::Error;
};

/// A polynomial operation was handed an input outside its domain.
class PolynomialError : public Error {
 public:
  using Error::Error;
};

}  // namespace rpr
