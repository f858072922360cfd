#pragma once

#include <stdexcept>
#include <string>

namespace hlsm {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Shapes that do not line up (tensor dims, matrix sizes, rank vs. dimension).
class DimensionError : public Error {
 public:
  using Error::Error;
};

/// Malformed or out-of-contract input data (non-binary adjacency, bad file, ...).
class DataError : public Error {
 public:
  using Error::Error;
};

/// A retraction or factorization lost rank.
class RankDeficiencyError : public Error {
 public:
  using Error::Error;
};

/// Inputs for which a quantity is undefined (zero tensor, single-class AUC, ...).
class DegenerateInputError : public Error {
 public:
  using Error::Error;
};

/// NaN loss, failed solve, or similar numerical breakdown.
class NumericalError : public Error {
 public:
  using Error::Error;
};

}  // namespace hlsm
