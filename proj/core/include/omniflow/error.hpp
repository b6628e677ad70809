#pragma once

#include <stdexcept>
#include <string>

namespace omniflow {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid argument value (non-finite angle, unknown strategy, bad edges).
class ArgumentError : public Error {
 public:
  using Error::Error;
};

/// Raster dimensions that violate a contract (aspect, mismatch).
class ShapeError : public Error {
 public:
  using Error::Error;
};

/// Malformed on-disk content (bad magic, truncated payload, bad header).
class FormatError : public Error {
 public:
  using Error::Error;
};

/// File system failure (missing file, unwritable destination).
class IoError : public Error {
 public:
  using Error::Error;
};

/// Evaluation at a point where a map is undefined.
class SingularityError : public Error {
 public:
  using Error::Error;
};

/// Reduction over an empty set (empty mask, empty corpus, empty batch).
class EmptyInputError : public Error {
 public:
  using Error::Error;
};

}  // namespace omniflow
