#pragma once

#include <stdexcept>
#include <string>

namespace rlab {

// Root of every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Wrong key length, block length, or ciphertext length.
class LengthError : public Error {
 public:
  using Error::Error;
};

// Padding bytes did not decode. After a CBC/ECB decrypt this usually means
// the wrong key or IV.
class PaddingError : public Error {
 public:
  using Error::Error;
};

// Entropy source failed to deliver bytes.
class EntropyError : public Error {
 public:
  using Error::Error;
};

class BmpError : public Error {
 public:
  using Error::Error;
};

class BmpMagicError : public BmpError {
 public:
  using BmpError::BmpError;
};

class BmpUnsupportedError : public BmpError {
 public:
  using BmpError::BmpError;
};

class BmpTruncatedError : public BmpError {
 public:
  using BmpError::BmpError;
};

}  // namespace rlab
