#pragma once

#include <stdexcept>
#include <string>

namespace vidcut {

// Base for every error raised by the library. The subclasses line up with the
// CLI exit codes (IoError -> 2, ConfigError -> 3, MismatchError -> 4).
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Unreadable/unwritable files and malformed on-disk encodings.
class IoError : public Error {
 public:
  using Error::Error;
};

// Invalid parameters or missing companion files (e.g. feature sidecars).
class ConfigError : public Error {
 public:
  using Error::Error;
};

// Inputs that are individually valid but disagree with each other:
// dimensions, frame counts, video ids, schema violations.
class MismatchError : public Error {
 public:
  using Error::Error;
};

// Numerical failures: non-finite values, zero-norm vectors, eigensolver
// non-convergence.
class NumericError : public Error {
 public:
  using Error::Error;
};

// A bipartition with one empty side.
class DegeneratePartition : public Error {
 public:
  DegeneratePartition() : Error("degenerate partition") {}
};

// A paste transform moved the whole mask out of the frame.
class EmptyPaste : public Error {
 public:
  EmptyPaste() : Error("transformed mask is empty") {}
};

}  // namespace vidcut
