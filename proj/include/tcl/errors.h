#ifndef TCL_ERRORS_H_
#define TCL_ERRORS_H_

#include <stdexcept>
#include <string>

namespace tcl {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed corpus input. Carries the 1-based line number when known.
class ParseError : public Error {
 public:
  ParseError(const std::string &what, size_t line)
      : Error("line " + std::to_string(line) + ": " + what), line_(line) {}
  explicit ParseError(const std::string &what) : Error(what), line_(0) {}
  size_t line() const { return line_; }

 private:
  size_t line_;
};

// A label that does not belong to the requested scheme or label set.
class SchemeError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

// Tensor shapes disagree with a config, label set or vocabulary.
class ShapeError : public Error {
 public:
  using Error::Error;
};

class NumericError : public Error {
 public:
  using Error::Error;
};

class CheckpointError : public Error {
 public:
  using Error::Error;
};

class CheckpointVersionError : public CheckpointError {
 public:
  using CheckpointError::CheckpointError;
};

}  // namespace tcl

#endif  // TCL_ERRORS_H_
