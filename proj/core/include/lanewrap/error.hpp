#pragma once

#include <stdexcept>
#include <string>

namespace lanewrap {

// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ParseError : public Error {
 public:
  using Error::Error;
};

class ValidationError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

class GeometryError : public Error {
 public:
  using Error::Error;
};

class LaneAssignmentError : public Error {
 public:
  using Error::Error;
};

class PredictorError : public Error {
 public:
  using Error::Error;
};

/// Raised when an external predictor violates the line protocol, times out,
/// or exits. `detail()` carries whatever the child wrote to stderr.
class ProtocolError : public PredictorError {
 public:
  ProtocolError(const std::string& what, std::string child_stderr = {})
      : PredictorError(what), stderr_(std::move(child_stderr)) {}
  const std::string& child_stderr() const noexcept { return stderr_; }

 private:
  std::string stderr_;
};

class NormalizationError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace lanewrap
