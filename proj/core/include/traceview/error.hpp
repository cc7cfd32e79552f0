#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace traceview {

/// Base of every error raised by the engine.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed input bytes (XML, CSV).
class ParseError : public Error {
 public:
  using Error::Error;
};

/// Well-formed input that violates a domain invariant.
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// Lookup of an identifier that does not exist.
class NotFoundError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

class IoError : public Error {
 public:
  IoError(const std::string& message, std::string path)
      : Error(message), path_(std::move(path)) {}

  const std::string& path() const noexcept { return path_; }

 private:
  std::string path_;
};

/// A dataset source referenced by a snapshot could not be loaded.
class MissingDatasetError : public IoError {
 public:
  using IoError::IoError;
};

/// Scenario playback failed to position on a step.
class StepError : public Error {
 public:
  StepError(std::size_t step, std::string path, const std::string& reason)
      : Error("step " + std::to_string(step) + " (" + path + "): " + reason),
        step_(step),
        path_(std::move(path)) {}

  std::size_t step() const noexcept { return step_; }
  const std::string& path() const noexcept { return path_; }

 private:
  std::size_t step_;
  std::string path_;
};

}  // namespace traceview
