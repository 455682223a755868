#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>

namespace t2veval {

/// Base class for every error raised by the harness.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed input text. `line()` is 1-based; 0 when not line-oriented.
class ParseError : public Error {
 public:
  ParseError(const std::string& source, std::size_t line, const std::string& message)
      : Error(source + ":" + std::to_string(line) + ": " + message), line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

/// A well-formed record that breaks a domain invariant.
class ValidationError : public Error {
 public:
  ValidationError(std::string record_id, std::string field, const std::string& message)
      : Error("record '" + record_id + "', field '" + field + "': " + message),
        record_id_(std::move(record_id)),
        field_(std::move(field)) {}
  const std::string& record_id() const { return record_id_; }
  const std::string& field() const { return field_; }

 private:
  std::string record_id_;
  std::string field_;
};

/// Bad configuration detected before any work starts (unbound slot, bad flag value, ...).
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// A backend failed on a particular input.
class BackendError : public Error {
 public:
  explicit BackendError(const std::string& message, std::optional<std::size_t> frame = std::nullopt)
      : Error(frame ? message + " (frame " + std::to_string(*frame) + ")" : message), frame_(frame) {}
  std::optional<std::size_t> frame_index() const { return frame_; }

 private:
  std::optional<std::size_t> frame_;
};

/// Transient failure (timeout, connection reset). Safe to retry the whole call.
class RetryableError : public Error {
 public:
  using Error::Error;
};

/// Video could not be opened or decoded.
class MediaError : public Error {
 public:
  using Error::Error;
};

}  // namespace t2veval
