#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>

namespace ivss {

// Root of every error the library throws. Callers that only need
// "something went wrong with the data" catch this.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed input bytes. Carries the byte offset where parsing stopped when known.
class ParseError : public Error {
 public:
  explicit ParseError(const std::string& what, std::optional<std::uint64_t> offset = std::nullopt)
      : Error(offset ? what + " (at byte " + std::to_string(*offset) + ")" : what), offset_(offset) {}
  std::optional<std::uint64_t> offset() const { return offset_; }

 private:
  std::optional<std::uint64_t> offset_;
};

class TruncatedError : public ParseError {
 public:
  TruncatedError(const std::string& what, std::uint64_t offset) : ParseError(what, offset) {}
};

class UnsupportedError : public Error {
 public:
  using Error::Error;
};

class EmptySourceError : public Error {
 public:
  using Error::Error;
};

class DimensionMismatchError : public Error {
 public:
  using Error::Error;
};

class EmptyFrameError : public Error {
 public:
  using Error::Error;
};

// Invalid parameter value (tau out of range, negative weight, ...).
class ConfigError : public Error {
 public:
  using Error::Error;
};

// Two objects computed under different configurations were combined.
class ConfigMismatchError : public Error {
 public:
  using Error::Error;
};

// Unparseable or invalid feature selection string. A usage error at the CLI.
class SelectionError : public ConfigError {
 public:
  using ConfigError::ConfigError;
};

class VersionError : public Error {
 public:
  using Error::Error;
};

class EmptyIndexError : public Error {
 public:
  using Error::Error;
};

class NotFoundError : public Error {
 public:
  using Error::Error;
};

}  // namespace ivss
