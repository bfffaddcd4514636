#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace scenetext {

// Base for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Image dimensions or channel layout do not satisfy an operation's precondition.
class ShapeError : public Error {
 public:
  using Error::Error;
};

// Invalid detector / engine / CLI configuration.
class ConfigError : public Error {
 public:
  using Error::Error;
};

// Malformed structured-text document. line() is 1-based, 0 when unknown.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t line)
      : Error(line ? what + " (line " + std::to_string(line) + ")" : what), message_(what), line_(line) {}

  std::size_t line() const noexcept { return line_; }
  const std::string& message() const noexcept { return message_; }

 private:
  std::string message_;
  std::size_t line_;
};

// Well-formed document whose content violates an invariant.
class ValidationError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

// External OCR engine could not be launched.
class EngineError : public Error {
 public:
  using Error::Error;
};

}  // namespace scenetext
