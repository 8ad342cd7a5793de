#pragma once

#include <stdexcept>
#include <string>

namespace psmeta {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A clip network that violates a graph invariant (e.g. a clip with no way out).
class StructuralError : public Error {
 public:
  using Error::Error;
};

/// Unknown percept label, action label, preset name, ...
class LookupError : public Error {
 public:
  using Error::Error;
};

/// Operations called in the wrong order (learn before act).
class SequencingError : public Error {
 public:
  using Error::Error;
};

class InvalidActionError : public Error {
 public:
  using Error::Error;
};

class MapError : public Error {
 public:
  using Error::Error;
};

/// Config parse/validation failure. `line` is 0 when the error is not tied to a line.
class ConfigError : public Error {
 public:
  ConfigError(const std::string& message, std::size_t line = 0, std::string key = {})
      : Error(format(message, line, key)), line_(line), key_(std::move(key)) {}

  std::size_t line() const noexcept { return line_; }
  const std::string& key() const noexcept { return key_; }

 private:
  static std::string format(const std::string& message, std::size_t line, const std::string& key) {
    std::string out;
    if (line != 0) out += "line " + std::to_string(line) + ": ";
    if (!key.empty()) out += "key '" + key + "': ";
    return out + message;
  }

  std::size_t line_;
  std::string key_;
};

}  // namespace psmeta
