#pragma once

#include <stdexcept>
#include <string>

namespace tunnel {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Argument outside the operation's domain.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// A spectral component at or above the barrier top was requested.
class OverBarrierComponent : public Error {
 public:
  using Error::Error;
};

/// The flux has not decayed at the ends of the time window.
class WindowTooNarrow : public Error {
 public:
  using Error::Error;
};

/// A denominator (integrated flux) is too small to trust.
class UnreliableStatistic : public Error {
 public:
  using Error::Error;
};

/// Non-finite or inconsistent numerical result.
class NumericalError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  ConfigError(std::string key, int line, const std::string& what)
      : Error(format(key, line, what)), key_(std::move(key)), line_(line) {}

  const std::string& key() const { return key_; }
  int line() const { return line_; }

 private:
  static std::string format(const std::string& key, int line, const std::string& what) {
    std::string out = "config error";
    if (line > 0) out += " at line " + std::to_string(line);
    if (!key.empty()) out += " [" + key + "]";
    return out + ": " + what;
  }

  std::string key_;
  int line_;
};

}  // namespace tunnel
