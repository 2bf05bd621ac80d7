#pragma once

#include <stdexcept>
#include <string>

namespace rddg {

/// Error families map 1:1 onto CLI exit codes.
enum class ErrorFamily { config = 2, data = 3, transport = 4, stall = 5 };

class Error : public std::runtime_error {
 public:
  Error(ErrorFamily family, const std::string& what)
      : std::runtime_error(what), family_(family) {}

  ErrorFamily family() const noexcept { return family_; }

 private:
  ErrorFamily family_;
};

class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& what) : Error(ErrorFamily::config, what) {}
};

class DataError : public Error {
 public:
  explicit DataError(const std::string& what) : Error(ErrorFamily::data, what) {}
};

class TransportError : public Error {
 public:
  explicit TransportError(const std::string& what, bool retryable = false)
      : Error(ErrorFamily::transport, what), retryable_(retryable) {}

  bool retryable() const noexcept { return retryable_; }

 private:
  bool retryable_;
};

class StallError : public Error {
 public:
  explicit StallError(const std::string& what) : Error(ErrorFamily::stall, what) {}
};

}  // namespace rddg
