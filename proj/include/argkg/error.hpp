#pragma once

#include <stdexcept>
#include <string>

namespace argkg {

// Base of every error thrown by the library. Subclasses let callers tell
// recoverable per-sentence failures apart from configuration mistakes.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

class ParseError : public Error {
 public:
  ParseError(const std::string& what, long line = -1)
      : Error(line >= 0 ? what + " (line " + std::to_string(line) + ")" : what),
        line_(line) {}
  long line() const { return line_; }

 private:
  long line_;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

// Invalid input data for an operation (empty corpus, single-class dataset...).
class DataError : public Error {
 public:
  using Error::Error;
};

// Caller bug, e.g. an unknown node id handed to a graph query.
class LogicError : public Error {
 public:
  using Error::Error;
};

class TransportError : public Error {
 public:
  TransportError(const std::string& what, int status = 0)
      : Error(what), status_(status) {}
  int status() const { return status_; }

 private:
  int status_;
};

class CacheMissError : public Error {
 public:
  using Error::Error;
};

}  // namespace argkg
