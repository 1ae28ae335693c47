#pragma once

#include <stdexcept>
#include <string>

namespace unifx {

enum class ErrorCode {
  invalid_argument,  // precondition violated by the caller
  config,            // run configuration rejected
  parse,             // model text or CSV could not be parsed
  numeric,           // degenerate or non-finite numerical state
  resource,          // a size cap was exceeded
  io,                // file could not be read or written
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

class InvalidArgument : public Error {
 public:
  explicit InvalidArgument(const std::string& what)
      : Error(ErrorCode::invalid_argument, what) {}
};

class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& what) : Error(ErrorCode::config, what) {}
};

class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t position)
      : Error(ErrorCode::parse, what), position_(position) {}
  explicit ParseError(const std::string& what) : ParseError(what, 0) {}
  std::size_t position() const noexcept { return position_; }

 private:
  std::size_t position_;
};

class NumericError : public Error {
 public:
  explicit NumericError(const std::string& what) : Error(ErrorCode::numeric, what) {}
};

class ResourceError : public Error {
 public:
  explicit ResourceError(const std::string& what) : Error(ErrorCode::resource, what) {}
};

class IoError : public Error {
 public:
  explicit IoError(const std::string& what) : Error(ErrorCode::io, what) {}
};

}  // namespace unifx
