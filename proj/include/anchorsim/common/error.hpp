#pragma once

#include <stdexcept>
#include <string>

namespace anchorsim {

/// Base for every domain error raised by the library.
class Error : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

/// Malformed input, bad parameters or violated preconditions.
class InvalidArgument : public Error
{
public:
  using Error::Error;
};

/// Signature or state-validation failure.
class ValidationError : public Error
{
public:
  using Error::Error;
};

/// A requested record (transaction, address, channel) does not exist.
class LookupError : public Error
{
public:
  using Error::Error;
};

/// A scenario file could not be parsed; carries the offending line.
class ParseError : public Error
{
public:
  ParseError(std::size_t line, std::string const &field, std::string const &what)
    : Error("line " + std::to_string(line) + ", field '" + field + "': " + what)
    , line_(line)
    , field_(field)
  {}

  std::size_t line() const noexcept { return line_; }
  std::string const &field() const noexcept { return field_; }

private:
  std::size_t line_;
  std::string field_;
};

/// A run-time invariant of the simulation was broken.
class InvariantViolation : public Error
{
public:
  using Error::Error;
};

}  // namespace anchorsim
